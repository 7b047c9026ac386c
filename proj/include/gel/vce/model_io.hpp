// Copyright (c) 2026, The gel authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>

#include "gel/core/weights_io.hpp"
#include "gel/glyphset/charset.hpp"
#include "gel/vce/model.hpp"

namespace gel::vce {

/// Saves model weights (WTS1) with the architecture and charset hash in the sidecar.
inline void save_model(const std::filesystem::path& path, const glyph_autoencoder<float>& model,
                       const glyphset::charset& chars, nlohmann::json extra = nlohmann::json::object()) {
    extra["kind"] = model.variational() ? "vce" : "cae";
    extra["architecture"] = model.shape().to_json();
    extra["charset_sha256"] = to_hex(chars.hash());
    save_weights(path, model.params(), extra);
}

struct loaded_model {
    glyph_autoencoder<float> model;
    std::string charset_sha256;
    nlohmann::json metadata;
};

inline loaded_model load_model(const std::filesystem::path& path) {
    auto file = load_weights(path);
    if (!file.metadata.contains("architecture")) {
        throw data_error(path.string() + ": sidecar " + sidecar_path(path).string() +
                         " is missing or lacks an architecture entry");
    }
    loaded_model out{glyph_autoencoder<float>(autoencoder_shape::from_json(file.metadata["architecture"])),
                     file.metadata.value("charset_sha256", ""), file.metadata};
    assign_weights(out.model.params(), file.tensors);
    return out;
}

} // namespace gel::vce
