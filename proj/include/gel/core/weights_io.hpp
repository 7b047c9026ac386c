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
#include <utility>
#include <vector>

#include <json.hpp>

#include "gel/core/binary_io.hpp"
#include "gel/core/param_store.hpp"

namespace gel {

// WTS1 layout (little-endian):
//   "WTS1" | version u16 | count u32 |
//   count x { name_len u32 | name (UTF-8) | rank u32 | dims u32 x rank | f32 x prod(dims) }
// Metadata goes to a JSON sidecar next to the weights file (<path>.json).

inline constexpr std::string_view wts_magic = "WTS1";
inline constexpr std::uint16_t wts_version = 1;

struct named_tensor {
    std::string name;
    tensor<float> value;
};

struct weights_file {
    std::vector<named_tensor> tensors;
    nlohmann::json metadata;
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    return std::filesystem::path(path.string() + ".json");
}

inline std::string encode_weights(const param_store<float>& store) {
    io::byte_writer w;
    w.magic(wts_magic);
    w.u16(wts_version);
    w.u32(std::uint32_t(store.size()));
    for (const auto& p : store) {
        w.u32(std::uint32_t(p->name.size()));
        w.raw(p->name.data(), p->name.size());
        w.u32(std::uint32_t(p->value.rank()));
        for (auto d : p->value.shape()) {
            w.u32(std::uint32_t(d));
        }
        w.raw(p->value.data(), p->value.size() * sizeof(float));
    }
    return w.bytes();
}

inline std::vector<named_tensor> decode_weights(std::string_view bytes, const std::string& what = "WTS1") {
    io::byte_reader r(bytes, what);
    r.expect_magic(wts_magic);
    if (auto v = r.u16(); v != wts_version) {
        throw data_error(what + ": unsupported version " + std::to_string(v));
    }
    const auto count = r.u32();
    std::vector<named_tensor> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        named_tensor t;
        t.name.resize(r.u32());
        r.raw(t.name.data(), t.name.size(), "tensor name");
        shape_t shape(r.u32());
        for (auto& d : shape) {
            d = r.u32();
        }
        t.value = tensor<float>(shape);
        r.raw(t.value.data(), t.value.size() * sizeof(float), "tensor values");
        out.push_back(std::move(t));
    }
    r.expect_end();
    return out;
}

inline void save_weights(const std::filesystem::path& path, const param_store<float>& store,
                         const nlohmann::json& metadata) {
    io::write_file(path, encode_weights(store));
    io::write_file(sidecar_path(path), metadata.dump(2) + "\n");
}

inline weights_file load_weights(const std::filesystem::path& path) {
    weights_file f;
    f.tensors = decode_weights(io::read_file(path), path.string());
    const auto side = sidecar_path(path);
    if (std::filesystem::exists(side)) {
        try {
            f.metadata = nlohmann::json::parse(io::read_file(side));
        } catch (const nlohmann::json::exception& e) {
            throw data_error(side.string() + ": " + e.what());
        }
    }
    return f;
}

/// Copies tensors into a store whose layout must match by name and shape.
inline void assign_weights(param_store<float>& store, const std::vector<named_tensor>& tensors) {
    if (tensors.size() != store.size()) {
        throw data_error("weights: file holds " + std::to_string(tensors.size()) + " tensors, model expects " +
                         std::to_string(store.size()));
    }
    for (const auto& t : tensors) {
        auto* p = store.find(t.name);
        if (!p) {
            throw data_error("weights: unexpected tensor '" + t.name + "'");
        }
        if (p->value.shape() != t.value.shape()) {
            throw data_error("weights: tensor '" + t.name + "' has shape " + to_string(t.value.shape()) +
                             ", model expects " + to_string(p->value.shape()));
        }
        p->value = t.value;
    }
}

} // namespace gel
