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
#include <vector>

#include <json.hpp>

#include "gel/core/layers.hpp"
#include "gel/core/param_store.hpp"
#include "gel/core/weights_io.hpp"

namespace gel::clcnn {

inline constexpr std::size_t conv_kernel = 3;
inline constexpr std::size_t pool_size = 3;

/// Classifier geometry: embedding width d', window c, classes and conv width o.
struct classifier_shape {
    std::size_t embed_dim = 10;
    std::size_t window = 80;
    std::size_t classes = 9;
    std::size_t channels = 512;

    /// Sequence length after each stage: input, conv1, pool1, conv2, pool2, conv3, conv4 (0 once it underflows).
    std::vector<std::size_t> length_chain() const {
        std::vector<std::size_t> out{window};
        auto conv = [](std::size_t l) { return l >= conv_kernel ? l - conv_kernel + 1 : 0; };
        out.push_back(conv(out.back()));
        out.push_back(pool_out_size(out.back(), pool_size, pool_size));
        out.push_back(conv(out.back()));
        out.push_back(pool_out_size(out.back(), pool_size, pool_size));
        out.push_back(conv(out.back()));
        out.push_back(conv(out.back()));
        return out;
    }

    std::size_t final_length() const { return length_chain().back(); }

    /// Smallest window whose stack leaves at least one position.
    static std::size_t min_window() {
        classifier_shape s;
        for (s.window = 1; s.final_length() < 1; ++s.window) {
        }
        return s.window;
    }

    void validate() const {
        if (embed_dim < 1 || classes < 2 || channels < 1) {
            throw config_error("classifier: need embed_dim >= 1, classes >= 2, channels >= 1");
        }
        if (final_length() < 1) {
            throw config_error("classifier: window c=" + std::to_string(window) +
                               " leaves no positions after the conv/pool stack; minimum is " +
                               std::to_string(min_window()));
        }
    }

    nlohmann::json to_json() const {
        return {{"embed_dim", embed_dim}, {"window", window}, {"classes", classes}, {"channels", channels}};
    }

    static classifier_shape from_json(const nlohmann::json& j) {
        return {j.at("embed_dim").get<std::size_t>(), j.at("window").get<std::size_t>(),
                j.at("classes").get<std::size_t>(), j.at("channels").get<std::size_t>()};
    }
};

/*!
 * \brief Character-level CNN over [d', c] embedded windows.
 *
 * conv(3, o) + ReLU, maxpool(3, 3), conv(3, o) + ReLU, maxpool(3, 3),
 * conv(3, o) + ReLU, conv(3, o) + ReLU, then a linear layer over the
 * flattened o * L_final features.
 */
template <typename T>
class text_classifier {
public:
    explicit text_classifier(classifier_shape shape = {}) : shape_(shape) {
        shape_.validate();
        const std::size_t o = shape_.channels;
        net_.template add<conv1d>(params_, "conv1", shape_.embed_dim, o, conv_kernel);
        net_.template add<relu>("relu1");
        net_.template add<maxpool1d>("pool1", pool_size, pool_size);
        net_.template add<conv1d>(params_, "conv2", o, o, conv_kernel);
        net_.template add<relu>("relu2");
        net_.template add<maxpool1d>("pool2", pool_size, pool_size);
        net_.template add<conv1d>(params_, "conv3", o, o, conv_kernel);
        net_.template add<relu>("relu3");
        net_.template add<conv1d>(params_, "conv4", o, o, conv_kernel);
        net_.template add<relu>("relu4");
        net_.template add<linear>(params_, "fc", o * shape_.final_length(), shape_.classes);
        net_.build({shape_.embed_dim, shape_.window});
    }

    text_classifier(text_classifier&&) noexcept = default;
    text_classifier& operator=(text_classifier&&) noexcept = default;

    const classifier_shape& shape() const noexcept { return shape_; }
    param_store<T>& params() noexcept { return params_; }
    const param_store<T>& params() const noexcept { return params_; }
    sequential<T>& net() noexcept { return net_; }
    const sequential<T>& net() const noexcept { return net_; }

    /// Logits [N, classes] for a [N, d', c] batch, keeping nothing for backward.
    tensor<T> logits(const tensor<T>& x) const { return net_.infer(x); }

private:
    classifier_shape shape_;
    param_store<T> params_;
    sequential<T> net_;
};

/// WTS1 weights; the sidecar carries the shape plus whatever the caller adds (augmentation, table hash).
inline void save_classifier(const std::filesystem::path& path, const text_classifier<float>& model,
                            nlohmann::json extra = nlohmann::json::object()) {
    extra["kind"] = "clcnn";
    extra["architecture"] = model.shape().to_json();
    save_weights(path, model.params(), extra);
}

struct loaded_classifier {
    text_classifier<float> model;
    nlohmann::json metadata;
};

inline loaded_classifier load_classifier(const std::filesystem::path& path) {
    auto file = load_weights(path);
    if (file.metadata.value("kind", "") != "clcnn" || !file.metadata.contains("architecture")) {
        throw data_error(path.string() + ": not a classifier (sidecar " + sidecar_path(path).string() +
                         " lacks kind=clcnn and an architecture)");
    }
    loaded_classifier out{text_classifier<float>(classifier_shape::from_json(file.metadata["architecture"])),
                          file.metadata};
    assign_weights(out.model.params(), file.tensors);
    return out;
}

} // namespace gel::clcnn
