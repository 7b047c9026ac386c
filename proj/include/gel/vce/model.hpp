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

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "gel/core/layers.hpp"
#include "gel/core/param_store.hpp"
#include "gel/vce/latent.hpp"

namespace gel::vce {

/// Layer widths of the glyph autoencoder. The defaults are the full model.
struct autoencoder_shape {
    std::size_t latent_dim = 10;
    bool variational = true;               ///< false: deterministic bottleneck (CAE)
    std::array<std::size_t, 4> channels{32, 32, 64, 64};
    std::size_t hidden = 256;
    std::size_t image_side = 64;

    std::size_t head_size() const { return variational ? 2 * latent_dim : latent_dim; }
    std::size_t bottom_side() const { return image_side / 16; }

    nlohmann::json to_json() const {
        return {{"latent_dim", latent_dim},
                {"variational", variational},
                {"channels", channels},
                {"hidden", hidden},
                {"image_side", image_side}};
    }

    static autoencoder_shape from_json(const nlohmann::json& j) {
        autoencoder_shape s;
        s.latent_dim = j.at("latent_dim").get<std::size_t>();
        s.variational = j.at("variational").get<bool>();
        s.channels = j.at("channels").get<std::array<std::size_t, 4>>();
        s.hidden = j.at("hidden").get<std::size_t>();
        s.image_side = j.at("image_side").get<std::size_t>();
        return s;
    }
};

/// Encoder mean/log-variance for a batch; log-variance is already clamped.
template <typename T>
struct posterior_batch {
    tensor<T> mu;     ///< [N, d']
    tensor<T> logvar; ///< [N, d']; unused for a deterministic bottleneck
    bool deterministic = false;

    /// Code of sample n; a deterministic bottleneck reports sigma = 0.
    latent_code code(std::size_t n) const {
        std::vector<double> m(mu.sample(n).begin(), mu.sample(n).end());
        if (deterministic) {
            return {m, std::vector<double>(m.size(), 0.0)};
        }
        std::vector<double> lv(logvar.sample(n).begin(), logvar.sample(n).end());
        return latent_code::from_logvar(m, lv);
    }
};

/*!
 * \brief Convolutional glyph autoencoder (variational or deterministic).
 *
 * Encoder: four conv(k=4, s=2, p=1) + ReLU stages, flatten, linear + ReLU,
 * then a linear head emitting [mu | logvar] (variational) or the code
 * itself (deterministic). Decoder: linear + ReLU, linear + ReLU, reshape,
 * three deconv(k=4, s=2, p=1) + ReLU, and a final deconv to one channel
 * whose sigmoid is the reconstruction.
 */
template <typename T>
class glyph_autoencoder {
public:
    explicit glyph_autoencoder(autoencoder_shape shape = {}) : shape_(shape) {
        if (shape_.latent_dim < 1) {
            throw config_error("autoencoder: latent_dim must be >= 1");
        }
        if (shape_.image_side < 16 || shape_.image_side % 16) {
            throw config_error("autoencoder: image side must be a positive multiple of 16");
        }
        const auto& ch = shape_.channels;
        const std::size_t bottom = shape_.bottom_side();
        const std::size_t flat = ch[3] * bottom * bottom;

        std::size_t in = 1;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto id = std::to_string(i + 1);
            encoder_.template add<conv2d>(params_, "enc.conv" + id, in, ch[i], 4, 2, 1);
            encoder_.template add<relu>("enc.relu" + id);
            in = ch[i];
        }
        encoder_.template add<reshape>("enc.flatten", shape_t{flat});
        encoder_.template add<linear>(params_, "enc.fc1", flat, shape_.hidden);
        encoder_.template add<relu>("enc.relu5");
        encoder_.template add<linear>(params_, "enc.fc2", shape_.hidden, shape_.head_size());
        encoder_.build({1, shape_.image_side, shape_.image_side});

        decoder_.template add<linear>(params_, "dec.fc1", shape_.latent_dim, shape_.hidden);
        decoder_.template add<relu>("dec.relu1");
        decoder_.template add<linear>(params_, "dec.fc2", shape_.hidden, flat);
        decoder_.template add<relu>("dec.relu2");
        decoder_.template add<reshape>("dec.unflatten", shape_t{ch[3], bottom, bottom});
        const std::array<std::size_t, 4> outs{ch[2], ch[1], ch[0], 1};
        in = ch[3];
        for (std::size_t i = 0; i < 4; ++i) {
            const auto id = std::to_string(i + 1);
            decoder_.template add<deconv2d>(params_, "dec.deconv" + id, in, outs[i], 4, 2, 1);
            if (i < 3) {
                decoder_.template add<relu>("dec.relu" + std::to_string(i + 3));
            }
            in = outs[i];
        }
        decoder_.build({shape_.latent_dim});
    }

    glyph_autoencoder(glyph_autoencoder&&) noexcept = default;
    glyph_autoencoder& operator=(glyph_autoencoder&&) noexcept = default;

    const autoencoder_shape& shape() const noexcept { return shape_; }
    std::size_t latent_dim() const noexcept { return shape_.latent_dim; }
    bool variational() const noexcept { return shape_.variational; }

    param_store<T>& params() noexcept { return params_; }
    const param_store<T>& params() const noexcept { return params_; }
    sequential<T>& encoder() noexcept { return encoder_; }
    sequential<T>& decoder() noexcept { return decoder_; }
    const sequential<T>& encoder() const noexcept { return encoder_; }
    /// The decoder emits logits; decode() applies the sigmoid.
    const sequential<T>& decoder() const noexcept { return decoder_; }

    /// Splits encoder head output into mu and clamped logvar.
    posterior_batch<T> split_head(const tensor<T>& head) const {
        const std::size_t n = head.dim(0), d = shape_.latent_dim;
        posterior_batch<T> out{tensor<T>({n, d}), tensor<T>({n, d}), !shape_.variational};
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t i = 0; i < d; ++i) {
                out.mu[b * d + i] = head[b * shape_.head_size() + i];
                if (shape_.variational) {
                    out.logvar[b * d + i] =
                        std::clamp(head[b * shape_.head_size() + d + i], T(logvar_min), T(logvar_max));
                }
            }
        }
        return out;
    }

    /// Posterior parameters for a [N, 1, S, S] image batch.
    posterior_batch<T> encode(const tensor<T>& images) const { return split_head(encoder_.infer(images)); }

    /// Reconstructions in (0, 1) for a [N, d'] code batch.
    tensor<T> decode(const tensor<T>& z) const {
        auto out = decoder_.infer(z);
        for (auto& v : out) {
            v = T(1) / (T(1) + std::exp(-v));
        }
        return out;
    }

private:
    autoencoder_shape shape_;
    param_store<T> params_;
    sequential<T> encoder_;
    sequential<T> decoder_;
};

} // namespace gel::vce
