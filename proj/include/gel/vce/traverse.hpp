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

#include <cmath>
#include <filesystem>
#include <vector>

#include "gel/core/png.hpp"
#include "gel/vce/embedding.hpp"

namespace gel::vce {

/// Decoder output [N, 1, S, S] in (0, 1) to 8-bit images.
inline std::vector<gray_image> to_gray_images(const tensor<float>& batch) {
    const std::size_t n = batch.dim(0), h = batch.dim(2), w = batch.dim(3);
    std::vector<gray_image> out(n, gray_image{w, h, std::vector<std::uint8_t>(w * h)});
    for (std::size_t b = 0; b < n; ++b) {
        const auto s = batch.sample(b);
        for (std::size_t i = 0; i < w * h; ++i) {
            out[b].pixels[i] = std::uint8_t(std::lround(std::clamp(s[i], 0.0f, 1.0f) * 255.0f));
        }
    }
    return out;
}

/// Offsets lo..hi in equal steps; an odd count puts exactly 0 in the middle of a symmetric range.
inline std::vector<double> traversal_offsets(double lo, double hi, std::size_t steps) {
    if (steps == 0) {
        throw config_error("traverse: steps must be >= 1");
    }
    if (steps == 1) {
        return {0.5 * (lo + hi)};
    }
    std::vector<double> out(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        out[i] = lo + (hi - lo) * double(i) / double(steps - 1);
    }
    return out;
}

/*!
 * \brief Decodes mu(ch) with one latent dimension shifted by each offset.
 *
 * Returns [steps, 1, S, S] reconstructions in (0, 1).
 */
inline tensor<float> traverse(const glyph_autoencoder<float>& model, const embedding_table& table, char32_t ch,
                              std::size_t dim, double lo = -2.0, double hi = 2.0, std::size_t steps = 9) {
    const std::size_t d = model.latent_dim();
    if (table.dim() != d) {
        throw config_error("traverse: table dimension " + std::to_string(table.dim()) + " differs from model " +
                           std::to_string(d));
    }
    if (dim >= d) {
        throw config_error("traverse: dimension " + std::to_string(dim) + " out of range [0, " +
                           std::to_string(d) + ")");
    }
    const auto mu = table.mu(table.require(ch));
    const auto offsets = traversal_offsets(lo, hi, steps);
    tensor<float> z({steps, d});
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t j = 0; j < d; ++j) {
            z[s * d + j] = mu[j] + (j == dim ? float(offsets[s]) : 0.0f);
        }
    }
    return model.decode(z);
}

} // namespace gel::vce
