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
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gel/core/error.hpp"
#include "gel/core/tensor.hpp"

namespace gel::augment {

struct ssa_config {
    double gamma = 2.0;      ///< u ~ U(-gamma, gamma)
    double rate = 1.0;       ///< probability a character position is perturbed
    std::uint64_t seed = 0;  ///< mixed into the trainer's augmentation stream

    void validate() const {
        if (!(gamma >= 0) || !std::isfinite(gamma)) {
            throw config_error("ssa: gamma must be a finite value >= 0, got " + std::to_string(gamma));
        }
        if (!(rate >= 0 && rate <= 1)) {
            throw config_error("ssa: rate must lie in [0, 1], got " + std::to_string(rate));
        }
    }

    nlohmann::json to_json() const { return {{"kind", "ssa"}, {"gamma", gamma}, {"rate", rate}, {"seed", seed}}; }
};

/// Wildcard training: whole character embeddings dropped to zero.
struct wt_config {
    double p = 0.1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(p >= 0 && p <= 1)) {
            throw config_error("wt: p must lie in [0, 1], got " + std::to_string(p));
        }
    }

    nlohmann::json to_json() const { return {{"kind", "wt"}, {"p", p}, {"seed", seed}}; }
};

struct no_augmentation {
    nlohmann::json to_json() const { return {{"kind", "none"}}; }
};

using augmentation = std::variant<no_augmentation, ssa_config, wt_config>;

inline nlohmann::json to_json(const augmentation& a) {
    return std::visit([](const auto& c) { return c.to_json(); }, a);
}

inline std::uint64_t augmentation_seed(const augmentation& a) {
    return std::visit(
        [](const auto& c) -> std::uint64_t {
            if constexpr (requires { c.seed; }) {
                return c.seed;
            } else {
                return 0;
            }
        },
        a);
}

/// One SSA draw: position (sample, t) had dimension dim shifted by u.
struct ssa_draw {
    std::size_t sample = 0;
    std::size_t position = 0;
    std::size_t dim = 0;
    double u = 0;
};

namespace detail {

inline void check_batch(const char* op, const shape_t& shape, std::size_t mask_size) {
    if (shape.size() != 3) {
        throw shape_error(std::string(op) + ": expected an [N, d, L] batch, got " + to_string(shape));
    }
    if (mask_size != shape[0] * shape[2]) {
        throw shape_error(std::string(op) + ": mask has " + std::to_string(mask_size) + " entries, batch needs " +
                          std::to_string(shape[0] * shape[2]));
    }
}

} // namespace detail

/*!
 * \brief Semantic sub-character augmentation, in place.
 *
 * batch is [N, d, L] (embedding dimensions as channels); mask[n * L + t] is
 * nonzero for character positions and zero for padding. Each character
 * position is, with probability rate, shifted in one uniformly chosen
 * dimension by u ~ U(-gamma, gamma). Returns the draws that were applied.
 */
template <typename T, std::uniform_random_bit_generator Rng>
std::vector<ssa_draw> ssa(tensor<T>& batch, std::span<const std::uint8_t> mask, const ssa_config& cfg, Rng& rng) {
    cfg.validate();
    detail::check_batch("ssa", batch.shape(), mask.size());
    std::vector<ssa_draw> draws;
    if (cfg.gamma == 0 || cfg.rate == 0) {
        return draws;
    }
    const std::size_t n = batch.dim(0), d = batch.dim(1), len = batch.dim(2);
    std::bernoulli_distribution pick(cfg.rate);
    std::uniform_int_distribution<std::size_t> dim(0, d - 1);
    std::uniform_real_distribution<double> shift(-cfg.gamma, cfg.gamma);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t t = 0; t < len; ++t) {
            if (!mask[b * len + t] || (cfg.rate < 1 && !pick(rng))) {
                continue;
            }
            const std::size_t i = dim(rng);
            const double u = shift(rng);
            T& z = batch[(b * d + i) * len + t];
            const double before = z;
            T after = T(before + u);
            // keep |after - before| <= gamma despite rounding
            if (std::abs(double(after) - before) > cfg.gamma) {
                after = std::nextafter(after, T(before));
            }
            z = after;
            draws.push_back({b, t, i, u});
        }
    }
    return draws;
}

/// Wildcard training in place: each character position zeroed with probability p. Returns the count zeroed.
template <typename T, std::uniform_random_bit_generator Rng>
std::size_t wildcard(tensor<T>& batch, std::span<const std::uint8_t> mask, const wt_config& cfg, Rng& rng) {
    cfg.validate();
    detail::check_batch("wildcard", batch.shape(), mask.size());
    const std::size_t n = batch.dim(0), d = batch.dim(1), len = batch.dim(2);
    std::bernoulli_distribution drop(cfg.p);
    std::size_t zeroed = 0;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t t = 0; t < len; ++t) {
            if (!mask[b * len + t] || !drop(rng)) {
                continue;
            }
            for (std::size_t i = 0; i < d; ++i) {
                batch[(b * d + i) * len + t] = T{0};
            }
            ++zeroed;
        }
    }
    return zeroed;
}

/// Applies whichever augmentation is configured; no_augmentation leaves the batch untouched.
template <typename T, std::uniform_random_bit_generator Rng>
void apply(const augmentation& aug, tensor<T>& batch, std::span<const std::uint8_t> mask, Rng& rng) {
    if (const auto* s = std::get_if<ssa_config>(&aug)) {
        ssa(batch, mask, *s, rng);
    } else if (const auto* w = std::get_if<wt_config>(&aug)) {
        wildcard(batch, mask, *w, rng);
    }
}

} // namespace gel::augment
