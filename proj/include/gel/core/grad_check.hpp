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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gel/core/param_store.hpp"

namespace gel {

/// A block of coordinates to perturb together with its analytic gradient.
struct grad_probe {
    std::string name;
    std::span<double> values;
    std::span<const double> analytic;
};

struct grad_check_options {
    double step = 1e-5;
    /// Coordinates checked per probe; 0 checks every coordinate.
    std::size_t samples_per_probe = 0;
    std::uint64_t seed = 7;
    /// Relative errors use max(|analytic|, |numeric|, floor) as denominator.
    double floor = 1e-7;
    /// A coordinate whose one-sided slopes disagree by more than this
    /// (relative) sits on a kink (ReLU at 0, pooling tie) and is skipped.
    double kink_tolerance = 1e-2;
    /// Central differences at step and step/2 disagreeing by more than this
    /// (relative) mean a perturbation crossed a nearby kink; skipped too.
    double crossing_tolerance = 1e-3;
    /// Differences below roundoff_factor * eps * |loss| / step are rounding
    /// noise of the loss itself and are not counted as error.
    double roundoff_factor = 4.0;
};

struct grad_check_group {
    std::string name;
    double max_rel_error = 0;
    double max_raw_error = 0;  ///< same ratio without the roundoff allowance
    std::size_t checked = 0;
    std::size_t skipped = 0;
};

struct grad_check_report {
    std::vector<grad_check_group> groups;

    double max_rel_error() const {
        double m = 0;
        for (const auto& g : groups) {
            m = std::max(m, g.max_rel_error);
        }
        return m;
    }
    std::size_t checked() const {
        std::size_t n = 0;
        for (const auto& g : groups) {
            n += g.checked;
        }
        return n;
    }
    std::size_t skipped() const {
        std::size_t n = 0;
        for (const auto& g : groups) {
            n += g.skipped;
        }
        return n;
    }
};

/*!
 * \brief Compares analytic gradients against central differences.
 *
 * `loss` evaluates the scalar objective at the current values of the probes;
 * each checked coordinate is perturbed by +/- step and restored afterwards.
 */
template <typename Loss>
grad_check_report grad_check(std::span<const grad_probe> probes, Loss&& loss, const grad_check_options& opt = {}) {
    grad_check_report report;
    std::mt19937_64 rng(opt.seed);
    const double h = opt.step;
    const double f0 = loss();
    for (const auto& probe : probes) {
        grad_check_group group{probe.name};
        std::vector<std::size_t> coords(probe.values.size());
        std::iota(coords.begin(), coords.end(), std::size_t{0});
        if (opt.samples_per_probe && opt.samples_per_probe < coords.size()) {
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(opt.samples_per_probe);
            std::sort(coords.begin(), coords.end());
        }
        for (auto i : coords) {
            const double saved = probe.values[i];
            probe.values[i] = saved + h;
            const double fp = loss();
            probe.values[i] = saved - h;
            const double fm = loss();
            probe.values[i] = saved;
            const double numeric = (fp - fm) / (2 * h);
            const double noise = opt.roundoff_factor * std::numeric_limits<double>::epsilon() *
                                 std::max({std::abs(f0), std::abs(fp), std::abs(fm)}) / h;
            const double right = (fp - f0) / h, left = (f0 - fm) / h;
            if (std::abs(right - left) > opt.kink_tolerance * std::max({std::abs(right), std::abs(left), opt.floor})) {
                ++group.skipped;
                continue;
            }
            probe.values[i] = saved + h / 2;
            const double fp2 = loss();
            probe.values[i] = saved - h / 2;
            const double fm2 = loss();
            probe.values[i] = saved;
            const double half = (fp2 - fm2) / h;
            if (std::abs(half - numeric) - 3 * noise >
                opt.crossing_tolerance * std::max({std::abs(half), std::abs(numeric), opt.floor})) {
                ++group.skipped;
                continue;
            }
            const double a = probe.analytic[i];
            const double denom = std::max({std::abs(a), std::abs(numeric), opt.floor});
            group.max_rel_error = std::max(group.max_rel_error, std::max(0.0, std::abs(a - numeric) - noise) / denom);
            group.max_raw_error = std::max(group.max_raw_error, std::abs(a - numeric) / denom);
            ++group.checked;
        }
        report.groups.push_back(group);
    }
    return report;
}

/// One probe per parameter, perturbing values against the stored gradients.
inline std::vector<grad_probe> parameter_probes(param_store<double>& store) {
    std::vector<grad_probe> probes;
    for (auto& p : store) {
        probes.push_back({p->name, p->value.values(), p->grad.values()});
    }
    return probes;
}

} // namespace gel
