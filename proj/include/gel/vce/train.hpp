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
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gel/core/random.hpp"
#include "gel/glyphset/dataset.hpp"
#include "gel/vce/objective.hpp"

namespace gel::vce {

struct vce_config {
    std::size_t latent_dim = 10;
    double beta = 8.0;
    double learning_rate = 1e-4;
    std::size_t batch_size = 64;
    std::size_t steps = 50000;
    std::uint64_t seed = 1;
    std::size_t log_every = 100;
    bool variational = true;

    void validate() const {
        if (latent_dim < 1) {
            throw config_error("latent_dim must be >= 1");
        }
        if (!(beta >= 0) || !std::isfinite(beta)) {
            throw config_error("beta must be a finite value >= 0");
        }
        if (!(learning_rate > 0)) {
            throw config_error("learning_rate must be > 0");
        }
        if (batch_size < 1 || steps < 1 || log_every < 1) {
            throw config_error("batch_size, steps and log_every must be >= 1");
        }
    }

    nlohmann::json to_json() const {
        return {{"latent_dim", latent_dim}, {"beta", beta},   {"learning_rate", learning_rate},
                {"batch_size", batch_size}, {"steps", steps}, {"seed", seed},
                {"log_every", log_every},   {"variational", variational}};
    }
};

struct log_row {
    std::size_t step = 0;
    double total = 0;
    double recon = 0;
    double kl = 0;
    std::vector<double> kl_per_dim;
};

struct vce_run {
    glyph_autoencoder<float> model;
    std::vector<log_row> log;
    std::size_t best_step = 0;
    double best_loss = std::numeric_limits<double>::infinity();
};

namespace detail {

inline std::string parameter_norms(const param_store<float>& store) {
    std::ostringstream os;
    for (std::size_t i = 0; i < store.size(); ++i) {
        os << (i ? ", " : "") << store[i].name << "=" << std::sqrt(squared_norm<float>(store[i].value.values()));
    }
    return os.str();
}

/// Endless stream of dataset indices, one fresh permutation per epoch.
class index_stream {
public:
    index_stream(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) { reshuffle(); }

    std::vector<std::size_t> next(std::size_t count) {
        std::vector<std::size_t> out(count);
        for (auto& i : out) {
            if (pos_ == order_.size()) {
                reshuffle();
            }
            i = order_[pos_++];
        }
        return out;
    }

private:
    void reshuffle() {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::shuffle(order_.begin(), order_.end(), rng_);
        pos_ = 0;
    }

    std::vector<std::size_t> order_;
    std::mt19937_64 rng_;
    std::size_t pos_ = 0;
};

} // namespace detail

/*!
 * \brief Trains the glyph autoencoder with Adam on the negative beta-ELBO.
 *
 * Every log_every steps the window-mean losses are logged; the parameters
 * with the lowest window mean are restored at the end. A non-finite loss
 * or gradient aborts with numerical_error naming the step.
 */
inline vce_run train_vce(const glyphset::glyph_dataset& ds, const vce_config& cfg,
                         const std::function<void(const log_row&)>& on_log = {}) {
    cfg.validate();
    if (ds.size() == 0) {
        throw data_error("train: glyph dataset is empty");
    }
    autoencoder_shape shape;
    shape.latent_dim = cfg.latent_dim;
    shape.variational = cfg.variational;
    vce_run run{glyph_autoencoder<float>(shape), {}, 0, std::numeric_limits<double>::infinity()};
    auto& model = run.model;
    model.params().init_he_uniform(derive_seed(cfg.seed, 0));

    detail::index_stream batches(ds.size(), derive_seed(cfg.seed, 1));
    std::mt19937_64 noise_rng(derive_seed(cfg.seed, 2));
    std::normal_distribution<float> normal;
    const adam_options adam{.lr = cfg.learning_rate};

    log_row window;
    std::size_t window_steps = 0;
    std::vector<tensor<float>> best;
    tensor<float> noise({cfg.batch_size, cfg.latent_dim});

    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        const auto images = glyphset::image_batch<float>(ds, batches.next(cfg.batch_size));
        if (cfg.variational) {
            for (auto& a : noise) {
                a = normal(noise_rng);
            }
        }
        model.params().zero_grad();
        const auto loss = negative_elbo(model, images, noise, cfg.beta);
        if (!std::isfinite(loss.total)) {
            throw numerical_error("train: non-finite loss at step " + std::to_string(step) +
                                  "; parameter norms: " + detail::parameter_norms(model.params()));
        }
        try {
            adam_step(model.params(), adam);
        } catch (const numerical_error& e) {
            throw numerical_error("train: step " + std::to_string(step) + ": " + e.what() +
                                  "; parameter norms: " + detail::parameter_norms(model.params()));
        }

        window.total += loss.total;
        window.recon += loss.recon;
        window.kl += loss.kl;
        window.kl_per_dim.resize(loss.kl_per_dim.size());
        for (std::size_t i = 0; i < loss.kl_per_dim.size(); ++i) {
            window.kl_per_dim[i] += loss.kl_per_dim[i];
        }
        ++window_steps;

        if (step % cfg.log_every == 0 || step == cfg.steps) {
            const double k = double(window_steps);
            log_row row{step, window.total / k, window.recon / k, window.kl / k, window.kl_per_dim};
            for (auto& v : row.kl_per_dim) {
                v /= k;
            }
            if (row.total < run.best_loss) {
                run.best_loss = row.total;
                run.best_step = step;
                best = model.params().snapshot();
            }
            if (on_log) {
                on_log(row);
            }
            run.log.push_back(std::move(row));
            window = {};
            window_steps = 0;
        }
    }
    model.params().restore(best);
    return run;
}

/// Deterministic-bottleneck baseline: same architecture and schedule, no sampling, no KL.
inline vce_run train_cae(const glyphset::glyph_dataset& ds, vce_config cfg,
                         const std::function<void(const log_row&)>& on_log = {}) {
    cfg.variational = false;
    cfg.beta = 0;
    return train_vce(ds, cfg, on_log);
}

/// CSV training log: step,total,recon,kl[,kl_0..kl_{d'-1}].
inline std::string log_csv(const std::vector<log_row>& rows, std::size_t latent_dim, bool variational) {
    std::ostringstream os;
    os.precision(9);
    os << "step,total,recon,kl";
    if (variational) {
        for (std::size_t i = 0; i < latent_dim; ++i) {
            os << ",kl_" << i;
        }
    }
    os << "\n";
    for (const auto& r : rows) {
        os << r.step << "," << r.total << "," << r.recon << "," << r.kl;
        for (double v : r.kl_per_dim) {
            os << "," << v;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace gel::vce
