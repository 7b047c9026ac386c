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
#include <concepts>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "gel/core/error.hpp"

namespace gel::vce {

inline constexpr double logvar_min = -10.0;
inline constexpr double logvar_max = 10.0;

/// Diagonal Gaussian posterior q(z|x) = N(mu, diag(sigma^2)).
struct latent_code {
    std::vector<double> mu;
    std::vector<double> sigma;

    std::size_t dim() const noexcept { return mu.size(); }

    static latent_code from_logvar(std::span<const double> mu, std::span<const double> logvar) {
        latent_code c{{mu.begin(), mu.end()}, std::vector<double>(logvar.size())};
        for (std::size_t i = 0; i < logvar.size(); ++i) {
            c.sigma[i] = std::exp(0.5 * std::clamp(logvar[i], logvar_min, logvar_max));
        }
        return c;
    }
};

/// z = mu + alpha * sigma for a given noise vector alpha.
inline std::vector<double> reparameterize(const latent_code& code, std::span<const double> alpha) {
    if (alpha.size() != code.dim()) {
        throw config_error("reparameterize: noise has " + std::to_string(alpha.size()) + " entries, latent has " +
                           std::to_string(code.dim()));
    }
    std::vector<double> z(code.dim());
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = code.mu[i] + alpha[i] * code.sigma[i];
    }
    return z;
}

/// z = mu + alpha * sigma with alpha ~ N(0, I).
template <std::uniform_random_bit_generator Rng>
std::vector<double> reparameterize(const latent_code& code, Rng& rng) {
    std::normal_distribution<double> normal;
    std::vector<double> alpha(code.dim());
    for (auto& a : alpha) {
        a = normal(rng);
    }
    return reparameterize(code, alpha);
}

/// Closed-form KL[q(z|x) || N(0, I)] for one dimension.
inline double kl_term(double mu, double sigma) {
    const double var = sigma * sigma;
    return 0.5 * (mu * mu + var - std::log(var) - 1.0);
}

inline double kl_divergence(const latent_code& code) {
    double kl = 0;
    for (std::size_t i = 0; i < code.dim(); ++i) {
        kl += kl_term(code.mu[i], code.sigma[i]);
    }
    return kl;
}

inline constexpr double prob_clamp = 1e-6;

/// Bernoulli log-likelihood sum_i x_i log xhat_i + (1 - x_i) log(1 - xhat_i), xhat clamped to [1e-6, 1-1e-6].
template <typename T, typename U>
double bernoulli_log_likelihood(std::span<const T> x, std::span<const U> xhat) {
    if (x.size() != xhat.size()) {
        throw shape_error("bernoulli_log_likelihood: " + std::to_string(x.size()) + " targets vs " +
                          std::to_string(xhat.size()) + " reconstructions");
    }
    double ll = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = std::clamp(double(xhat[i]), prob_clamp, 1.0 - prob_clamp);
        ll += double(x[i]) * std::log(p) + (1.0 - double(x[i])) * std::log(1.0 - p);
    }
    return ll;
}

struct elbo_terms {
    double total = 0; ///< recon - beta * kl, the quantity maximized
    double recon = 0; ///< Bernoulli log-likelihood (<= 0)
    double kl = 0;
};

/// Single-sample beta-weighted evidence lower bound.
template <typename T, typename U>
elbo_terms elbo_loss(std::span<const T> x, std::span<const U> xhat, const latent_code& code, double beta) {
    elbo_terms t;
    t.recon = bernoulli_log_likelihood(x, xhat);
    t.kl = kl_divergence(code);
    t.total = t.recon - beta * t.kl;
    return t;
}

} // namespace gel::vce
