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
#include <vector>

#include "gel/vce/model.hpp"

namespace gel::vce {

/// Batch means of the minimized objective and its parts.
struct batch_loss {
    double total = 0;               ///< recon + beta * kl (negative ELBO)
    double recon = 0;               ///< Bernoulli cross-entropy per image
    double kl = 0;
    std::vector<double> kl_per_dim; ///< empty for a deterministic bottleneck
};

/*!
 * \brief One pass of the negative beta-ELBO over a batch.
 *
 * noise holds alpha ~ N(0, I) as [N, d']; it is ignored for a deterministic
 * model. With backward set, parameter gradients are accumulated into the
 * model's store (the caller zeroes them). The reconstruction gradient uses
 * the fused sigmoid/cross-entropy form xhat - x on the logits.
 */
template <typename T>
batch_loss negative_elbo(glyph_autoencoder<T>& model, const tensor<T>& images, const tensor<T>& noise, double beta,
                         bool backward = true) {
    const std::size_t n = images.dim(0);
    const std::size_t d = model.latent_dim();
    const std::size_t h = model.shape().head_size();
    const bool var = model.variational();
    if (var && (noise.rank() != 2 || noise.dim(0) != n || noise.dim(1) != d)) {
        throw shape_error("negative_elbo: noise must be [" + std::to_string(n) + ", " + std::to_string(d) +
                          "], got " + to_string(noise.shape()));
    }

    const tensor<T>& head = model.encoder().forward(images);
    tensor<T> z({n, d});
    batch_loss out;
    if (var) {
        out.kl_per_dim.assign(d, 0.0);
    }
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t i = 0; i < d; ++i) {
            const double mu = head[b * h + i];
            if (!var) {
                z[b * d + i] = T(mu);
                continue;
            }
            const double lv = std::clamp(double(head[b * h + d + i]), logvar_min, logvar_max);
            const double sigma = std::exp(0.5 * lv);
            z[b * d + i] = T(mu + double(noise[b * d + i]) * sigma);
            out.kl_per_dim[i] += 0.5 * (mu * mu + sigma * sigma - lv - 1.0);
        }
    }
    for (auto& k : out.kl_per_dim) {
        k /= double(n);
        out.kl += k;
    }

    const tensor<T>& logits = model.decoder().forward(z);
    tensor<T> grad_logits(logits.shape());
    // Neumaier-compensated sum; the batch has N * 4096 terms.
    double recon = 0, carry = 0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double p = 1.0 / (1.0 + std::exp(-double(logits[i])));
        const double pc = std::clamp(p, prob_clamp, 1.0 - prob_clamp);
        const double x = images[i];
        const double term = -(x * std::log(pc) + (1.0 - x) * std::log1p(-pc));
        const double sum = recon + term;
        carry += std::abs(recon) >= std::abs(term) ? (recon - sum) + term : (term - sum) + recon;
        recon = sum;
        grad_logits[i] = T((p - x) / double(n));
    }
    out.recon = (recon + carry) / double(n);
    out.total = out.recon + (var ? beta * out.kl : 0.0);
    if (!backward) {
        return out;
    }

    tensor<T> grad_z;
    model.decoder().backward(grad_logits, &grad_z);
    tensor<T> grad_head(head.shape());
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t i = 0; i < d; ++i) {
            const double gz = grad_z[b * d + i];
            if (!var) {
                grad_head[b * h + i] = T(gz);
                continue;
            }
            const double mu = head[b * h + i];
            const double raw = head[b * h + d + i];
            const double lv = std::clamp(raw, logvar_min, logvar_max);
            const double sigma = std::exp(0.5 * lv);
            grad_head[b * h + i] = T(gz + beta * mu / double(n));
            const bool clamped = raw <= logvar_min || raw >= logvar_max;
            grad_head[b * h + d + i] =
                clamped ? T(0)
                        : T(gz * double(noise[b * d + i]) * 0.5 * sigma + beta * 0.5 * (std::exp(lv) - 1.0) / double(n));
        }
    }
    model.encoder().backward(grad_head, nullptr);
    return out;
}

} // namespace gel::vce
