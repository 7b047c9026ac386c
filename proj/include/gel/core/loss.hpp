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
#include <span>
#include <vector>

#include "gel/core/error.hpp"
#include "gel/core/tensor.hpp"

namespace gel {

/// Numerically stable softmax of one row.
template <typename T>
std::vector<double> softmax(std::span<const T> logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(double(logits[i]) - m);
        z += p[i];
    }
    for (auto& v : p) {
        v /= z;
    }
    return p;
}

/*!
 * \brief Mean softmax cross-entropy over a [N, K] logit batch.
 *
 * When grad is non-null it receives d(loss)/d(logits) = (softmax - onehot) / N.
 */
template <typename T>
double cross_entropy(const tensor<T>& logits, std::span<const std::size_t> labels, tensor<T>* grad = nullptr) {
    if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
        throw shape_error("cross_entropy: " + std::to_string(labels.size()) + " labels for logits " +
                          to_string(logits.shape()));
    }
    const std::size_t n = logits.dim(0), k = logits.dim(1);
    if (grad) {
        grad->resize(logits.shape());
    }
    double loss = 0;
    for (std::size_t b = 0; b < n; ++b) {
        if (labels[b] >= k) {
            throw config_error("cross_entropy: label " + std::to_string(labels[b]) + " outside " +
                               std::to_string(k) + " classes");
        }
        const auto row = logits.sample(b);
        const double m = *std::max_element(row.begin(), row.end());
        double z = 0;
        for (auto v : row) {
            z += std::exp(double(v) - m);
        }
        const double lse = m + std::log(z);
        loss += lse - double(row[labels[b]]);
        if (grad) {
            for (std::size_t j = 0; j < k; ++j) {
                const double p = std::exp(double(row[j]) - lse);
                (*grad)[b * k + j] = T((p - (j == labels[b] ? 1.0 : 0.0)) / double(n));
            }
        }
    }
    return loss / double(n);
}

} // namespace gel
