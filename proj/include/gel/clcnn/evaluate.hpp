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

#include <span>
#include <vector>

#include <json.hpp>

#include "gel/clcnn/model.hpp"
#include "gel/core/loss.hpp"
#include "gel/text/encode.hpp"
#include "gel/vce/embedding.hpp"

namespace gel::clcnn {

/// [N, d', c] embedded windows plus the [N, c] character mask (0 at pad positions).
template <typename T>
struct embedded_batch {
    tensor<T> x;
    std::vector<std::uint8_t> mask;
    std::vector<std::size_t> labels;
};

/// Looks up mu for every index of the chosen samples; pad rows are zeros.
template <typename T>
embedded_batch<T> embed(const vce::embedding_table& table, const std::vector<text::encoded_sample>& samples,
                        std::span<const std::size_t> which) {
    const std::size_t n = which.size(), d = table.dim();
    const std::size_t c = n ? samples[which[0]].indices.size() : 0;
    const std::size_t pad = table.chars().pad_index();
    embedded_batch<T> out{tensor<T>({n, d, c}), std::vector<std::uint8_t>(n * c, 0), std::vector<std::size_t>(n)};
    for (std::size_t b = 0; b < n; ++b) {
        const auto& s = samples[which[b]];
        if (s.indices.size() != c) {
            throw shape_error("embed: sample has length " + std::to_string(s.indices.size()) + ", batch uses " +
                              std::to_string(c));
        }
        out.labels[b] = s.label;
        for (std::size_t t = 0; t < c; ++t) {
            const auto mu = table.mu(s.indices[t]);
            out.mask[b * c + t] = s.indices[t] != pad;
            for (std::size_t i = 0; i < d; ++i) {
                out.x[(b * d + i) * c + t] = T(mu[i]);
            }
        }
    }
    return out;
}

/// Logits [N, classes] for all samples, computed in chunks.
inline tensor<float> predict_logits(const text_classifier<float>& model, const vce::embedding_table& table,
                                    const std::vector<text::encoded_sample>& samples, std::size_t chunk = 256) {
    const std::size_t k = model.shape().classes;
    tensor<float> out({samples.size(), k});
    std::vector<std::size_t> which;
    for (std::size_t start = 0; start < samples.size(); start += chunk) {
        which.clear();
        for (std::size_t i = start; i < std::min(samples.size(), start + chunk); ++i) {
            which.push_back(i);
        }
        const auto batch = embed<float>(table, samples, which);
        const auto logits = model.logits(batch.x);
        std::copy(logits.begin(), logits.end(), out.data() + start * k);
    }
    return out;
}

struct evaluation {
    double accuracy = 0;
    std::size_t correct = 0;
    std::size_t total = 0;
    std::vector<std::vector<std::size_t>> confusion;  ///< [true][predicted]

    nlohmann::json to_json() const {
        return {{"accuracy", accuracy}, {"correct", correct}, {"total", total}, {"confusion", confusion}};
    }
};

inline std::size_t argmax(std::span<const float> row) {
    return std::size_t(std::max_element(row.begin(), row.end()) - row.begin());
}

/// Argmax accuracy and confusion matrix over fixed-length samples.
inline evaluation evaluate_whole(const text_classifier<float>& model, const vce::embedding_table& table,
                                 const std::vector<text::encoded_sample>& samples) {
    const std::size_t k = model.shape().classes;
    evaluation ev;
    ev.confusion.assign(k, std::vector<std::size_t>(k, 0));
    const auto logits = predict_logits(model, table, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto pred = argmax(logits.sample(i));
        ++ev.confusion.at(samples[i].label).at(pred);
        ev.correct += pred == samples[i].label;
    }
    ev.total = samples.size();
    ev.accuracy = ev.total ? double(ev.correct) / double(ev.total) : 0.0;
    return ev;
}

struct sliding_result {
    std::size_t label = 0;                       ///< argmax of the mean probabilities
    std::vector<double> mean_probs;
    std::vector<std::vector<double>> window_probs;
};

/// Classifies a whole text from the mean softmax over every stride-1 window.
inline sliding_result evaluate_sliding(const text_classifier<float>& model, const vce::embedding_table& table,
                                       std::string_view utf8) {
    const auto windows = text::slide_all(utf8, 0, table.chars(), model.shape().window);
    const auto logits = predict_logits(model, table, windows);
    sliding_result r;
    r.mean_probs.assign(model.shape().classes, 0.0);
    for (std::size_t w = 0; w < windows.size(); ++w) {
        r.window_probs.push_back(softmax(logits.sample(w)));
        for (std::size_t j = 0; j < r.mean_probs.size(); ++j) {
            r.mean_probs[j] += r.window_probs.back()[j] / double(windows.size());
        }
    }
    r.label = std::size_t(std::max_element(r.mean_probs.begin(), r.mean_probs.end()) - r.mean_probs.begin());
    return r;
}

} // namespace gel::clcnn
