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

#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "gel/augment/augment.hpp"
#include "gel/clcnn/evaluate.hpp"
#include "gel/core/random.hpp"

namespace gel::clcnn {

struct classifier_config {
    std::size_t window = 80;
    std::size_t classes = 9;
    std::size_t channels = 512;
    double learning_rate = 1e-4;
    double weight_decay = 1e-4;
    std::size_t batch_size = 256;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;
    augment::augmentation augmentation = augment::no_augmentation{};
    std::uint64_t seed = 1;

    classifier_shape shape(std::size_t embed_dim) const { return {embed_dim, window, classes, channels}; }

    void validate() const {
        if (!(learning_rate > 0) || weight_decay < 0) {
            throw config_error("classifier: learning_rate must be > 0 and weight_decay >= 0");
        }
        if (batch_size < 1 || max_epochs < 1 || patience < 1) {
            throw config_error("classifier: batch_size, max_epochs and patience must be >= 1");
        }
        std::visit(
            [](const auto& a) {
                if constexpr (requires { a.validate(); }) {
                    a.validate();
                }
            },
            augmentation);
    }

    nlohmann::json to_json() const {
        return {{"window", window},
                {"classes", classes},
                {"channels", channels},
                {"learning_rate", learning_rate},
                {"weight_decay", weight_decay},
                {"batch_size", batch_size},
                {"max_epochs", max_epochs},
                {"patience", patience},
                {"augmentation", augment::to_json(augmentation)},
                {"seed", seed}};
    }
};

struct epoch_record {
    std::size_t epoch = 0;
    double train_loss = 0;
    double val_accuracy = 0;
};

struct training_history {
    std::vector<epoch_record> epochs;
    std::size_t best_epoch = 0;
    double best_val_accuracy = -1;
    bool early_stopped = false;
    nlohmann::json augmentation;

    nlohmann::json to_json() const {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& e : epochs) {
            rows.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_accuracy", e.val_accuracy}});
        }
        return {{"epochs", rows},
                {"best_epoch", best_epoch},
                {"best_val_accuracy", best_val_accuracy},
                {"early_stopped", early_stopped},
                {"augmentation", augmentation}};
    }
};

struct classifier_run {
    text_classifier<float> model;
    training_history history;
};

/*!
 * \brief Trains the classifier on frozen embeddings with Adam and early stopping.
 *
 * Each epoch shuffles the training samples, embeds them (pad -> 0), applies
 * the configured augmentation and minimizes mean cross-entropy. Training
 * stops after patience epochs without a better validation accuracy and the
 * best-validation parameters are restored.
 */
inline classifier_run train_classifier(const vce::embedding_table& table,
                                       const std::vector<text::encoded_sample>& train,
                                       const std::vector<text::encoded_sample>& val, const classifier_config& cfg,
                                       const std::function<void(const epoch_record&)>& on_epoch = {}) {
    cfg.validate();
    if (train.empty() || val.empty()) {
        throw data_error("train_classifier: training and validation sets must be non-empty");
    }
    classifier_run run{text_classifier<float>(cfg.shape(table.dim())), {}};
    auto& model = run.model;
    run.history.augmentation = augment::to_json(cfg.augmentation);
    model.params().init_he_uniform(derive_seed(cfg.seed, 0));
    std::mt19937_64 order_rng(derive_seed(cfg.seed, 1));
    std::mt19937_64 aug_rng(derive_seed(derive_seed(cfg.seed, 3), augment::augmentation_seed(cfg.augmentation)));
    const adam_options adam{.lr = cfg.learning_rate, .weight_decay = cfg.weight_decay};

    std::vector<std::size_t> order(train.size());
    std::vector<tensor<float>> best = model.params().snapshot();
    std::size_t since_best = 0;
    tensor<float> grad;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), order_rng);
        double loss_sum = 0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::span<const std::size_t> which(order.data() + start,
                                                     std::min(cfg.batch_size, order.size() - start));
            auto batch = embed<float>(table, train, which);
            augment::apply(cfg.augmentation, batch.x, batch.mask, aug_rng);
            model.params().zero_grad();
            const auto& logits = model.net().forward(batch.x);
            const double loss = cross_entropy(logits, batch.labels, &grad);
            const std::string where = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batches + 1);
            if (!std::isfinite(loss)) {
                throw numerical_error("train_classifier: non-finite loss at " + where);
            }
            model.net().backward(grad, nullptr);
            try {
                adam_step(model.params(), adam);
            } catch (const numerical_error& e) {
                throw numerical_error("train_classifier: " + where + ": " + e.what());
            }
            loss_sum += loss;
            ++batches;
        }
        const epoch_record rec{epoch, loss_sum / double(batches), evaluate_whole(model, table, val).accuracy};
        run.history.epochs.push_back(rec);
        if (on_epoch) {
            on_epoch(rec);
        }
        if (rec.val_accuracy > run.history.best_val_accuracy) {
            run.history.best_val_accuracy = rec.val_accuracy;
            run.history.best_epoch = epoch;
            best = model.params().snapshot();
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            run.history.early_stopped = true;
            break;
        }
    }
    model.params().restore(best);
    return run;
}

} // namespace gel::clcnn
