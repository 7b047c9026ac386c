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

#include <filesystem>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "gel/cli/run_config.hpp"
#include "gel/clcnn/evaluate.hpp"
#include "gel/clcnn/train.hpp"
#include "gel/text/livedoor.hpp"
#include "gel/vce/embedding.hpp"

namespace gel::cli {

inline glyphset::charset configured_charset(const run_config& cfg) {
    auto cs = glyphset::build_default_charset();
    return cfg.glyphset.subset ? glyphset::subset_charset(cs, cfg.glyphset.subset) : cs;
}

inline glyphset::glyph_dataset render_glyphs(const run_config& cfg) {
    if (cfg.glyphset.font.empty()) {
        throw config_error("render: no font given (glyphset.font or --font)");
    }
    return glyphset::rasterize_file(configured_charset(cfg), cfg.glyphset.font, cfg.render());
}

inline std::vector<text::encoded_sample> encode_docs(const text::corpus& c, const std::vector<std::size_t>& which,
                                                     const glyphset::charset& cs, std::size_t window,
                                                     const std::string& field) {
    std::vector<text::encoded_sample> out;
    out.reserve(which.size());
    for (auto i : which) {
        const auto& d = c.docs[i];
        out.push_back(text::encode_text(field == "body" ? d.body : d.title, d.label, cs, window));
    }
    return out;
}

struct seed_result {
    std::uint64_t seed = 0;
    clcnn::training_history history;
    clcnn::evaluation eval;

    nlohmann::json to_json() const {
        return {{"seed", seed}, {"history", history.to_json()}, {"eval", eval.to_json()}};
    }
};

/// One augmentation setting trained and evaluated once per seed.
struct classifier_report {
    nlohmann::json augmentation;
    std::vector<seed_result> seeds;

    double mean_accuracy() const {
        double s = 0;
        for (const auto& r : seeds) {
            s += r.eval.accuracy;
        }
        return seeds.empty() ? 0.0 : s / double(seeds.size());
    }

    nlohmann::json to_json() const {
        nlohmann::json per = nlohmann::json::array();
        for (const auto& r : seeds) {
            per.push_back(r.to_json());
        }
        return {{"augmentation", augmentation}, {"seeds", per}, {"mean_accuracy", mean_accuracy()}};
    }
};

/*!
 * \brief Trains a classifier per configured seed on the train split and scores the eval split.
 *
 * When out_dir is non-empty each seed's weights land in out_dir/seed_<s>.wts.
 */
inline classifier_report run_classifier(const run_config& cfg, const vce::embedding_table& table,
                                        const text::corpus& corpus, const text::corpus_split& split,
                                        const std::filesystem::path& out_dir = {}) {
    const auto& cs = table.chars();
    const auto train = encode_docs(corpus, split.train, cs, cfg.clcnn.window, cfg.corpus.field);
    const auto val = encode_docs(corpus, split.val, cs, cfg.clcnn.window, cfg.corpus.field);
    const auto eval = encode_docs(corpus, split.eval, cs, cfg.clcnn.window, cfg.corpus.field);
    classifier_report rep;
    rep.augmentation = augment::to_json(cfg.augment.resolve());
    for (auto seed : cfg.clcnn.seeds) {
        const auto ccfg = cfg.classifier(corpus.categories.size(), seed);
        auto run = clcnn::train_classifier(table, train, val, ccfg, [&](const clcnn::epoch_record& e) {
            spdlog::info("seed {} epoch {} loss {:.4f} val {:.4f}", seed, e.epoch, e.train_loss, e.val_accuracy);
        });
        seed_result r{seed, run.history, clcnn::evaluate_whole(run.model, table, eval)};
        spdlog::info("seed {} eval accuracy {:.4f} (best epoch {})", seed, r.eval.accuracy, r.history.best_epoch);
        if (!out_dir.empty()) {
            clcnn::save_classifier(out_dir / ("seed_" + std::to_string(seed) + ".wts"), run.model,
                                   {{"categories", corpus.categories},
                                    {"charset_sha256", to_hex(table.chars().hash())},
                                    {"config", ccfg.to_json()}});
        }
        rep.seeds.push_back(std::move(r));
    }
    return rep;
}

} // namespace gel::cli
