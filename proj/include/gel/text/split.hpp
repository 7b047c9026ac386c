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
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "gel/core/random.hpp"
#include "gel/text/livedoor.hpp"

namespace gel::text {

struct split_spec {
    std::uint64_t seed = 1;
    double train = 0.72;
    double val = 0.08;
    double eval = 0.20;

    void validate() const {
        if (train < 0 || val < 0 || eval < 0 || std::abs(train + val + eval - 1.0) > 1e-9) {
            throw config_error("split: fractions must be nonnegative and sum to 1");
        }
    }
};

/// Document indices per split, each list ascending.
struct corpus_split {
    std::vector<std::size_t> train, val, eval;
};

/// Stratified split: per category, round(eval*n) documents to eval, round(val*n) to val, the rest to train.
inline corpus_split split(const corpus& c, const split_spec& spec) {
    spec.validate();
    if (c.docs.empty()) {
        throw data_error("split: corpus is empty");
    }
    std::vector<std::vector<std::size_t>> by_label(c.categories.size());
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
        by_label[c.docs[i].label].push_back(i);
    }
    std::mt19937_64 rng(derive_seed(spec.seed, 0));
    corpus_split out;
    for (std::size_t label = 0; label < by_label.size(); ++label) {
        auto& idx = by_label[label];
        if (idx.size() < 5) {
            throw data_error("split: category '" + c.categories[label] + "' has " + std::to_string(idx.size()) +
                             " documents; at least 5 are needed to stratify");
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n = double(idx.size());
        const auto n_eval = std::size_t(std::lround(spec.eval * n));
        const auto n_val = std::size_t(std::lround(spec.val * n));
        out.eval.insert(out.eval.end(), idx.begin(), idx.begin() + n_eval);
        out.val.insert(out.val.end(), idx.begin() + n_eval, idx.begin() + n_eval + n_val);
        out.train.insert(out.train.end(), idx.begin() + n_eval + n_val, idx.end());
    }
    for (auto* v : {&out.train, &out.val, &out.eval}) {
        std::sort(v->begin(), v->end());
    }
    return out;
}

/// Replayable manifest: seed, fractions and document ids per split.
inline nlohmann::json split_manifest(const corpus& c, const split_spec& spec, const corpus_split& s) {
    auto ids = [&](const std::vector<std::size_t>& v) {
        std::vector<std::string> out;
        for (auto i : v) {
            out.push_back(c.docs[i].id);
        }
        return out;
    };
    return {{"seed", spec.seed},
            {"fractions", {{"train", spec.train}, {"val", spec.val}, {"eval", spec.eval}}},
            {"train", ids(s.train)},
            {"val", ids(s.val)},
            {"eval", ids(s.eval)}};
}

/// Rebuilds a split from a manifest; every id must exist in the corpus and appear once.
inline corpus_split split_from_manifest(const corpus& c, const nlohmann::json& m) {
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
        by_id[c.docs[i].id] = i;
    }
    std::vector<bool> seen(c.docs.size(), false);
    corpus_split out;
    auto load = [&](const char* key, std::vector<std::size_t>& dst) {
        if (!m.contains(key) || !m[key].is_array()) {
            throw data_error(std::string("split manifest: missing array '") + key + "'");
        }
        for (const auto& id : m[key]) {
            const auto it = by_id.find(id.get<std::string>());
            if (it == by_id.end()) {
                throw data_error("split manifest: unknown document " + id.get<std::string>());
            }
            if (seen[it->second]) {
                throw data_error("split manifest: document " + it->first + " listed twice");
            }
            seen[it->second] = true;
            dst.push_back(it->second);
        }
        std::sort(dst.begin(), dst.end());
    };
    load("train", out.train);
    load("val", out.val);
    load("eval", out.eval);
    return out;
}

} // namespace gel::text
