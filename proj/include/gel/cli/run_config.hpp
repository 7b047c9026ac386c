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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gel/augment/augment.hpp"
#include "gel/clcnn/train.hpp"
#include "gel/core/binary_io.hpp"
#include "gel/glyphset/rasterize.hpp"
#include "gel/service/explorer.hpp"
#include "gel/text/split.hpp"
#include "gel/vce/train.hpp"

namespace gel::cli {

struct glyphset_section {
    std::string font;
    std::size_t subset = 0;  ///< 0 keeps the full charset
    double em_pixels = 56.0;
    double min_coverage = 0.99;
};

struct augment_section {
    std::string kind = "none";  ///< none | ssa | wt
    double gamma = 2.0;
    double rate = 1.0;
    double p = 0.1;
    std::uint64_t seed = 0;

    augment::augmentation resolve() const {
        if (kind == "none") {
            return augment::no_augmentation{};
        }
        if (kind == "ssa") {
            return augment::ssa_config{gamma, rate, seed};
        }
        if (kind == "wt") {
            return augment::wt_config{p, seed};
        }
        throw config_error("augment.kind must be none, ssa or wt, got \"" + kind + "\"");
    }
};

struct corpus_section {
    std::string root;
    std::string field = "title";  ///< title | body
    text::split_spec split;
};

struct clcnn_section {
    std::size_t window = 80;
    std::size_t channels = 512;
    double learning_rate = 1e-4;
    double weight_decay = 1e-4;
    std::size_t batch_size = 256;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;
    std::vector<std::uint64_t> seeds{1, 2, 3};
};

struct service_section {
    std::string host = "127.0.0.1";
    std::size_t port = service::default_port;
    std::string static_dir;
};

/// Every knob of every stage. Loaded from JSON over the defaults; unknown keys are errors.
struct run_config {
    glyphset_section glyphset;
    vce::vce_config vce;
    augment_section augment;
    corpus_section corpus;
    clcnn_section clcnn;
    service_section service;

    void validate() const {
        if (glyphset.em_pixels <= 0 || !(glyphset.min_coverage >= 0 && glyphset.min_coverage <= 1)) {
            throw config_error("glyphset: em_pixels must be > 0 and min_coverage in [0, 1]");
        }
        vce.validate();
        // every kind, since --aug may switch to any of them
        augment::ssa_config{augment.gamma, augment.rate, augment.seed}.validate();
        augment::wt_config{augment.p, augment.seed}.validate();
        augment.resolve();
        if (corpus.field != "title" && corpus.field != "body") {
            throw config_error("corpus.field must be title or body, got \"" + corpus.field + "\"");
        }
        corpus.split.validate();
        if (clcnn.seeds.empty()) {
            throw config_error("clcnn.seeds must list at least one seed");
        }
        if (service.port < 1 || service.port > 65535) {
            throw config_error("service.port out of range: " + std::to_string(service.port));
        }
        classifier(2, clcnn.seeds[0]).validate();
        clcnn::classifier_shape{1, clcnn.window, 2, clcnn.channels}.validate();
    }

    clcnn::classifier_config classifier(std::size_t classes, std::uint64_t seed) const {
        clcnn::classifier_config c;
        c.window = clcnn.window;
        c.classes = classes;
        c.channels = clcnn.channels;
        c.learning_rate = clcnn.learning_rate;
        c.weight_decay = clcnn.weight_decay;
        c.batch_size = clcnn.batch_size;
        c.max_epochs = clcnn.max_epochs;
        c.patience = clcnn.patience;
        c.augmentation = augment.resolve();
        c.seed = seed;
        return c;
    }

    glyphset::render_config render() const { return {glyphset.em_pixels, glyphset.min_coverage}; }

    nlohmann::json to_json() const {
        return {{"glyphset",
                 {{"font", glyphset.font},
                  {"subset", glyphset.subset},
                  {"em_pixels", glyphset.em_pixels},
                  {"min_coverage", glyphset.min_coverage}}},
                {"vce", vce.to_json()},
                {"augment",
                 {{"kind", augment.kind},
                  {"gamma", augment.gamma},
                  {"rate", augment.rate},
                  {"p", augment.p},
                  {"seed", augment.seed}}},
                {"corpus",
                 {{"root", corpus.root},
                  {"field", corpus.field},
                  {"split_seed", corpus.split.seed},
                  {"train", corpus.split.train},
                  {"val", corpus.split.val},
                  {"eval", corpus.split.eval}}},
                {"clcnn",
                 {{"window", clcnn.window},
                  {"channels", clcnn.channels},
                  {"learning_rate", clcnn.learning_rate},
                  {"weight_decay", clcnn.weight_decay},
                  {"batch_size", clcnn.batch_size},
                  {"max_epochs", clcnn.max_epochs},
                  {"patience", clcnn.patience},
                  {"seeds", clcnn.seeds}}},
                {"service", {{"host", service.host}, {"port", service.port}, {"static_dir", service.static_dir}}}};
    }
};

namespace detail {

class section_reader {
public:
    section_reader(const nlohmann::json& root, std::string name) : name_(std::move(name)) {
        if (!root.contains(name_)) {
            return;
        }
        j_ = &root.at(name_);
        if (!j_->is_object()) {
            throw config_error(name_ + ": expected an object");
        }
    }

    template <typename T>
    void read(const char* key, T& dst) {
        seen_.insert(key);
        if (!j_ || !j_->contains(key)) {
            return;
        }
        const auto& v = j_->at(key);
        const std::string where = name_ + "." + key;
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                throw config_error(where + ": expected true or false");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_unsigned()) {
                throw config_error(where + ": expected a non-negative integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) {
                throw config_error(where + ": expected a number");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) {
                throw config_error(where + ": expected a string");
            }
        } else {
            if (!v.is_array() || std::any_of(v.begin(), v.end(), [](const auto& e) { return !e.is_number_unsigned(); })) {
                throw config_error(where + ": expected an array of non-negative integers");
            }
        }
        dst = v.template get<T>();
    }

    void finish() const {
        if (!j_) {
            return;
        }
        for (const auto& [k, _] : j_->items()) {
            if (!seen_.count(k)) {
                throw config_error("unknown config key " + name_ + "." + k);
            }
        }
    }

private:
    std::string name_;
    const nlohmann::json* j_ = nullptr;
    std::set<std::string> seen_;
};

} // namespace detail

inline run_config parse_config(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw config_error("config: expected a JSON object");
    }
    static const std::set<std::string> sections{"glyphset", "vce", "augment", "corpus", "clcnn", "service"};
    for (const auto& [k, _] : j.items()) {
        if (!sections.count(k)) {
            throw config_error("unknown config section \"" + k + "\"");
        }
    }
    run_config c;
    {
        detail::section_reader r(j, "glyphset");
        r.read("font", c.glyphset.font);
        r.read("subset", c.glyphset.subset);
        r.read("em_pixels", c.glyphset.em_pixels);
        r.read("min_coverage", c.glyphset.min_coverage);
        r.finish();
    }
    {
        detail::section_reader r(j, "vce");
        r.read("latent_dim", c.vce.latent_dim);
        r.read("beta", c.vce.beta);
        r.read("learning_rate", c.vce.learning_rate);
        r.read("batch_size", c.vce.batch_size);
        r.read("steps", c.vce.steps);
        r.read("seed", c.vce.seed);
        r.read("log_every", c.vce.log_every);
        r.read("variational", c.vce.variational);
        r.finish();
    }
    {
        detail::section_reader r(j, "augment");
        r.read("kind", c.augment.kind);
        r.read("gamma", c.augment.gamma);
        r.read("rate", c.augment.rate);
        r.read("p", c.augment.p);
        r.read("seed", c.augment.seed);
        r.finish();
    }
    {
        detail::section_reader r(j, "corpus");
        r.read("root", c.corpus.root);
        r.read("field", c.corpus.field);
        r.read("split_seed", c.corpus.split.seed);
        r.read("train", c.corpus.split.train);
        r.read("val", c.corpus.split.val);
        r.read("eval", c.corpus.split.eval);
        r.finish();
    }
    {
        detail::section_reader r(j, "clcnn");
        r.read("window", c.clcnn.window);
        r.read("channels", c.clcnn.channels);
        r.read("learning_rate", c.clcnn.learning_rate);
        r.read("weight_decay", c.clcnn.weight_decay);
        r.read("batch_size", c.clcnn.batch_size);
        r.read("max_epochs", c.clcnn.max_epochs);
        r.read("patience", c.clcnn.patience);
        r.read("seeds", c.clcnn.seeds);
        r.finish();
    }
    {
        detail::section_reader r(j, "service");
        r.read("host", c.service.host);
        r.read("port", c.service.port);
        r.read("static_dir", c.service.static_dir);
        r.finish();
    }
    c.validate();
    return c;
}

inline run_config load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw config_error("config file not found: " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

} // namespace gel::cli
