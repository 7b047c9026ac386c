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


#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gel/cli/pipeline.hpp"
#include "gel/core/png.hpp"
#include "gel/service/http.hpp"
#include "gel/text/utf8.hpp"
#include "gel/vce/model_io.hpp"
#include "gel/vce/traverse.hpp"

namespace fs = std::filesystem;
using namespace gel;

namespace {

enum exit_code { ok = 0, config_failure = 1, data_failure = 2, numerical_failure = 3 };

fs::path data_root() {
    const char* env = std::getenv("GEL_DATA_DIR");
    return env && *env ? fs::path(env) : fs::path("gel_data");
}

void require_file(const fs::path& p, const char* what) {
    if (p.empty()) {
        throw config_error(std::string(what) + ": no path given");
    }
    if (!fs::exists(p)) {
        throw data_error(std::string(what) + " not found: " + p.string());
    }
}

fs::path prepare_out(const fs::path& out, const cli::run_config& cfg, const nlohmann::json& args) {
    fs::create_directories(out);
    io::write_file(out / "config.json", nlohmann::json{{"config", cfg.to_json()}, {"args", args}}.dump(2) + "\n");
    return out;
}

void write_json(const fs::path& p, const nlohmann::json& j) { io::write_file(p, j.dump(2) + "\n"); }

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

text::corpus load_corpus(const std::string& root) {
    if (root.empty()) {
        throw config_error("no corpus root (corpus.root or --corpus)");
    }
    text::load_report rep;
    auto c = text::load_livedoor(root, &rep);
    spdlog::info("corpus: {} documents in {} categories, {} skipped", rep.total, c.categories.size(),
                 rep.skipped.size());
    return c;
}

text::corpus_split resolve_split(const text::corpus& c, const cli::run_config& cfg, const std::string& manifest) {
    if (manifest.empty()) {
        return text::split(c, cfg.corpus.split);
    }
    require_file(manifest, "split manifest");
    return text::split_from_manifest(c, nlohmann::json::parse(io::read_file(manifest)));
}

std::string mean_table(const std::vector<cli::classifier_report>& reps) {
    std::ostringstream os;
    os << fmt::format("{:<20}", "augmentation");
    for (const auto& r : reps.front().seeds) {
        os << fmt::format(" {:>6}", "seed" + std::to_string(r.seed));
    }
    os << fmt::format("  {:>6}\n", "mean");
    for (const auto& rep : reps) {
        const auto& a = rep.augmentation;
        const std::string kind = a.value("kind", "none");
        const std::string name = kind == "ssa"  ? fmt::format("ssa gamma={}", a["gamma"].get<double>())
                                 : kind == "wt" ? fmt::format("wt p={}", a["p"].get<double>())
                                                : "vanilla";
        os << fmt::format("{:<20}", name);
        for (const auto& r : rep.seeds) {
            os << fmt::format(" {:6.2f}", 100.0 * r.eval.accuracy);
        }
        os << fmt::format("  {:6.2f}\n", 100.0 * rep.mean_accuracy());
    }
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gel: glyph embeddings, augmentation and character-level classification"};
    app.require_subcommand(1);
    spdlog::set_default_logger(spdlog::stderr_color_mt("gel"));

    std::string config_path, out;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "RunConfig JSON");
        sub->add_option("--out", out, "output directory (default $GEL_DATA_DIR/<command>)");
    };

    // flag overrides; applied over the loaded config
    std::string font, glyphs, weights, table, clf, corpus_root, manifest, aug, axis, values, text_in, static_dir;
    std::optional<std::size_t> subset, steps, latent_dim, seeds, port, dim;
    std::optional<double> beta, gamma, p;
    std::optional<std::uint64_t> seed;
    std::string ch;
    double lo = -2.0, hi = 2.0;
    std::size_t n_steps = 9;
    bool all_dims = false;

    auto* render = app.add_subcommand("render", "rasterize the charset into a GLY1 dataset");
    add_common(render);
    render->add_option("--font", font, "TTF/OTF path");
    render->add_option("--subset", subset, "keep an evenly strided subset of this size");

    std::vector<CLI::App*> trainers;
    for (const char* name : {"train-vce", "train-cae"}) {
        auto* t = app.add_subcommand(name, std::string(name) == "train-vce" ? "train the glyph autoencoder"
                                                                             : "train the deterministic baseline");
        add_common(t);
        t->add_option("--glyphs", glyphs, "GLY1 dataset")->required();
        t->add_option("--beta", beta);
        t->add_option("--steps", steps);
        t->add_option("--seed", seed);
        t->add_option("--latent-dim", latent_dim);
        trainers.push_back(t);
    }

    auto* exp = app.add_subcommand("export-emb", "encode every glyph into an EMB1 table");
    add_common(exp);
    exp->add_option("--weights", weights)->required();
    exp->add_option("--glyphs", glyphs)->required();

    auto* trav = app.add_subcommand("traverse", "decode a character with one latent dimension swept");
    trav->add_option("--config", config_path);
    trav->add_option("--weights", weights)->required();
    trav->add_option("--table", table)->required();
    trav->add_option("--char", ch, "single character")->required();
    trav->add_option("--dim", dim);
    trav->add_option("--lo", lo);
    trav->add_option("--hi", hi);
    trav->add_option("--steps", n_steps);
    trav->add_flag("--all-dims", all_dims, "one row per latent dimension");
    trav->add_option("--out", out, "PNG path")->required();

    auto* tclf = app.add_subcommand("train-clf", "train and evaluate the text classifier");
    add_common(tclf);
    tclf->add_option("--table", table)->required();
    tclf->add_option("--corpus", corpus_root);
    tclf->add_option("--manifest", manifest, "reuse a split manifest");
    tclf->add_option("--aug", aug, "none, ssa, wt or a comma list");
    tclf->add_option("--gamma", gamma);
    tclf->add_option("--p", p);
    tclf->add_option("--seeds", seeds, "use seeds 1..N");

    auto* ev = app.add_subcommand("eval", "score a trained classifier");
    add_common(ev);
    ev->add_option("--clf", clf)->required();
    ev->add_option("--table", table)->required();
    ev->add_option("--corpus", corpus_root);
    ev->add_option("--manifest", manifest);
    ev->add_option("--text", text_in, "classify one text with sliding windows instead");

    auto* sweep = app.add_subcommand("sweep", "accuracy across beta or gamma values");
    add_common(sweep);
    sweep->add_option("--axis", axis)->required()->check(CLI::IsMember({"beta", "gamma"}));
    sweep->add_option("--values", values, "comma list (default per axis)");
    sweep->add_option("--glyphs", glyphs, "GLY1 dataset (beta axis)");
    sweep->add_option("--table", table, "EMB1 table (gamma axis)");
    sweep->add_option("--corpus", corpus_root);
    sweep->add_option("--manifest", manifest);
    sweep->add_option("--seeds", seeds);

    auto* serve = app.add_subcommand("serve", "HTTP explorer service");
    serve->add_option("--config", config_path);
    serve->add_option("--weights", weights)->required();
    serve->add_option("--table", table)->required();
    serve->add_option("--clf", clf);
    serve->add_option("--port", port);
    serve->add_option("--static", static_dir, "directory with the built UI");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_failure;
    }

    try {
        auto cfg = config_path.empty() ? cli::run_config{} : cli::load_config(config_path);
        if (!font.empty()) cfg.glyphset.font = font;
        if (subset) cfg.glyphset.subset = *subset;
        if (beta) cfg.vce.beta = *beta;
        if (steps) cfg.vce.steps = *steps;
        if (seed) cfg.vce.seed = *seed;
        if (latent_dim) cfg.vce.latent_dim = *latent_dim;
        if (!corpus_root.empty()) cfg.corpus.root = corpus_root;
        if (gamma) cfg.augment.gamma = *gamma;
        if (p) cfg.augment.p = *p;
        if (seeds) {
            if (*seeds < 1) {
                throw config_error("--seeds must be >= 1");
            }
            cfg.clcnn.seeds.clear();
            for (std::uint64_t s = 1; s <= *seeds; ++s) {
                cfg.clcnn.seeds.push_back(s);
            }
        }
        if (port) cfg.service.port = *port;
        if (!static_dir.empty()) cfg.service.static_dir = static_dir;
        const auto augs = aug.empty() ? std::vector<std::string>{cfg.augment.kind} : split_list(aug);
        for (const auto& a : augs) {
            cli::augment_section s = cfg.augment;
            s.kind = a;
            s.resolve();
        }
        cfg.validate();

        auto* sub = app.get_subcommands().front();
        const std::string cmd = sub->get_name();
        nlohmann::json args = nlohmann::json::object();
        for (const auto* opt : sub->get_options()) {
            if (opt->count() && opt->get_name() != "--help") {
                args[opt->get_name()] = opt->as<std::string>();
            }
        }
        const fs::path out_dir = out.empty() ? data_root() / cmd : fs::path(out);

        if (cmd == "render") {
            require_file(cfg.glyphset.font, "font");
            const auto ds = cli::render_glyphs(cfg);
            prepare_out(out_dir, cfg, args);
            glyphset::save_dataset(ds, out_dir / "glyphs.gly");
            spdlog::info("rendered {} glyphs ({} fallbacks) to {}", ds.size(), ds.fallbacks.size(),
                         (out_dir / "glyphs.gly").string());
        } else if (cmd == "train-vce" || cmd == "train-cae") {
            require_file(glyphs, "glyph dataset");
            const auto ds = glyphset::load_dataset(glyphs);
            prepare_out(out_dir, cfg, args);
            const bool cae = cmd == "train-cae";
            auto log = [](const vce::log_row& r) {
                spdlog::info("step {} total {:.3f} recon {:.3f} kl {:.3f}", r.step, r.total, r.recon, r.kl);
            };
            auto run = cae ? vce::train_cae(ds, cfg.vce, log) : vce::train_vce(ds, cfg.vce, log);
            vce::save_model(out_dir / "model.wts", run.model, ds.chars,
                            {{"config", cfg.vce.to_json()}, {"best_step", run.best_step}});
            io::write_file(out_dir / "train_log.csv",
                           vce::log_csv(run.log, cfg.vce.latent_dim, run.model.variational()));
            write_json(out_dir / "summary.json", {{"best_step", run.best_step}, {"best_loss", run.best_loss}});
        } else if (cmd == "export-emb") {
            require_file(weights, "weights");
            require_file(glyphs, "glyph dataset");
            const auto m = vce::load_model(weights);
            const auto ds = glyphset::load_dataset(glyphs);
            if (m.metadata.value("charset_sha256", "") != to_hex(ds.chars.hash())) {
                throw data_error("export-emb: weights were trained on a different charset than " + glyphs);
            }
            prepare_out(out_dir, cfg, args);
            const auto t = vce::export_embeddings(m.model, ds);
            vce::save_embeddings(t, out_dir / "embeddings.emb");
            write_json(out_dir / "stats.json", vce::statistics(t).to_json());
        } else if (cmd == "traverse") {
            require_file(weights, "weights");
            require_file(table, "embedding table");
            const auto m = vce::load_model(weights);
            const auto t = vce::load_embeddings(table);
            const auto cps = text::decode_utf8(ch);
            if (cps.size() != 1) {
                throw config_error("--char must be exactly one character");
            }
            std::vector<gray_image> tiles;
            std::vector<std::size_t> dims;
            if (all_dims) {
                for (std::size_t j = 0; j < m.model.latent_dim(); ++j) dims.push_back(j);
            } else {
                dims.push_back(dim.value_or(0));
            }
            for (auto j : dims) {
                for (auto& img : vce::to_gray_images(vce::traverse(m.model, t, cps[0], j, lo, hi, n_steps))) {
                    tiles.push_back(std::move(img));
                }
            }
            if (fs::path(out).has_parent_path()) {
                fs::create_directories(fs::path(out).parent_path());
            }
            io::write_file(out, encode_png(tile_images(tiles, n_steps)));
        } else if (cmd == "train-clf") {
            require_file(table, "embedding table");
            const auto t = vce::load_embeddings(table);
            const auto c = load_corpus(cfg.corpus.root);
            const auto s = resolve_split(c, cfg, manifest);
            prepare_out(out_dir, cfg, args);
            write_json(out_dir / "split_manifest.json", text::split_manifest(c, cfg.corpus.split, s));
            std::vector<cli::classifier_report> reps;
            nlohmann::json all = nlohmann::json::array();
            for (const auto& a : augs) {
                auto acfg = cfg;
                acfg.augment.kind = a;
                fs::create_directories(out_dir / a);
                reps.push_back(cli::run_classifier(acfg, t, c, s, out_dir / a));
                all.push_back(reps.back().to_json());
            }
            write_json(out_dir / "report.json", {{"categories", c.categories}, {"results", all}});
            std::cout << mean_table(reps);
        } else if (cmd == "eval") {
            require_file(clf, "classifier");
            require_file(table, "embedding table");
            const auto model = clcnn::load_classifier(clf);
            const auto t = vce::load_embeddings(table);
            if (model.metadata.value("charset_sha256", "") != to_hex(t.chars().hash())) {
                throw data_error("eval: classifier was trained with a different table charset");
            }
            if (!text_in.empty()) {
                const auto r = clcnn::evaluate_sliding(model.model, t, text_in);
                const auto cats = model.metadata.value("categories", std::vector<std::string>{});
                std::cout << nlohmann::json{{"label", r.label},
                                            {"category", r.label < cats.size() ? cats[r.label] : ""},
                                            {"probs", r.mean_probs},
                                            {"windows", r.window_probs.size()}}
                                 .dump(2)
                          << "\n";
            } else {
                const auto c = load_corpus(cfg.corpus.root);
                const auto s = resolve_split(c, cfg, manifest);
                const auto samples = cli::encode_docs(c, s.eval, t.chars(), model.model.shape().window,
                                                      cfg.corpus.field);
                const auto e = clcnn::evaluate_whole(model.model, t, samples);
                prepare_out(out_dir, cfg, args);
                write_json(out_dir / "eval.json", e.to_json());
                std::cout << fmt::format("eval accuracy {:.2f}% ({}/{})\n", 100.0 * e.accuracy, e.correct, e.total);
            }
        } else if (cmd == "sweep") {
            const bool is_beta = axis == "beta";
            std::vector<double> vals;
            for (const auto& v : values.empty() ? std::vector<std::string>{} : split_list(values)) {
                try {
                    vals.push_back(std::stod(v));
                } catch (const std::exception&) {
                    throw config_error("--values: not a number: " + v);
                }
            }
            if (vals.empty()) {
                vals = is_beta ? std::vector<double>{2, 4, 8, 16} : std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0};
            }
            std::optional<glyphset::glyph_dataset> ds;
            std::optional<vce::embedding_table> fixed;
            if (is_beta) {
                require_file(glyphs, "glyph dataset");
                ds = glyphset::load_dataset(glyphs);
            } else {
                require_file(table, "embedding table");
                fixed = vce::load_embeddings(table);
            }
            const auto c = load_corpus(cfg.corpus.root);
            const auto s = resolve_split(c, cfg, manifest);
            prepare_out(out_dir, cfg, args);
            write_json(out_dir / "split_manifest.json", text::split_manifest(c, cfg.corpus.split, s));
            std::ostringstream csv;
            csv << axis << ",seed,accuracy,mean\n";
            for (double v : vals) {
                auto vcfg = cfg;
                std::optional<vce::embedding_table> t = fixed;
                if (is_beta) {
                    vcfg.vce.beta = v;
                    vcfg.augment.kind = "none";
                    vcfg.validate();
                    const auto run = vce::train_vce(*ds, vcfg.vce);
                    t = vce::export_embeddings(run.model, *ds);
                } else {
                    vcfg.augment.kind = "ssa";
                    vcfg.augment.gamma = v;
                    vcfg.validate();
                }
                const auto rep = cli::run_classifier(vcfg, *t, c, s);
                for (const auto& r : rep.seeds) {
                    csv << v << "," << r.seed << "," << r.eval.accuracy << "," << rep.mean_accuracy() << "\n";
                }
            }
            io::write_file(out_dir / "sweep.csv", csv.str());
            std::cout << csv.str();
        } else if (cmd == "serve") {
            require_file(weights, "weights");
            require_file(table, "embedding table");
            auto m = vce::load_model(weights);
            auto t = vce::load_embeddings(table);
            std::optional<service::explorer::classifier> cl;
            std::string clf_hash;
            if (!clf.empty()) {
                require_file(clf, "classifier");
                auto lc = clcnn::load_classifier(clf);
                clf_hash = lc.metadata.value("charset_sha256", "");
                cl = service::explorer::classifier{std::move(lc.model),
                                                   lc.metadata.value("categories", std::vector<std::string>{})};
            }
            const service::explorer ex(std::move(m.model), m.metadata.value("charset_sha256", ""), std::move(t),
                                       std::move(cl), clf_hash);
            httplib::Server server;
            service::mount(server, ex, cfg.service.static_dir);
            spdlog::info("serving on http://{}:{}", cfg.service.host, cfg.service.port);
            if (!server.listen(cfg.service.host, int(cfg.service.port))) {
                throw config_error("serve: cannot listen on " + cfg.service.host + ":" +
                                   std::to_string(cfg.service.port));
            }
        }
        return ok;
    } catch (const config_error& e) {
        spdlog::error("{}", e.what());
        return config_failure;
    } catch (const numerical_error& e) {
        spdlog::error("{}", e.what());
        return numerical_failure;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return data_failure;
    }
}
