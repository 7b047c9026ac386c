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


// One process per criterion: `gel_acceptance <n>` prints a single verdict
// line and exits 0 on PASS, 1 on FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <thread>

#include <spdlog/spdlog.h>

#include "../support/stats.hpp"
#include "../unit/test_util.hpp"
#include "gel/augment/augment.hpp"
#include "gel/cli/pipeline.hpp"
#include "gel/clcnn/model.hpp"
#include "gel/core/loss.hpp"
#include "gel/service/http.hpp"
#include "gel/vce/objective.hpp"

using namespace gel;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

struct verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

fs::path font_path() {
    if (const char* env = std::getenv("GEL_FONT"); env && *env) {
        return env;
    }
    return GEL_TEST_FONT;
}

std::string livedoor_dir() {
    if (const char* env = std::getenv("GEL_LIVEDOOR_DIR"); env && *env) {
        return env;
    }
    return GEL_LIVEDOOR_DIR;
}

std::string fmt_list(const std::vector<double>& v, int prec = 3) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + fmt::format("{:.{}f}", v[i], prec);
    }
    return s + "]";
}

void fill_biases(param_store<double>& store, double v) {
    for (auto& p : store) {
        if (p->fan_in == 0) {
            for (auto& x : p->value) {
                x = v;
            }
        }
    }
}

// ---------------------------------------------------------------- 1

verdict gradient_oracle() {
    const auto t0 = clock_type::now();
    std::vector<std::string> bad;
    double worst_op = 0, worst_net = 0, raw_op = 0, raw_net = 0;
    auto raw = [](const grad_check_report& r) {
        double m = 0;
        for (const auto& g : r.groups) m = std::max(m, g.max_raw_error);
        return m;
    };
    auto op = [&](const std::string& name, const grad_check_report& r) {
        worst_op = std::max(worst_op, r.max_rel_error());
        raw_op = std::max(raw_op, raw(r));
        if (!(r.max_rel_error() < 1e-5) || r.checked() < 0.9 * double(r.checked() + r.skipped())) {
            bad.push_back(fmt::format("{} {:.2e}", name, r.max_rel_error()));
        }
    };
    auto layer_check = [&](const std::string& name, auto make, shape_t in, std::uint64_t seed) {
        param_store<double> store;
        auto l = make(store);
        op(name, test::check_layer(l, store, test::random_tensor<double>(std::move(in), seed), seed + 100));
    };
    layer_check("conv2d", [](auto& s) { return conv2d<double>(s, "c", 2, 3, 4, 2, 1); }, {2, 2, 6, 6}, 1);
    layer_check("deconv2d", [](auto& s) { return deconv2d<double>(s, "d", 2, 3, 4, 2, 1); }, {2, 2, 3, 3}, 2);
    layer_check("conv1d", [](auto& s) { return conv1d<double>(s, "c", 3, 4, 3); }, {3, 3, 9}, 3);
    layer_check("maxpool1d", [](auto&) { return maxpool1d<double>("p", 3, 3); }, {2, 3, 13}, 4);
    layer_check("linear", [](auto& s) { return linear<double>(s, "fc", 12, 5); }, {4, 3, 4}, 5);
    layer_check("relu", [](auto&) { return relu<double>("r"); }, {3, 4, 5}, 6);
    layer_check("sigmoid", [](auto&) { return sigmoid<double>("s"); }, {3, 4, 5}, 7);
    layer_check("reshape", [](auto&) { return reshape<double>("v", {2, 10}); }, {3, 4, 5}, 8);
    {
        auto x = test::random_tensor<double>({4, 5}, 9, -3, 3);
        const std::vector<std::size_t> labels{0, 4, 2, 2};
        tensor<double> g;
        cross_entropy(x, labels, &g);
        const std::vector<grad_probe> probes{{"logits", x.values(), g.values()}};
        op("cross_entropy", grad_check(probes, [&] { return cross_entropy(x, labels); }));
    }

    auto net = [&](const std::string& name, const grad_check_report& r) {
        worst_net = std::max(worst_net, r.max_rel_error());
        raw_net = std::max(raw_net, raw(r));
        for (const auto& g : r.groups) {
            if (!(g.max_rel_error < 1e-4)) {
                bad.push_back(fmt::format("{}:{} {:.2e}", name, g.name, g.max_rel_error));
            }
        }
        if (r.checked() < 0.9 * double(r.checked() + r.skipped())) {
            bad.push_back(name + ": too many kink skips");
        }
    };
    for (bool variational : {true, false}) {
        vce::autoencoder_shape s;
        s.latent_dim = 3;
        s.variational = variational;
        s.channels = {2, 2, 3, 3};
        s.hidden = 6;
        s.image_side = 16;
        vce::glyph_autoencoder<double> m(s);
        m.params().init_he_uniform(22);
        fill_biases(m.params(), 0.05);
        const auto x = test::random_tensor<double>({3, 1, 16, 16}, 22, 0.0, 1.0);
        const auto noise = test::random_tensor<double>({3, 3}, 23, -1.0, 1.0);
        const double beta = variational ? 4.0 : 0.0;
        m.params().zero_grad();
        vce::negative_elbo(m, x, noise, beta);
        net(variational ? "vce" : "cae", grad_check(parameter_probes(m.params()), [&] {
                return vce::negative_elbo(m, x, noise, beta, false).total;
            }));
    }
    {
        clcnn::text_classifier<double> m(clcnn::classifier_shape{3, 53, 4, 8});
        m.params().init_he_uniform(31);
        fill_biases(m.params(), 0.05);
        const auto x = test::random_tensor<double>({3, 3, 53}, 32);
        const std::vector<std::size_t> labels{0, 3, 1};
        tensor<double> g;
        m.params().zero_grad();
        cross_entropy(m.net().forward(x), labels, &g);
        m.net().backward(g, nullptr);
        net("clcnn", grad_check(parameter_probes(m.params()), [&] { return cross_entropy(m.logits(x), labels); }));
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 120) {
        bad.push_back(fmt::format("took {:.1f}s", elapsed));
    }
    std::string detail = fmt::format("ops max rel {:.2e} (< 1e-5, raw {:.1e}), nets max rel {:.2e} (< 1e-4, raw "
                                     "{:.1e}), {:.1f}s (< 120s)",
                                     worst_op, raw_op, worst_net, raw_net, elapsed);
    for (const auto& b : bad) {
        detail += "; " + b;
    }
    return {bad.empty(), detail};
}

// ---------------------------------------------------------------- 2

verdict shape_oracle() {
    vce::glyph_autoencoder<float> m;
    std::vector<std::size_t> enc, dec;
    for (const auto& s : m.encoder().shapes()) {
        if (s.size() == 3 && (enc.empty() || enc.back() != s[1])) {
            enc.push_back(s[1]);
        }
    }
    for (const auto& s : m.decoder().shapes()) {
        if (s.size() == 3 && (dec.empty() || dec.back() != s[1])) {
            dec.push_back(s[1]);
        }
    }
    const auto c128 = clcnn::classifier_shape{10, 128, 9, 512}.length_chain();
    const auto c80 = clcnn::classifier_shape{10, 80, 9, 512}.length_chain();
    const bool ok = enc == std::vector<std::size_t>{64, 32, 16, 8, 4} && dec == std::vector<std::size_t>{4, 8, 16, 32, 64} &&
                    c128 == std::vector<std::size_t>{128, 126, 42, 40, 13, 11, 9} &&
                    c80 == std::vector<std::size_t>{80, 78, 26, 24, 8, 6, 4} &&
                    m.decoder().output_shape() == shape_t{1, 64, 64};
    auto str = [](const std::vector<std::size_t>& v) { return fmt::format("{}", fmt::join(v, ">")); };
    return {ok, "encoder " + str(enc) + ", decoder " + str(dec) + ", clcnn " + str(c128) + " and " + str(c80)};
}

// ---------------------------------------------------------------- 3

verdict kl_oracle() {
    std::mt19937_64 rng(2026);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ls(-1.0, 1.0);
    double worst = 0;
    constexpr std::size_t d = 10, n = 100000;
    for (int pair = 0; pair < 100; ++pair) {
        vce::latent_code c;
        for (std::size_t j = 0; j < d; ++j) {
            c.mu.push_back(nd(rng));
            c.sigma.push_back(std::exp(ls(rng)));
        }
        double acc = 0;
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t j = 0; j < d; ++j) {
                const double e = nd(rng), z = c.mu[j] + c.sigma[j] * e;
                // log q(z) - log p(z)
                acc += -std::log(c.sigma[j]) - 0.5 * e * e + 0.5 * z * z;
            }
        }
        const double exact = vce::kl_divergence(c);
        worst = std::max(worst, std::abs(acc / double(n) - exact) / exact);
    }
    const double zero = vce::kl_divergence({std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)});
    return {worst < 0.01 && zero == 0.0,
            fmt::format("100 pairs (d'=10), 1e5 samples each: max rel dev {:.4f} (< 0.01); KL(0,1) = {}", worst, zero)};
}

// ---------------------------------------------------------------- 4

verdict ssa_contract() {
    std::vector<std::string> bad;
    constexpr std::size_t d = 10, len = 100, n = 1000;  // 1e5 positions
    const double gamma = 2.0;
    auto base = test::random_tensor<float>({n, d, len}, 5, -2, 2);
    const std::vector<std::uint8_t> mask(n * len, 1);
    {
        auto x = base;
        x[3] = -0.0f;
        const auto before = x;
        std::mt19937_64 rng(1);
        augment::ssa(x, mask, augment::ssa_config{0.0, 1.0, 0}, rng);
        if (std::memcmp(x.data(), before.data(), x.size() * sizeof(float)) != 0) {
            bad.push_back("gamma=0 changed bytes");
        }
    }
    auto x = base;
    std::mt19937_64 rng(2026);
    const auto draws = augment::ssa(x, mask, augment::ssa_config{gamma, 1.0, 0}, rng);
    std::size_t multi = 0, over = 0;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t t = 0; t < len; ++t) {
            std::size_t changed = 0;
            for (std::size_t j = 0; j < d; ++j) {
                const std::size_t i = (b * d + j) * len + t;
                if (x[i] != base[i]) {
                    ++changed;
                    over += std::abs(double(x[i]) - double(base[i])) > gamma;
                }
            }
            multi += changed > 1;
        }
    }
    if (multi || over) {
        bad.push_back(fmt::format("{} positions with >1 change, {} with |delta| > gamma", multi, over));
    }
    std::vector<double> us;
    std::vector<std::size_t> counts(d, 0);
    for (const auto& dr : draws) {
        us.push_back(dr.u);
        ++counts[dr.dim];
    }
    const double ks = test::ks_uniform(us, -gamma, gamma);
    const double chi = test::chi_square_uniform(counts);
    if (draws.size() != n * len) {
        bad.push_back(fmt::format("{} draws for {} positions", draws.size(), n * len));
    }
    if (!(ks < test::ks_critical_1e5)) {
        bad.push_back("u not uniform");
    }
    if (!(chi < test::chi2_critical_df9)) {
        bad.push_back("dim not uniform");
    }
    std::string detail = fmt::format("gamma=0 identity, <=1 coord and |delta|<=gamma over 1e5 positions; "
                                     "KS D={:.5f} (< {}), chi2={:.2f} (< {})",
                                     ks, test::ks_critical_1e5, chi, test::chi2_critical_df9);
    for (const auto& b : bad) {
        detail += "; " + b;
    }
    return {bad.empty(), detail};
}

// ---------------------------------------------------------------- 5

// Mean per-pixel BCE of the 200-glyph, beta=8 run measured at step 3000 of the
// pilot (566.1 per 64x64 glyph = 0.1382); a finished 5000-step run must beat it.
constexpr double pilot_bce_per_pixel = 0.14;

verdict desk_training() {
    const auto t0 = clock_type::now();
    const auto ds = glyphset::rasterize_file(glyphset::subset_charset(glyphset::build_default_charset(), 200),
                                             font_path());
    vce::vce_config cfg;
    cfg.beta = 8;
    cfg.steps = 5000;
    auto run = vce::train_vce(ds, cfg, [&](const vce::log_row& r) {
        if (r.step % 500 == 0) {
            spdlog::info("step {} recon {:.2f} kl {:.2f} {:.0f}s", r.step, r.recon, r.kl, seconds_since(t0));
        }
    });
    const auto table = vce::export_embeddings(run.model, ds);
    const double elapsed = seconds_since(t0);
    const auto st = vce::statistics(table);
    double recon = 0;
    for (const auto& r : run.log) {
        if (r.step == run.best_step) {
            recon = r.recon / double(glyphset::glyph_pixels);
        }
    }
    const auto active = st.active_dims();
    std::vector<double> means, sds;
    bool stats_ok = true;
    for (auto j : active) {
        means.push_back(st.mean[j]);
        sds.push_back(st.stddev[j]);
        stats_ok = stats_ok && std::abs(st.mean[j]) <= 0.3 && st.stddev[j] >= 0.2 && st.stddev[j] <= 1.5;
    }
    const bool ok = elapsed <= 900 && recon < pilot_bce_per_pixel && active.size() >= 2 && stats_ok;
    return {ok, fmt::format("{:.0f}s (<= 900s), BCE/pixel {:.4f} (< {}), {} active dims (>= 2), "
                            "active means {} (|m| <= 0.3), stds {} (in [0.2, 1.5])",
                            elapsed, recon, pilot_bce_per_pixel, active.size(), fmt_list(means), fmt_list(sds))};
}

// ---------------------------------------------------------------- 6

constexpr std::size_t beta_sweep_steps = 1000;

verdict beta_monotone() {
    const auto ds = glyphset::rasterize_file(glyphset::subset_charset(glyphset::build_default_charset(), 200),
                                             font_path());
    std::vector<double> kls;
    for (double beta : {1.0, 4.0, 8.0, 16.0}) {
        vce::vce_config cfg;
        cfg.beta = beta;
        cfg.steps = beta_sweep_steps;
        cfg.seed = 1;
        const auto run = vce::train_vce(ds, cfg);
        kls.push_back(vce::statistics(vce::export_embeddings(run.model, ds)).total_kl);
        spdlog::info("beta {} total KL {:.4f}", beta, kls.back());
    }
    const bool ok = std::is_sorted(kls.rbegin(), kls.rend());
    return {ok, fmt::format("total mean KL at beta 1,4,8,16 ({} steps, seed 1): {} non-increasing", beta_sweep_steps,
                            fmt_list(kls, 4))};
}

// ---------------------------------------------------------------- 7

verdict livedoor_reproduction() {
    const auto root = livedoor_dir();
    if (root.empty() || !fs::is_directory(root)) {
        return {false, "livedoor corpus not available (set GEL_LIVEDOOR_DIR); not run"};
    }
    cli::run_config cfg;
    cfg.glyphset.font = font_path();
    const auto corpus = text::load_livedoor(root);
    const auto split = text::split(corpus, cfg.corpus.split);
    const auto ds = cli::render_glyphs(cfg);
    const auto vrun = vce::train_vce(ds, cfg.vce, [](const vce::log_row& r) {
        if (r.step % 1000 == 0) {
            spdlog::info("vce step {} recon {:.2f} kl {:.2f}", r.step, r.recon, r.kl);
        }
    });
    const auto table = vce::export_embeddings(vrun.model, ds);
    std::map<std::string, double> mean;
    for (const char* kind : {"none", "ssa", "wt"}) {
        auto c = cfg;
        c.augment.kind = kind;
        mean[kind] = 100.0 * cli::run_classifier(c, table, corpus, split).mean_accuracy();
    }
    const bool ok = std::abs(mean["none"] - 67.16) <= 5.0 && mean["ssa"] >= mean["none"] &&
                    std::abs(mean["ssa"] - 69.05) <= 5.0;
    return {ok, fmt::format("mean eval accuracy over 3 seeds: vanilla {:.2f} (67.16 +- 5), ssa {:.2f} "
                            "(69.05 +- 5, >= vanilla), wt {:.2f}",
                            mean["none"], mean["ssa"], mean["wt"])};
}

// ---------------------------------------------------------------- 8

void write_toy_corpus(const fs::path& root) {
    const std::vector<std::pair<std::string, std::string>> cats{
        {"kaden", "新型の家電が発売された"}, {"sports", "試合で選手が勝利した"}, {"movie", "映画の公開日が決定"}};
    for (const auto& [cat, stem] : cats) {
        fs::create_directories(root / cat);
        for (int i = 0; i < 15; ++i) {
            std::ofstream(root / cat / fmt::format("{}-{}.txt", cat, i))
                << "http://example.invalid/" << i << "\n2026-01-01T00:00:00+0900\n"
                << stem << i << "号\n本文" << i << "\n";
        }
    }
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), root).string()] = io::read_file(e.path());
        }
    }
    return out;
}

verdict determinism() {
    const test::temp_dir tmp("determinism");
    write_toy_corpus(tmp.path / "corpus");
    const auto cfg = tmp.path / "config.json";
    io::write_file(cfg, nlohmann::json{{"glyphset", {{"font", font_path().string()}, {"subset", 24}}},
                                       {"vce", {{"steps", 30}, {"batch_size", 8}, {"log_every", 10}, {"seed", 5}}},
                                       {"corpus", {{"root", (tmp.path / "corpus").string()}, {"split_seed", 3}}},
                                       {"clcnn",
                                        {{"window", 53},
                                         {"channels", 8},
                                         {"batch_size", 16},
                                         {"max_epochs", 3},
                                         {"patience", 3},
                                         {"learning_rate", 3e-3},
                                         {"seeds", {1, 2}}}}}
                                .dump());
    const std::string gel = GEL_CLI_PATH;
    const std::vector<std::string> commands{
        "render --config {c}",
        "train-vce --config {c} --glyphs {d}/render/glyphs.gly",
        "train-cae --config {c} --glyphs {d}/render/glyphs.gly",
        "export-emb --config {c} --weights {d}/train-vce/model.wts --glyphs {d}/render/glyphs.gly",
        "traverse --weights {d}/train-vce/model.wts --table {d}/export-emb/embeddings.emb --char 〓 --all-dims "
        "--out {d}/traverse/grid.png",
        "train-clf --config {c} --table {d}/export-emb/embeddings.emb --aug none,ssa,wt",
        "eval --config {c} --clf {d}/train-clf/ssa/seed_1.wts --table {d}/export-emb/embeddings.emb",
        "sweep --config {c} --axis gamma --values 1,2 --table {d}/export-emb/embeddings.emb",
    };
    std::vector<std::map<std::string, std::string>> runs;
    const auto dir = tmp.path / "data";
    for (int run = 0; run < 2; ++run) {
        fs::remove_all(dir);
        for (const auto& cmd : commands) {
            std::string line = cmd;
            for (std::size_t pos; (pos = line.find("{c}")) != std::string::npos;) line.replace(pos, 3, cfg.string());
            for (std::size_t pos; (pos = line.find("{d}")) != std::string::npos;) line.replace(pos, 3, dir.string());
            const std::string full = "GEL_DATA_DIR=" + dir.string() + " " + gel + " " + line + " >/dev/null 2>&1";
            if (std::system(full.c_str()) != 0) {
                return {false, "command failed: gel " + line.substr(0, line.find(' '))};
            }
        }
        runs.push_back(snapshot(dir));
    }
    std::vector<std::string> differ;
    for (const auto& [name, bytes] : runs[0]) {
        auto it = runs[1].find(name);
        if (it == runs[1].end() || it->second != bytes) {
            differ.push_back(name);
        }
    }
    const bool ok = differ.empty() && runs[0].size() == runs[1].size() && runs[0].size() > 10;
    std::string detail =
        fmt::format("{} commands run twice with identical config and seeds: {} files, {} differ", commands.size(),
                    runs[0].size(), differ.size());
    for (const auto& d : differ) {
        detail += " " + d;
    }
    return {ok, detail};
}

// ---------------------------------------------------------------- 9

verdict corpus_check() {
    const auto root = livedoor_dir();
    if (root.empty() || !fs::is_directory(root)) {
        return {false, "livedoor corpus not available (set GEL_LIVEDOOR_DIR); not run"};
    }
    text::load_report rep;
    const auto c = text::load_livedoor(root, &rep);
    const auto count = [&](const std::string& cat) {
        auto it = rep.per_category.find(cat);
        return it == rep.per_category.end() ? std::size_t{0} : it->second;
    };
    const auto s = text::split(c, {});
    std::vector<std::size_t> all;
    for (auto* v : {&s.train, &s.val, &s.eval}) {
        all.insert(all.end(), v->begin(), v->end());
    }
    std::sort(all.begin(), all.end());
    const bool disjoint = std::adjacent_find(all.begin(), all.end()) == all.end() && all.size() == c.docs.size();
    bool stratified = true;
    for (std::size_t label = 0; label < c.categories.size(); ++label) {
        const auto n = std::size_t(std::count_if(c.docs.begin(), c.docs.end(), [&](auto& d) { return d.label == label; }));
        const auto ev = std::size_t(std::count_if(s.eval.begin(), s.eval.end(), [&](auto i) { return c.docs[i].label == label; }));
        stratified = stratified && ev == std::size_t(std::lround(0.20 * double(n)));
    }
    const auto replay = text::split_from_manifest(c, text::split_manifest(c, {}, s));
    const bool replayed = replay.train == s.train && replay.val == s.val && replay.eval == s.eval;
    const bool ok = rep.total == 7367 && count("movie-enter") == 870 && count("sports-watch") == 900 && disjoint &&
                    stratified && replayed;
    return {ok, fmt::format("{} documents (7367), movie-enter {} (870), sports-watch {} (900), eval {}; "
                            "disjoint {}, stratified {}, manifest replay {}",
                            rep.total, count("movie-enter"), count("sports-watch"), s.eval.size(), disjoint,
                            stratified, replayed)};
}

// ---------------------------------------------------------------- 10

verdict service_check() {
    const auto cs = glyphset::build_default_charset();
    std::mt19937_64 rng(10);
    std::normal_distribution<float> nd;
    std::vector<float> mu(cs.size() * 10), sigma(cs.size() * 10);
    for (auto& v : mu) v = nd(rng);
    for (auto& v : sigma) v = 0.3f + 0.1f * std::abs(nd(rng));
    vce::embedding_table table(cs, 10, mu, sigma);
    vce::glyph_autoencoder<float> model;
    model.params().init_he_uniform(3);
    const auto hash = to_hex(cs.hash());
    clcnn::text_classifier<float> clf(clcnn::classifier_shape{10, 80, 9, 512});
    clf.params().init_he_uniform(4);
    const service::explorer ex(std::move(model), hash, table,
                               service::explorer::classifier{std::move(clf), std::vector<std::string>(9, "c")}, hash);
    std::vector<std::string> bad;

    httplib::Server server;
    service::mount(server, ex);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client http("127.0.0.1", port);
    std::uniform_real_distribution<double> uz(-3, 3);
    std::vector<double> ms;
    for (int i = 0; i < 210; ++i) {
        std::vector<double> z(10);
        for (auto& v : z) v = uz(rng);
        const auto t0 = clock_type::now();
        const auto r = http.Post("/api/decode", nlohmann::json{{"z", z}}.dump(), "application/json");
        const double t = 1000.0 * seconds_since(t0);
        if (!r || r->status != 200 || r->body.substr(1, 3) != "PNG") {
            bad.push_back("decode request failed");
            break;
        }
        if (i >= 10) {
            ms.push_back(t);
        }
    }
    std::sort(ms.begin(), ms.end());
    const double p95 = ms.empty() ? 1e9 : ms[std::size_t(0.95 * double(ms.size()))];
    auto status = [&](const char* path, const std::string& body = {}) {
        const auto r = body.empty() ? http.Get(path) : http.Post(path, body, "application/json");
        return r ? r->status : -1;
    };
    const std::vector<std::tuple<const char*, std::string, int>> cases{
        {"/api/info", "", 200},
        {"/api/chars?query=%E8%BF%AB", "", 200},
        {"/api/chars?page_size=0", "", 400},
        {"/api/embedding/%E8%BF%AB", "", 200},
        {"/api/embedding/%F0%9F%98%80", "", 404},
        {"/api/embedding/ab", "", 400},
        {"/api/decode", R"({"z":[0,0,0]})", 400},
        {"/api/decode", R"({"z":[0,0,0,0,0,0,0,0,0,"x"]})", 400},
        {"/api/decode", "not json", 400},
        {"/api/neighbors", R"({"z":[0,0,0,0,0,0,0,0,0,0],"k":-1})", 400},
        {"/api/neighbors", R"({"z":[0,0,0,0,0,0,0,0,0,0],"k":0})", 200},
        {"/api/ssa_preview", R"({"char":"迫","dim":0,"u":4.5})", 400},
        {"/api/ssa_preview", R"({"char":"迫","dim":10,"u":1})", 400},
        {"/api/ssa_preview", R"({"char":"迫","dim":2,"u":1.5})", 200},
        {"/api/classify", R"({"text":""})", 400},
        {"/api/classify", R"({"text":"今日の試合"})", 200},
    };
    std::size_t case_fail = 0;
    for (const auto& [path, body, want] : cases) {
        const int got = status(path, body);
        if (got != want) {
            ++case_fail;
            bad.push_back(fmt::format("{} -> {} (want {})", path, got, want));
        }
    }
    {
        const auto r0 = ex.ssa_preview(R"({"char":"迫","dim":1,"u":0})");
        const auto m = table.mu(*cs.index_of(U'迫'));
        const auto plain = ex.decode(nlohmann::json{{"z", std::vector<float>(m.begin(), m.end())}}.dump());
        if (nlohmann::json::parse(r0.body)["png"] != service::base64(plain.body)) {
            bad.push_back("ssa_preview u=0 differs from decode(mu)");
        }
        if (ex.decode(R"({"z":[9,9,9,9,9,9,9,9,9,9]})").body != ex.decode(R"({"z":[4,4,4,4,4,4,4,4,4,4]})").body) {
            bad.push_back("decode does not clamp to +-4");
        }
    }
    server.stop();
    th.join();

    std::size_t mismatches = 0;
    for (int q = 0; q < 1000; ++q) {
        std::vector<double> z(10);
        for (auto& v : z) v = uz(rng);
        const auto got = nlohmann::json::parse(ex.neighbors(nlohmann::json{{"z", z}, {"k", 10}}.dump()).body)["neighbors"];
        std::vector<std::pair<double, std::size_t>> scan(cs.size());
        for (std::size_t i = 0; i < cs.size(); ++i) {
            double s = 0;
            for (std::size_t j = 0; j < 10; ++j) s += (double(mu[i * 10 + j]) - z[j]) * (double(mu[i * 10 + j]) - z[j]);
            scan[i] = {s, i};
        }
        std::partial_sort(scan.begin(), scan.begin() + 10, scan.end());
        bool same = got.size() == 10;
        for (std::size_t r = 0; same && r < 10; ++r) {
            same = got[r]["codepoint"] == glyphset::format_codepoint(cs[scan[r].second]) &&
                   std::abs(got[r]["distance"].get<double>() - std::sqrt(scan[r].first)) < 1e-5;
        }
        mismatches += !same;
    }
    if (mismatches) {
        bad.push_back(fmt::format("{} neighbor queries differ from re-scan", mismatches));
    }
    const bool ok = p95 < 50 && bad.empty();
    std::string detail = fmt::format("decode p95 {:.1f} ms over 200 HTTP requests (< 50), neighbors 1000/1000 "
                                     "queries vs re-scan: {} mismatches, {}/{} error cases",
                                     p95, mismatches, cases.size() - case_fail, cases.size());
    for (const auto& b : bad) {
        detail += "; " + b;
    }
    return {ok, detail};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<verdict()>>> criteria{
        {"gradient oracle", gradient_oracle},   {"shape oracle", shape_oracle},
        {"KL correctness", kl_oracle},          {"SSA contract", ssa_contract},
        {"VCE desk-scale training", desk_training}, {"beta monotonicity", beta_monotone},
        {"livedoor reproduction", livedoor_reproduction}, {"determinism", determinism},
        {"corpus", corpus_check},               {"service", service_check},
    };
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <criterion 1-10>\n", argv[0]);
        return 2;
    }
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > int(criteria.size())) {
        std::fprintf(stderr, "criterion must be 1-10\n");
        return 2;
    }
    spdlog::set_level(spdlog::level::warn);
    if (std::getenv("GEL_ACCEPT_VERBOSE")) {
        spdlog::set_level(spdlog::level::info);
    }
    const auto& [name, run] = criteria[std::size_t(n - 1)];
    verdict v;
    try {
        v = run();
    } catch (const std::exception& e) {
        v = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s  %s\n", n, name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    return v.pass ? 0 : 1;
}
