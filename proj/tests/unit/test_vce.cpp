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

#include <gtest/gtest.h>

#include <numbers>

#include "gel/vce/embedding.hpp"
#include "gel/vce/model_io.hpp"
#include "gel/vce/train.hpp"
#include "gel/vce/traverse.hpp"
#include "test_util.hpp"

using namespace gel;
using namespace gel::vce;
using gel::glyphset::geta_mark;

namespace {

autoencoder_shape small_shape(bool variational = true) {
    autoencoder_shape s;
    s.latent_dim = 3;
    s.variational = variational;
    s.channels = {2, 2, 3, 3};
    s.hidden = 6;
    s.image_side = 16;
    return s;
}

/// n synthetic glyphs: filled rectangles at varying positions and sizes.
glyphset::glyph_dataset synthetic_glyphs(std::size_t n) {
    std::vector<char32_t> cps{geta_mark};
    for (std::size_t i = 0; cps.size() < n; ++i) {
        cps.push_back(U'A' + char32_t(i));
    }
    glyphset::glyph_dataset ds;
    ds.chars = glyphset::charset(cps);
    for (std::size_t i = 0; i < n; ++i) {
        glyphset::glyph_image img;
        img.codepoint = ds.chars[i];
        const std::size_t x0 = 8 + (i * 5) % 24, y0 = 8 + (i * 11) % 24, w = 12 + (i * 3) % 20, h = 30 - (i * 7) % 18;
        for (std::size_t y = y0; y < std::min<std::size_t>(64, y0 + h); ++y) {
            for (std::size_t x = x0; x < std::min<std::size_t>(64, x0 + w); ++x) {
                img.levels[y * 64 + x] = 255;
            }
        }
        ds.images.push_back(img);
    }
    return ds;
}

double log_normal(double z, double mu, double sigma) {
    const double t = (z - mu) / sigma;
    return -0.5 * t * t - std::log(sigma) - 0.5 * std::log(2 * std::numbers::pi);
}

} // namespace

TEST(Autoencoder, SpatialChainAndOutputShape) {
    glyph_autoencoder<float> m;
    std::vector<std::size_t> sides;
    for (const auto& s : m.encoder().shapes()) {
        if (s.size() == 3) {
            sides.push_back(s[1]);
        }
    }
    EXPECT_EQ(sides, (std::vector<std::size_t>{64, 32, 32, 16, 16, 8, 8, 4, 4}));
    EXPECT_EQ(m.encoder().output_shape(), shape_t{20});
    EXPECT_EQ(m.decoder().output_shape(), (shape_t{1, 64, 64}));
    std::vector<std::size_t> dec_sides;
    for (const auto& s : m.decoder().shapes()) {
        if (s.size() == 3 && (dec_sides.empty() || dec_sides.back() != s[1])) {
            dec_sides.push_back(s[1]);
        }
    }
    EXPECT_EQ(dec_sides, (std::vector<std::size_t>{4, 8, 16, 32, 64}));
}

TEST(Autoencoder, ZeroWeightsGiveStandardPosterior) {
    glyph_autoencoder<float> m;
    m.params().zero_values();
    const auto post = m.encode(tensor<float>({2, 1, 64, 64}));
    const auto c = post.code(1);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(c.mu[i], 0.0);
        EXPECT_EQ(c.sigma[i], 1.0);
    }
    const auto x = m.decode(tensor<float>({1, 10}));
    EXPECT_FLOAT_EQ(x[0], 0.5f);
}

TEST(Autoencoder, LogvarIsClamped) {
    glyph_autoencoder<double> m(small_shape());
    m.params().zero_values();
    auto& bias = m.params().at("enc.fc2.bias").value;
    bias[3] = 25.0;
    bias[4] = -25.0;
    const auto post = m.encode(tensor<double>({1, 1, 16, 16}));
    EXPECT_EQ(post.logvar[0], 10.0);
    EXPECT_EQ(post.logvar[1], -10.0);
    EXPECT_NEAR(post.code(0).sigma[0], std::exp(5.0), 1e-9);
}

TEST(Latent, ClosedFormKlValues) {
    EXPECT_EQ(kl_divergence({{0.0}, {1.0}}), 0.0);
    EXPECT_DOUBLE_EQ(kl_divergence({{1.0}, {1.0}}), 0.5);
    EXPECT_DOUBLE_EQ(kl_divergence({{1.0, 0.0, 2.0}, {1.0, 1.0, 1.0}}), 0.5 + 2.0);
    // sigma = e: 0.5 (e^2 - 2 - 1)
    EXPECT_NEAR(kl_divergence({{0.0}, {std::exp(1.0)}}), 0.5 * (std::exp(2.0) - 3.0), 1e-12);
}

TEST(Latent, MonteCarloKlMatchesClosedForm) {
    const latent_code c{{1.0, -0.5, 0.3}, {0.5, 2.0, 0.8}};
    std::mt19937_64 rng(11);
    double acc = 0;
    const int n = 400000;
    for (int s = 0; s < n; ++s) {
        const auto z = reparameterize(c, rng);
        for (std::size_t i = 0; i < z.size(); ++i) {
            acc += log_normal(z[i], c.mu[i], c.sigma[i]) - log_normal(z[i], 0, 1);
        }
    }
    const double mc = acc / n, exact = kl_divergence(c);
    EXPECT_NEAR(mc, exact, 0.01 * exact);
}

TEST(Latent, ReparameterizedSampleMoments) {
    const latent_code c{{2.0, -1.0}, {0.25, 3.0}};
    std::mt19937_64 rng(5);
    const int n = 200000;
    std::vector<double> sum(2), sq(2);
    for (int s = 0; s < n; ++s) {
        const auto z = reparameterize(c, rng);
        for (int i = 0; i < 2; ++i) {
            sum[i] += z[i];
            sq[i] += z[i] * z[i];
        }
    }
    for (int i = 0; i < 2; ++i) {
        const double mean = sum[i] / n, sd = std::sqrt(sq[i] / n - mean * mean);
        EXPECT_NEAR(mean, c.mu[i], 5 * c.sigma[i] / std::sqrt(double(n)));
        EXPECT_NEAR(sd, c.sigma[i], 0.01 * c.sigma[i]);
    }
    EXPECT_EQ(reparameterize(c, std::vector<double>{1.0, -1.0}), (std::vector<double>{2.25, -4.0}));
}

TEST(Latent, ElboOfPerfectReconstruction) {
    const std::vector<float> x{0, 1, 1, 0};
    const latent_code c{{1.0}, {1.0}};
    const auto t = elbo_loss<float, float>(x, x, c, 4.0);
    EXPECT_NEAR(t.recon, 4 * std::log(1 - 1e-6), 1e-12);
    EXPECT_DOUBLE_EQ(t.kl, 0.5);
    EXPECT_DOUBLE_EQ(t.total, t.recon - 2.0);
    // Fully wrong prediction saturates at the clamp.
    const std::vector<float> wrong{1, 0, 0, 1};
    EXPECT_NEAR((bernoulli_log_likelihood<float, float>(x, wrong)), 4 * std::log(1e-6), 1e-9);
}

TEST(Objective, BatchLossIsMeanOfPerSampleElbo) {
    glyph_autoencoder<double> m(small_shape());
    m.params().init_he_uniform(3);
    const auto x = test::random_tensor<double>({4, 1, 16, 16}, 9, 0.0, 1.0);
    const auto noise = test::random_tensor<double>({4, 3}, 10, -1.5, 1.5);
    const double beta = 3.0;
    const auto loss = negative_elbo(m, x, noise, beta, false);

    const auto post = m.encode(x);
    double total = 0, recon = 0, kl = 0;
    for (std::size_t b = 0; b < 4; ++b) {
        const auto code = post.code(b);
        const std::vector<double> alpha(noise.sample(b).begin(), noise.sample(b).end());
        const auto z = reparameterize(code, alpha);
        const auto xhat = m.decode(tensor<double>({1, 3}, z));
        const auto t = elbo_loss<double, double>(x.sample(b), xhat.values(), code, beta);
        total -= t.total;
        recon -= t.recon;
        kl += t.kl;
    }
    EXPECT_NEAR(loss.total, total / 4, 1e-9 * std::abs(total));
    EXPECT_NEAR(loss.recon, recon / 4, 1e-9 * std::abs(recon));
    EXPECT_NEAR(loss.kl, kl / 4, 1e-9 * std::max(1.0, kl));
    ASSERT_EQ(loss.kl_per_dim.size(), 3u);
    EXPECT_NEAR(loss.kl_per_dim[0] + loss.kl_per_dim[1] + loss.kl_per_dim[2], loss.kl, 1e-12);
}

namespace {

grad_check_report check_objective(bool variational, double beta, std::size_t corrupt = 0) {
    glyph_autoencoder<double> m(small_shape(variational));
    m.params().init_he_uniform(22);
    for (auto& p : m.params()) {
        if (p->fan_in == 0) {
            for (auto& v : p->value) {
                v = 0.05;
            }
        }
    }
    const auto x = test::random_tensor<double>({3, 1, 16, 16}, 22, 0.0, 1.0);
    const auto noise = test::random_tensor<double>({3, 3}, 23, -1.0, 1.0);
    m.params().zero_grad();
    negative_elbo(m, x, noise, beta);
    if (corrupt) {
        auto& g = m.params().at("dec.deconv2.weight").grad;
        g[corrupt] *= 1.001;
    }
    const auto probes = parameter_probes(m.params());
    return grad_check(probes, [&] { return negative_elbo(m, x, noise, beta, false).total; });
}

} // namespace

TEST(Objective, ElboGradientMatchesFiniteDifferences) {
    const auto r = check_objective(true, 4.0);
    EXPECT_LT(r.max_rel_error(), 1e-4);
    EXPECT_GT(r.checked(), 0.9 * double(r.checked() + r.skipped()));
    for (const auto& g : r.groups) {
        EXPECT_LT(g.max_rel_error, 1e-4) << g.name;
    }
}

TEST(Objective, DeterministicGradientMatchesFiniteDifferences) {
    const auto r = check_objective(false, 0.0);
    EXPECT_LT(r.max_rel_error(), 1e-4);
    for (const auto& g : r.groups) {
        EXPECT_LT(g.max_rel_error, 1e-4) << g.name << " checked " << g.checked << " skipped " << g.skipped;
    }
}

TEST(Objective, CheckerCatchesSmallGradientError) {
    const auto r = check_objective(true, 4.0, 7);
    EXPECT_GT(r.max_rel_error(), 5e-4);
}

TEST(Objective, NoiseShapeIsChecked) {
    glyph_autoencoder<double> m(small_shape());
    EXPECT_THROW(negative_elbo(m, tensor<double>({2, 1, 16, 16}), tensor<double>({2, 4}), 1.0), shape_error);
}

TEST(Training, LossDecreasesAndLogIsWindowed) {
    const auto ds = synthetic_glyphs(12);
    vce_config cfg;
    cfg.steps = 90;
    cfg.batch_size = 8;
    cfg.log_every = 30;
    cfg.learning_rate = 1e-3;
    cfg.beta = 1.0;
    std::size_t callbacks = 0;
    const auto run = train_vce(ds, cfg, [&](const log_row&) { ++callbacks; });
    ASSERT_EQ(run.log.size(), 3u);
    EXPECT_EQ(callbacks, 3u);
    EXPECT_EQ(run.log[2].step, 90u);
    EXPECT_LT(run.log[2].total, run.log[0].total);
    EXPECT_EQ(run.log[0].kl_per_dim.size(), 10u);
    EXPECT_LE(run.best_loss, run.log.back().total);

    const auto csv = log_csv(run.log, 10, true);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,total,recon,kl,kl_0,kl_1,kl_2,kl_3,kl_4,kl_5,kl_6,kl_7,kl_8,kl_9");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Training, SameSeedSameWeights) {
    const auto ds = synthetic_glyphs(6);
    vce_config cfg;
    cfg.steps = 6;
    cfg.batch_size = 4;
    cfg.log_every = 3;
    const auto a = train_vce(ds, cfg);
    const auto b = train_vce(ds, cfg);
    EXPECT_EQ(encode_weights(a.model.params()), encode_weights(b.model.params()));
    cfg.seed = 2;
    const auto c = train_vce(ds, cfg);
    EXPECT_NE(encode_weights(a.model.params()), encode_weights(c.model.params()));
}

TEST(Training, CaeLogsNoKl) {
    const auto ds = synthetic_glyphs(6);
    vce_config cfg;
    cfg.steps = 4;
    cfg.batch_size = 4;
    cfg.log_every = 2;
    const auto run = train_cae(ds, cfg);
    EXPECT_FALSE(run.model.variational());
    EXPECT_EQ(run.log[0].kl, 0.0);
    EXPECT_TRUE(run.log[0].kl_per_dim.empty());
    EXPECT_EQ(log_csv(run.log, 10, false).substr(0, 20), "step,total,recon,kl\n");
}

TEST(Training, InvalidConfigIsRejected) {
    const auto ds = synthetic_glyphs(4);
    vce_config cfg;
    cfg.beta = -1;
    EXPECT_THROW(train_vce(ds, cfg), config_error);
    cfg = {};
    cfg.batch_size = 0;
    EXPECT_THROW(train_vce(ds, cfg), config_error);
}

TEST(Embeddings, ExportMatchesEncoderAndPadIsZero) {
    const auto ds = synthetic_glyphs(5);
    glyph_autoencoder<float> m;
    m.params().init_he_uniform(4);
    const auto t = export_embeddings(m, ds, 2);
    ASSERT_EQ(t.size(), 5u);
    const auto post = m.encode(glyphset::image_batch<float>(ds, {3}));
    for (std::size_t j = 0; j < 10; ++j) {
        EXPECT_FLOAT_EQ(t.mu(3)[j], post.mu[j]);
        EXPECT_FLOAT_EQ(t.sigma(3)[j], std::exp(0.5f * post.logvar[j]));
        EXPECT_EQ(t.mu(t.chars().pad_index())[j], 0.0f);
    }
    EXPECT_TRUE(t.variational());
}

TEST(Embeddings, DeterministicTableHasZeroSigma) {
    const auto ds = synthetic_glyphs(3);
    autoencoder_shape s;
    s.variational = false;
    glyph_autoencoder<float> m(s);
    m.params().init_he_uniform(4);
    const auto t = export_embeddings(m, ds);
    for (float v : t.sigmas()) {
        EXPECT_EQ(v, 0.0f);
    }
    EXPECT_FALSE(t.variational());
    EXPECT_TRUE(statistics(t).kl_per_dim.empty());
}

TEST(Embeddings, Emb1RoundTripAndLayout) {
    const embedding_table t(glyphset::charset({U'A', geta_mark}), 2, {1, 2, 3, 4}, {0.5f, 0.5f, 1, 1});
    const auto bytes = encode_embeddings(t);
    EXPECT_EQ(bytes.size(), 4u + 2 + 4 + 4 + 32 + 2 * (4 + 16));
    EXPECT_EQ(bytes.substr(0, 4), "EMB1");
    EXPECT_EQ(decode_embeddings(bytes), t);

    test::temp_dir dir("emb");
    save_embeddings(t, dir.path / "e.emb");
    EXPECT_EQ(load_embeddings(dir.path / "e.emb"), t);
}

TEST(Embeddings, Emb1Corruption) {
    const embedding_table t(glyphset::charset({U'A', U'B', geta_mark}), 1, {1, 2, 3}, {1, 1, 1});
    auto bytes = encode_embeddings(t);
    auto bad = bytes;
    bad[0] = 'Q';
    EXPECT_THROW(decode_embeddings(bad), data_error);
    EXPECT_THROW(decode_embeddings(bytes.substr(0, bytes.size() - 3)), data_error);
    bad = bytes;
    bad[14] ^= 1; // first byte of the charset hash
    try {
        decode_embeddings(bad);
        FAIL();
    } catch (const data_error& e) {
        EXPECT_NE(std::string(e.what()).find("hash"), std::string::npos);
    }
}

TEST(Embeddings, StatisticsOracle) {
    // mu column 0: {1, -1}; column 1: {2, 2}. sigma = 1 everywhere.
    const embedding_table t(glyphset::charset({U'A', geta_mark}), 2, {1, 2, -1, 2}, {1, 1, 1, 1});
    const auto s = statistics(t);
    EXPECT_DOUBLE_EQ(s.mean[0], 0.0);
    EXPECT_DOUBLE_EQ(s.mean[1], 2.0);
    EXPECT_DOUBLE_EQ(s.stddev[0], 1.0);
    EXPECT_DOUBLE_EQ(s.stddev[1], 0.0);
    EXPECT_DOUBLE_EQ(s.kl_per_dim[0], 0.5);
    EXPECT_DOUBLE_EQ(s.kl_per_dim[1], 2.0);
    EXPECT_DOUBLE_EQ(s.total_kl, 2.5);
    EXPECT_EQ(s.active_dims(), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(s.active_dims(1.0), (std::vector<std::size_t>{1}));
}

TEST(Traverse, CenterStepIsPlainReconstruction) {
    const auto ds = synthetic_glyphs(4);
    glyph_autoencoder<float> m;
    m.params().init_he_uniform(8);
    const auto t = export_embeddings(m, ds);
    const auto strip = traverse(m, t, U'B', 3, -2.0, 2.0, 9);
    ASSERT_EQ(strip.dim(0), 9u);
    const auto mu = t.mu(*t.chars().index_of(U'B'));
    const auto plain = m.decode(tensor<float>({1, 10}, {mu.begin(), mu.end()}));
    for (std::size_t i = 0; i < plain.size(); ++i) {
        ASSERT_NEAR(strip.sample(4)[i], plain[i], 1e-6);
    }
    EXPECT_EQ(traversal_offsets(-2, 2, 9)[4], 0.0);
    EXPECT_EQ(to_gray_images(strip).size(), 9u);
}

TEST(Traverse, UnknownCharacterListsNeighbours) {
    const auto ds = synthetic_glyphs(4);
    glyph_autoencoder<float> m;
    const auto t = export_embeddings(m, ds);
    try {
        traverse(m, t, U'Z', 0);
        FAIL();
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("U+005A"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("U+0043"), std::string::npos);
    }
    EXPECT_THROW(traverse(m, t, U'A', 10), config_error);
}

TEST(ModelIo, RoundTripKeepsArchitectureAndWeights) {
    test::temp_dir dir("model");
    glyph_autoencoder<float> m(small_shape(false));
    m.params().init_he_uniform(6);
    const auto cs = glyphset::charset({U'A', geta_mark});
    save_model(dir.path / "m.wts", m, cs, {{"beta", 0}});
    const auto back = load_model(dir.path / "m.wts");
    EXPECT_FALSE(back.model.variational());
    EXPECT_EQ(back.model.shape().channels, m.shape().channels);
    EXPECT_EQ(back.charset_sha256, to_hex(cs.hash()));
    EXPECT_EQ(back.metadata["kind"], "cae");
    EXPECT_EQ(encode_weights(back.model.params()), encode_weights(m.params()));
}
