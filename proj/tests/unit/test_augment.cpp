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

#include <cstring>

#include "../support/stats.hpp"
#include "gel/augment/augment.hpp"
#include "test_util.hpp"

namespace gel::augment {
namespace {

tensor<float> normal_batch(std::size_t n, std::size_t d, std::size_t len, std::uint64_t seed) {
    tensor<float> t({n, d, len});
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> nd;
    for (auto& v : t) {
        v = nd(rng);
    }
    return t;
}

std::vector<std::uint8_t> prefix_mask(std::size_t n, std::size_t len, std::size_t chars) {
    std::vector<std::uint8_t> m(n * len, 0);
    for (std::size_t b = 0; b < n; ++b) {
        std::fill_n(m.begin() + b * len, chars, 1);
    }
    return m;
}

TEST(Ssa, ZeroGammaIsBitIdentity) {
    auto x = normal_batch(4, 10, 16, 1);
    x[3] = -0.0f;
    const auto before = x;
    std::mt19937_64 rng(7);
    const auto draws = ssa(x, prefix_mask(4, 16, 16), ssa_config{.gamma = 0}, rng);
    EXPECT_TRUE(draws.empty());
    EXPECT_EQ(std::memcmp(x.data(), before.data(), x.size() * sizeof(float)), 0);
}

TEST(Ssa, AtMostOneCoordinatePerCharacterWithinGamma) {
    const std::size_t n = 32, d = 10, len = 24;
    for (double gamma : {0.5, 2.0, 3.0}) {
        auto x = normal_batch(n, d, len, 2);
        const auto before = x;
        std::mt19937_64 rng(11);
        ssa(x, prefix_mask(n, len, 20), ssa_config{.gamma = gamma}, rng);
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t t = 0; t < len; ++t) {
                std::size_t changed = 0;
                for (std::size_t i = 0; i < d; ++i) {
                    const std::size_t k = (b * d + i) * len + t;
                    const double delta = double(x[k]) - double(before[k]);
                    changed += delta != 0;
                    EXPECT_LE(std::abs(delta), gamma);
                }
                EXPECT_LE(changed, t < 20 ? 1u : 0u) << "sample " << b << " position " << t;
            }
        }
    }
}

TEST(Ssa, PaddingNeverTouched) {
    auto x = normal_batch(8, 10, 12, 3);
    const auto before = x;
    std::mt19937_64 rng(5);
    const auto draws = ssa(x, prefix_mask(8, 12, 5), ssa_config{.gamma = 2}, rng);
    EXPECT_EQ(draws.size(), 8u * 5u);
    for (const auto& dr : draws) {
        EXPECT_LT(dr.position, 5u);
    }
    for (std::size_t b = 0; b < 8; ++b) {
        for (std::size_t i = 0; i < 10; ++i) {
            for (std::size_t t = 5; t < 12; ++t) {
                const std::size_t k = (b * 10 + i) * 12 + t;
                EXPECT_EQ(x[k], before[k]);
            }
        }
    }
}

TEST(Ssa, ShiftAndDimensionAreUniform) {
    // 1e5 draws: 10000 samples x 10 positions, d = 10
    auto x = normal_batch(10000, 10, 10, 4);
    std::mt19937_64 rng(2026);
    const auto draws = ssa(x, prefix_mask(10000, 10, 10), ssa_config{.gamma = 2}, rng);
    ASSERT_EQ(draws.size(), 100000u);
    std::vector<double> us;
    std::vector<std::size_t> dims(10, 0);
    for (const auto& dr : draws) {
        us.push_back(dr.u);
        ++dims[dr.dim];
    }
    EXPECT_LT(test::ks_uniform(us, -2, 2), test::ks_critical_1e5);
    EXPECT_LT(test::chi_square_uniform(dims), test::chi2_critical_df9);
}

TEST(Ssa, RateControlsPerturbedFraction) {
    auto x = normal_batch(1000, 10, 100, 6);
    std::mt19937_64 rng(8);
    const auto draws = ssa(x, prefix_mask(1000, 100, 100), ssa_config{.gamma = 1, .rate = 0.25}, rng);
    const double frac = double(draws.size()) / 1e5;
    EXPECT_GE(frac, 0.2436);  // +-6 sigma of Binomial(1e5, 0.25)
    EXPECT_LE(frac, 0.2564);
    auto y = normal_batch(2, 10, 4, 6);
    const auto before = y;
    EXPECT_TRUE(ssa(y, prefix_mask(2, 4, 4), ssa_config{.gamma = 1, .rate = 0}, rng).empty());
    EXPECT_EQ(std::memcmp(y.data(), before.data(), y.size() * sizeof(float)), 0);
}

TEST(Ssa, FreshRandomnessEachCall) {
    auto a = normal_batch(2, 10, 8, 9);
    std::mt19937_64 rng(3);
    const auto first = ssa(a, prefix_mask(2, 8, 8), ssa_config{}, rng);
    const auto second = ssa(a, prefix_mask(2, 8, 8), ssa_config{}, rng);
    ASSERT_EQ(first.size(), second.size());
    bool differ = false;
    for (std::size_t i = 0; i < first.size(); ++i) {
        differ |= first[i].u != second[i].u;
    }
    EXPECT_TRUE(differ);
}

TEST(Ssa, SameSeedSameResult) {
    auto a = normal_batch(3, 10, 8, 9), b = a;
    std::mt19937_64 r1(42), r2(42);
    ssa(a, prefix_mask(3, 8, 6), ssa_config{}, r1);
    ssa(b, prefix_mask(3, 8, 6), ssa_config{}, r2);
    EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)), 0);
}

TEST(Ssa, StaysWithinWidenedObservedRange) {
    const std::size_t n = 200, d = 10, len = 20;
    auto x = normal_batch(n, d, len, 10);
    std::vector<float> lo(d, 1e9f), hi(d, -1e9f);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t t = 0; t < len; ++t) {
                lo[i] = std::min(lo[i], x[(b * d + i) * len + t]);
                hi[i] = std::max(hi[i], x[(b * d + i) * len + t]);
            }
        }
    }
    std::mt19937_64 rng(1);
    ssa(x, prefix_mask(n, len, len), ssa_config{.gamma = 2}, rng);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t t = 0; t < len; ++t) {
                EXPECT_GE(x[(b * d + i) * len + t], lo[i] - 2.0f);
                EXPECT_LE(x[(b * d + i) * len + t], hi[i] + 2.0f);
            }
        }
    }
}

TEST(Ssa, RejectsBadConfig) {
    auto x = normal_batch(1, 10, 4, 1);
    std::mt19937_64 rng(1);
    const auto m = prefix_mask(1, 4, 4);
    EXPECT_THROW(ssa(x, m, ssa_config{.gamma = -0.5}, rng), config_error);
    EXPECT_THROW(ssa(x, m, ssa_config{.gamma = 1, .rate = 1.5}, rng), config_error);
    EXPECT_THROW(ssa(x, std::vector<std::uint8_t>(3, 1), ssa_config{}, rng), shape_error);
}

TEST(Wildcard, ExtremesAndIdentity) {
    auto x = normal_batch(4, 10, 8, 12);
    const auto before = x;
    std::mt19937_64 rng(1);
    EXPECT_EQ(wildcard(x, prefix_mask(4, 8, 8), wt_config{.p = 0}, rng), 0u);
    EXPECT_EQ(std::memcmp(x.data(), before.data(), x.size() * sizeof(float)), 0);
    EXPECT_EQ(wildcard(x, prefix_mask(4, 8, 6), wt_config{.p = 1}, rng), 24u);
    for (std::size_t b = 0; b < 4; ++b) {
        for (std::size_t i = 0; i < 10; ++i) {
            for (std::size_t t = 0; t < 8; ++t) {
                const std::size_t k = (b * 10 + i) * 8 + t;
                EXPECT_EQ(x[k], t < 6 ? 0.0f : before[k]);
            }
        }
    }
    EXPECT_THROW(wildcard(x, prefix_mask(4, 8, 8), wt_config{.p = -0.1}, rng), config_error);
}

TEST(Wildcard, DropFractionMatchesBinomialBound) {
    auto x = normal_batch(1000, 4, 100, 13);
    std::mt19937_64 rng(99);
    const double frac = double(wildcard(x, prefix_mask(1000, 100, 100), wt_config{.p = 0.1}, rng)) / 1e5;
    EXPECT_GE(frac, 0.094);
    EXPECT_LE(frac, 0.106);
}

TEST(Apply, NoneLeavesBatchAlone) {
    auto x = normal_batch(2, 10, 8, 14);
    const auto before = x;
    std::mt19937_64 rng(1);
    apply(augmentation{no_augmentation{}}, x, prefix_mask(2, 8, 8), rng);
    EXPECT_EQ(std::memcmp(x.data(), before.data(), x.size() * sizeof(float)), 0);
    EXPECT_EQ(to_json(augmentation{ssa_config{.gamma = 1.5}})["gamma"], 1.5);
    EXPECT_EQ(to_json(augmentation{wt_config{}})["kind"], "wt");
}

} // namespace
} // namespace gel::augment
