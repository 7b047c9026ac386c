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

#include <fstream>
#include <set>

#include "gel/text/encode.hpp"
#include "gel/text/split.hpp"
#include "test_util.hpp"

namespace gel::text {
namespace {

namespace fs = std::filesystem;

glyphset::charset small_charset() {
    std::vector<char32_t> cps{U'あ', U'い', U'う', U'A', U'B', U' ', glyphset::geta_mark};
    return glyphset::charset(cps);
}

void write(const fs::path& p, const std::string& s) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << s;
}

// categories alpha (6 docs), beta (8 docs), gamma (11 docs) plus noise files
fs::path make_corpus(const fs::path& root) {
    const std::vector<std::pair<std::string, int>> cats{{"alpha", 6}, {"beta", 8}, {"gamma", 11}};
    for (const auto& [cat, n] : cats) {
        for (int i = 0; i < n; ++i) {
            write(root / "text" / cat / (cat + "-" + std::to_string(i) + ".txt"),
                  "http://example.com/" + cat + "\r\n2012-01-01T00:00:00+0900\r\n" + cat + " title " +
                      std::to_string(i) + "\r\nbody line one\r\nbody line two\r\n");
        }
        write(root / "text" / cat / "LICENSE.txt", "license text\nsecond\nthird\n");
    }
    write(root / "text" / "README.txt", "top-level readme\n");
    write(root / "text" / "beta" / "broken.txt", "http://example.com\n2012\n");
    return root;
}

TEST(Utf8, DecodesAndReplacesMalformed) {
    EXPECT_EQ(decode_utf8("a\xE3\x81\x82\xF0\x9F\x98\x80"), (std::u32string{U'a', U'あ', 0x1F600}));
    EXPECT_EQ(decode_utf8("\xE3\x81"), (std::u32string{replacement_char, replacement_char}));
    EXPECT_EQ(decode_utf8("\xC0\xAF"), (std::u32string{replacement_char, replacement_char}));  // overlong '/'
    EXPECT_EQ(decode_utf8("\xED\xA0\x80"),
              (std::u32string{replacement_char, replacement_char, replacement_char}));  // surrogate
    EXPECT_EQ(encode_utf8(decode_utf8("日本語 text")), "日本語 text");
    EXPECT_EQ(fold_width(U'Ａ'), U'A');
    EXPECT_EQ(fold_width(U'あ'), U'あ');
}

TEST(Encode, PadsAndTruncates) {
    const auto cs = small_charset();
    const auto pad = std::uint32_t(cs.pad_index());
    const auto s = encode_text("あいうABあいうAB  ", 3, cs, 80);
    ASSERT_EQ(s.indices.size(), 80u);
    EXPECT_EQ(s.label, 3u);
    for (std::size_t i = 0; i < 80; ++i) {
        EXPECT_EQ(s.indices[i] == pad, i >= 12) << i;
    }
    std::string long_title;
    for (int i = 0; i < 100; ++i) {
        long_title += i < 80 ? "あ" : "い";
    }
    const auto t = encode_text(long_title, 0, cs, 80);
    ASSERT_EQ(t.indices.size(), 80u);
    for (auto v : t.indices) {
        EXPECT_EQ(v, *cs.index_of(U'あ'));
    }
}

TEST(Encode, UnknownAndEmojiMapToGeta) {
    const auto cs = small_charset();
    const auto s = encode_text("あ\xF0\x9F\x98\x80Ｂ漢", 0, cs, 6);
    EXPECT_EQ(s.indices[0], *cs.index_of(U'あ'));
    EXPECT_EQ(s.indices[1], cs.unknown_index());
    EXPECT_EQ(s.indices[2], *cs.index_of(U'B'));
    EXPECT_EQ(s.indices[3], cs.unknown_index());
    EXPECT_EQ(s.indices[4], cs.pad_index());
    EXPECT_EQ(encode_text("", 0, cs, 4).indices, std::vector<std::uint32_t>(4, std::uint32_t(cs.pad_index())));
}

TEST(Encode, WindowCounts) {
    const auto cs = small_charset();
    std::string body130, body50;
    for (int i = 0; i < 130; ++i) {
        body130 += i % 2 ? "A" : "B";
    }
    for (int i = 0; i < 50; ++i) {
        body50 += "い";
    }
    const auto w = slide_all(body130, 1, cs, 128);
    ASSERT_EQ(w.size(), 3u);
    EXPECT_EQ(w[1].indices[0], w[0].indices[1]);
    EXPECT_EQ(slide_all(body50, 1, cs, 128).size(), 1u);
    std::mt19937_64 rng(1);
    const auto crop = crop_windows(body50, 1, cs, 128, crop_mode::random_crop, rng);
    ASSERT_EQ(crop.size(), 1u);
    EXPECT_EQ(crop[0].indices[49], *cs.index_of(U'い'));
    EXPECT_EQ(crop[0].indices[50], cs.pad_index());
}

TEST(Encode, RandomCropIsReproducibleAndCoversPositions) {
    const auto cs = small_charset();
    std::string body = "あいうAB";
    for (int i = 0; i < 5; ++i) {
        body += body;
    }
    std::mt19937_64 r1(9), r2(9);
    std::set<std::uint32_t> firsts;
    for (int i = 0; i < 50; ++i) {
        const auto a = crop_windows(body, 0, cs, 16, crop_mode::random_crop, r1);
        const auto b = crop_windows(body, 0, cs, 16, crop_mode::random_crop, r2);
        EXPECT_EQ(a[0].indices, b[0].indices);
        firsts.insert(a[0].indices[0]);
    }
    EXPECT_EQ(firsts.size(), 5u);
}

TEST(Livedoor, LoadsLayoutAndSkipsNoise) {
    test::temp_dir tmp("livedoor");
    make_corpus(tmp.path);
    load_report rep;
    const auto c = load_livedoor(tmp.path, &rep);
    EXPECT_EQ(c.categories, (std::vector<std::string>{"alpha", "beta", "gamma"}));
    EXPECT_EQ(c.docs.size(), 25u);
    EXPECT_EQ(rep.total, 25u);
    EXPECT_EQ(rep.per_category.at("beta"), 8u);
    ASSERT_EQ(rep.skipped.size(), 1u);
    EXPECT_EQ(rep.skipped[0], "beta/broken.txt");
    EXPECT_EQ(c.docs[0].title, "alpha title 0");
    EXPECT_EQ(c.docs[0].body, "body line one\nbody line two\n");
    EXPECT_EQ(c.docs[0].id, "alpha/alpha-0.txt");
    EXPECT_EQ(load_livedoor(tmp.path / "text").docs.size(), 25u);
}

TEST(Livedoor, MissingOrEmptyRootIsFatal) {
    test::temp_dir tmp("livedoor_empty");
    EXPECT_THROW(load_livedoor(tmp.path / "nope"), data_error);
    fs::create_directories(tmp.path / "text" / "alpha");
    EXPECT_THROW(load_livedoor(tmp.path), data_error);
}

TEST(Split, StratifiedDisjointAndRounded) {
    test::temp_dir tmp("split");
    make_corpus(tmp.path);
    const auto c = load_livedoor(tmp.path);
    const auto s = split(c, split_spec{.seed = 3});
    // per category: round(0.2 n) eval, round(0.08 n) val -> alpha 1/0, beta 2/1, gamma 2/1
    EXPECT_EQ(s.eval.size(), 5u);
    EXPECT_EQ(s.val.size(), 2u);
    EXPECT_EQ(s.train.size(), 18u);
    std::set<std::size_t> all;
    for (const auto* v : {&s.train, &s.val, &s.eval}) {
        all.insert(v->begin(), v->end());
    }
    EXPECT_EQ(all.size(), 25u);
    std::map<std::size_t, std::size_t> eval_per_label;
    for (auto i : s.eval) {
        ++eval_per_label[c.docs[i].label];
    }
    EXPECT_EQ(eval_per_label[0], 1u);
    EXPECT_EQ(eval_per_label[1], 2u);
    EXPECT_EQ(eval_per_label[2], 2u);
}

TEST(Split, SeedDeterminismAndManifestReplay) {
    test::temp_dir tmp("split_seed");
    make_corpus(tmp.path);
    const auto c = load_livedoor(tmp.path);
    const auto a = split(c, split_spec{.seed = 1});
    const auto b = split(c, split_spec{.seed = 1});
    const auto d = split(c, split_spec{.seed = 2});
    EXPECT_EQ(a.eval, b.eval);
    EXPECT_EQ(a.train, b.train);
    EXPECT_NE(a.train, d.train);
    const auto m = split_manifest(c, split_spec{.seed = 1}, a);
    EXPECT_EQ(m["seed"], 1);
    const auto r = split_from_manifest(c, nlohmann::json::parse(m.dump()));
    EXPECT_EQ(r.train, a.train);
    EXPECT_EQ(r.val, a.val);
    EXPECT_EQ(r.eval, a.eval);
    auto bad = m;
    bad["eval"].push_back(bad["train"][0]);
    EXPECT_THROW(split_from_manifest(c, bad), data_error);
    bad = m;
    bad["val"].push_back("alpha/missing.txt");
    EXPECT_THROW(split_from_manifest(c, bad), data_error);
}

TEST(Split, RejectsTinyCategoriesAndBadFractions) {
    corpus c{{"a", "b"}, {}};
    for (int i = 0; i < 10; ++i) {
        c.docs.push_back({std::size_t(i < 4 ? 0 : 1), "t", "", std::to_string(i)});
    }
    EXPECT_THROW(split(c, split_spec{}), data_error);
    c.docs[4].label = 0;
    EXPECT_NO_THROW(split(c, split_spec{}));
    EXPECT_THROW(split(c, split_spec{.train = 0.7, .val = 0.1, .eval = 0.1}), config_error);
}

} // namespace
} // namespace gel::text
