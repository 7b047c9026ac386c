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

#include "gel/glyphset/charset.hpp"
#include "gel/glyphset/dataset.hpp"
#include "gel/glyphset/rasterize.hpp"
#include "test_util.hpp"

using namespace gel;
using namespace gel::glyphset;

namespace {

std::string font_bytes_or_skip() {
    const auto path = gel::test::test_font();
    if (path.empty() || !std::filesystem::exists(path)) {
        return {};
    }
    return io::read_file(path);
}

#define REQUIRE_FONT(var)                                                    \
    const std::string var = font_bytes_or_skip();                            \
    if (var.empty()) {                                                       \
        GTEST_SKIP() << "no Japanese font configured (set GEL_FONT)";        \
    }

} // namespace

TEST(Charset, DefaultInventoryContents) {
    const auto cs = build_default_charset();
    for (char32_t c : {U'迫', U'追', U'綱', U'縄', U'A', U'0', U'あ', U'ア', geta_mark}) {
        EXPECT_TRUE(cs.contains(c)) << format_codepoint(c);
    }
    EXPECT_FALSE(cs.contains(U' '));
    EXPECT_TRUE(std::is_sorted(cs.entries().begin(), cs.entries().end()));
    EXPECT_EQ(std::adjacent_find(cs.entries().begin(), cs.entries().end()), cs.entries().end());
}

TEST(Charset, DefaultCountIsExact) {
    // 6355 JIS kanji + 83 hiragana + 86 katakana + 94 ASCII + geta + 12 punctuation.
    const auto cs = build_default_charset();
    EXPECT_EQ(cs.size(), 6631u);
    EXPECT_GE(cs.size(), 6000u);
    EXPECT_LE(cs.size(), 7000u);
}

TEST(Charset, PadSentinelIsNotAMember) {
    const auto cs = build_default_charset();
    EXPECT_EQ(cs.pad_index(), cs.size());
    EXPECT_EQ(cs[cs.unknown_index()], geta_mark);
    EXPECT_EQ(cs.index_or_unknown(U'😀'), cs.unknown_index());
}

TEST(Charset, RequiresGetaMark) { EXPECT_THROW(charset({U'A', U'B'}), config_error); }

TEST(Charset, SubsetKeepsGetaAndSize) {
    const auto cs = subset_charset(build_default_charset(), 200);
    EXPECT_EQ(cs.size(), 200u);
    EXPECT_TRUE(cs.contains(geta_mark));
    EXPECT_EQ(subset_charset(build_default_charset(), 200), cs);
}

TEST(Charset, HashDependsOnMembers) {
    const auto a = subset_charset(build_default_charset(), 50);
    const auto b = subset_charset(build_default_charset(), 51);
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(a.hash(), subset_charset(build_default_charset(), 50).hash());
}

TEST(Rasterize, UnreadableFontIsFatal) {
    EXPECT_THROW(rasterize(charset({geta_mark}), std::string(100, 'x')), data_error);
    EXPECT_THROW(rasterize_file(charset({geta_mark}), "/nonexistent/font.ttf"), data_error);
}

TEST(Rasterize, FontWithoutGetaMarkIsFatal) {
    if (!std::filesystem::exists(GEL_SYSTEM_FONT)) {
        GTEST_SKIP();
    }
    EXPECT_THROW(rasterize_file(charset({U'A', geta_mark}), GEL_SYSTEM_FONT), data_error);
}

TEST(Rasterize, LetterAIsCenteredColumnBand) {
    REQUIRE_FONT(font);
    const auto ds = rasterize(charset({U'A', geta_mark}), font);
    const auto& img = ds.images[*ds.chars.index_of(U'A')];
    std::size_t lo = glyph_side, hi = 0;
    for (std::size_t y = 0; y < glyph_side; ++y) {
        for (std::size_t x = 0; x < glyph_side; ++x) {
            if (img.levels[y * glyph_side + x] > 0) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        }
    }
    ASSERT_LT(lo, hi);
    EXPECT_NEAR((double(lo) + double(hi)) / 2.0, 31.5, 1.5);
    EXPECT_LT(hi - lo, 48u);
    EXPECT_GE(img.max_intensity(), 0.5f);
}

TEST(Rasterize, MissingCodepointFallsBackToGetaGlyph) {
    REQUIRE_FONT(font);
    auto cps = subset_charset(build_default_charset(), 150).entries();
    cps.push_back(U'😀');
    const auto ds = rasterize(charset(cps), font);
    ASSERT_EQ(ds.fallbacks, std::vector<char32_t>{U'😀'});
    const auto& emoji = ds.images[*ds.chars.index_of(U'😀')];
    const auto& geta = ds.images[ds.chars.unknown_index()];
    EXPECT_EQ(emoji.codepoint, U'😀');
    EXPECT_EQ(emoji.levels, geta.levels);
}

TEST(Rasterize, LowCoverageListsMissingCodepoints) {
    REQUIRE_FONT(font);
    try {
        rasterize(charset({geta_mark, U'😀', U'A'}), font);
        FAIL();
    } catch (const data_error& e) {
        EXPECT_NE(std::string(e.what()).find("U+1F600"), std::string::npos);
    }
}

TEST(Rasterize, DeterministicAndInRange) {
    REQUIRE_FONT(font);
    const auto cs = subset_charset(build_default_charset(), 200);
    const auto a = rasterize(cs, font);
    const auto b = rasterize(cs, font);
    EXPECT_EQ(encode_dataset(a), encode_dataset(b));
    for (const auto& img : a.images) {
        if (!img.blank()) {
            EXPECT_GE(img.max_intensity(), 0.5f) << format_codepoint(img.codepoint);
        }
    }
}

TEST(DatasetFormat, RoundTripKeepsAlignment) {
    gel::test::temp_dir dir("gly");
    glyph_dataset ds;
    ds.chars = charset({U'A', U'迫', geta_mark});
    ds.font_id = "synthetic";
    for (std::size_t i = 0; i < ds.chars.size(); ++i) {
        glyph_image img;
        img.codepoint = ds.chars[i];
        for (std::size_t p = 0; p < glyph_pixels; ++p) {
            img.levels[p] = std::uint8_t((p * 7 + i * 31) % 256);
        }
        ds.images.push_back(img);
    }
    save_dataset(ds, dir.path / "g.gly");
    const auto back = load_dataset(dir.path / "g.gly");
    EXPECT_EQ(back.chars, ds.chars);
    EXPECT_EQ(back.images, ds.images);
    EXPECT_EQ(back.font_id, "synthetic");
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back.images[i].codepoint, back.chars[i]);
    }
}

TEST(DatasetFormat, WrongMagicNamesExpectedMagic) {
    glyph_dataset ds;
    ds.chars = charset({geta_mark});
    ds.images.resize(1);
    ds.images[0].codepoint = geta_mark;
    auto bytes = encode_dataset(ds);
    bytes[0] = 'X';
    try {
        decode_dataset(bytes);
        FAIL();
    } catch (const data_error& e) {
        EXPECT_NE(std::string(e.what()).find("\"GLY1\""), std::string::npos);
    }
}

TEST(DatasetFormat, CountMismatchIsTruncation) {
    glyph_dataset ds;
    ds.chars = charset({U'A', geta_mark});
    ds.images.resize(2);
    ds.images[0].codepoint = U'A';
    ds.images[1].codepoint = geta_mark;
    const auto bytes = encode_dataset(ds);
    try {
        decode_dataset(bytes.substr(0, bytes.size() - 100));
        FAIL();
    } catch (const data_error& e) {
        EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
    }
}
