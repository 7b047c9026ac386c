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

#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "gel/core/binary_io.hpp"
#include "gel/glyphset/dataset.hpp"

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wunused-function"
#pragma GCC diagnostic ignored "-Wmissing-field-initializers"
#pragma GCC diagnostic ignored "-Wsign-compare"
#define STBTT_STATIC
#define STB_TRUETYPE_IMPLEMENTATION
#include <stb_truetype.h>
#pragma GCC diagnostic pop

namespace gel::glyphset {

struct render_config {
    double em_pixels = 56.0;       ///< font em size in pixels
    double min_coverage = 0.99;    ///< fraction of the charset the font must cover
};

inline std::string format_codepoint(char32_t cp) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "U+%04X", unsigned(cp));
    return buf;
}

namespace detail {

class font_face {
public:
    explicit font_face(std::string bytes) : bytes_(std::move(bytes)) {
        const auto* data = reinterpret_cast<const unsigned char*>(bytes_.data());
        const int offset = bytes_.size() >= 12 ? stbtt_GetFontOffsetForIndex(data, 0) : -1;
        if (offset < 0 || !stbtt_InitFont(&info_, data, offset)) {
            throw data_error("font: not a readable TrueType/OpenType font");
        }
    }

    int glyph_index(char32_t cp) const { return stbtt_FindGlyphIndex(&info_, int(cp)); }

    /// Renders glyph g centered by its bounding box into a 64x64 cell.
    glyph_image render(int glyph, char32_t cp, double em_pixels) const {
        glyph_image img;
        img.codepoint = cp;
        const float scale = stbtt_ScaleForMappingEmToPixels(&info_, float(em_pixels));
        int x0, y0, x1, y1;
        stbtt_GetGlyphBitmapBox(&info_, glyph, scale, scale, &x0, &y0, &x1, &y1);
        const int w = x1 - x0, h = y1 - y0;
        if (w <= 0 || h <= 0) {
            return img;
        }
        std::vector<unsigned char> bitmap(std::size_t(w) * std::size_t(h));
        stbtt_MakeGlyphBitmap(&info_, bitmap.data(), w, h, w, scale, scale, glyph);
        const int side = int(glyph_side);
        const int ox = (side - w) / 2, oy = (side - h) / 2;
        for (int y = 0; y < h; ++y) {
            const int ty = y + oy;
            if (ty < 0 || ty >= side) {
                continue;
            }
            for (int x = 0; x < w; ++x) {
                const int tx = x + ox;
                if (tx >= 0 && tx < side) {
                    img.levels[std::size_t(ty * side + tx)] = bitmap[std::size_t(y * w + x)];
                }
            }
        }
        return img;
    }

private:
    std::string bytes_;
    stbtt_fontinfo info_{};
};

} // namespace detail

/*!
 * \brief Rasterizes every charset member with one font.
 *
 * Members missing from the font are drawn with the geta-mark glyph and
 * listed in the dataset's fallbacks. Fails when the font lacks the geta
 * mark or covers less than render_config::min_coverage of the charset.
 */
inline glyph_dataset rasterize(const charset& chars, std::string font_bytes, const render_config& cfg = {},
                               std::string font_id = {}) {
    const detail::font_face face(std::move(font_bytes));
    const int geta = face.glyph_index(geta_mark);
    if (geta == 0) {
        throw data_error("font: no glyph for the unknown-character mark U+3013");
    }
    glyph_dataset ds;
    ds.chars = chars;
    ds.font_id = std::move(font_id);
    std::vector<int> glyphs(chars.size());
    for (std::size_t i = 0; i < chars.size(); ++i) {
        glyphs[i] = face.glyph_index(chars[i]);
        if (glyphs[i] == 0) {
            ds.fallbacks.push_back(chars[i]);
        }
    }
    const double coverage = 1.0 - double(ds.fallbacks.size()) / double(chars.size());
    if (coverage < cfg.min_coverage) {
        std::string list;
        for (std::size_t i = 0; i < ds.fallbacks.size() && i < 64; ++i) {
            list += (i ? " " : "") + format_codepoint(ds.fallbacks[i]);
        }
        if (ds.fallbacks.size() > 64) {
            list += " ...";
        }
        throw data_error("font covers " + std::to_string(coverage * 100.0) + "% of the charset (" +
                         std::to_string(ds.fallbacks.size()) + " missing): " + list);
    }
    ds.images.reserve(chars.size());
    for (std::size_t i = 0; i < chars.size(); ++i) {
        if (glyphs[i] == 0) {
            spdlog::warn("rasterize: {} missing from font, using the geta glyph", format_codepoint(chars[i]));
        }
        ds.images.push_back(face.render(glyphs[i] ? glyphs[i] : geta, chars[i], cfg.em_pixels));
    }
    return ds;
}

inline glyph_dataset rasterize_file(const charset& chars, const std::filesystem::path& font_path,
                                    const render_config& cfg = {}) {
    if (!std::filesystem::exists(font_path)) {
        throw data_error("font file not found: " + font_path.string());
    }
    return rasterize(chars, io::read_file(font_path), cfg, font_path.filename().string());
}

} // namespace gel::glyphset
