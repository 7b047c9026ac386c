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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gel/core/binary_io.hpp"
#include "gel/core/tensor.hpp"
#include "gel/glyphset/charset.hpp"

namespace gel::glyphset {

inline constexpr std::size_t glyph_side = 64;
inline constexpr std::size_t glyph_pixels = glyph_side * glyph_side;

/// One rasterized character; ink = 255, background = 0.
struct glyph_image {
    char32_t codepoint = 0;
    std::array<std::uint8_t, glyph_pixels> levels{};

    float intensity(std::size_t i) const { return float(levels[i]) / 255.0f; }
    float max_intensity() const { return float(*std::max_element(levels.begin(), levels.end())) / 255.0f; }
    bool blank() const {
        return std::all_of(levels.begin(), levels.end(), [](std::uint8_t v) { return v == 0; });
    }

    friend bool operator==(const glyph_image&, const glyph_image&) = default;
};

struct glyph_dataset {
    charset chars;
    std::vector<glyph_image> images; ///< aligned with chars
    std::string font_id;
    std::vector<char32_t> fallbacks; ///< members rendered with the geta glyph

    std::size_t size() const noexcept { return images.size(); }
};

/// Images at the given charset indices as a [N, 1, 64, 64] batch in [0, 1].
template <typename T>
tensor<T> image_batch(const glyph_dataset& ds, const std::vector<std::size_t>& indices) {
    tensor<T> out({indices.size(), 1, glyph_side, glyph_side});
    for (std::size_t b = 0; b < indices.size(); ++b) {
        const auto& img = ds.images.at(indices[b]);
        auto dst = out.sample(b);
        for (std::size_t i = 0; i < glyph_pixels; ++i) {
            dst[i] = T(img.levels[i]) / T(255);
        }
    }
    return out;
}

// GLY1 layout (little-endian):
//   "GLY1" | version u16 | count u32 | width u16 | height u16 |
//   count x { codepoint u32 | width*height x u8 }
inline constexpr std::string_view gly_magic = "GLY1";
inline constexpr std::uint16_t gly_version = 1;

inline std::string encode_dataset(const glyph_dataset& ds) {
    io::byte_writer w;
    w.magic(gly_magic);
    w.u16(gly_version);
    w.u32(std::uint32_t(ds.images.size()));
    w.u16(glyph_side);
    w.u16(glyph_side);
    for (const auto& img : ds.images) {
        w.u32(std::uint32_t(img.codepoint));
        w.raw(img.levels.data(), img.levels.size());
    }
    return w.bytes();
}

inline glyph_dataset decode_dataset(std::string_view bytes, const std::string& what = "GLY1") {
    io::byte_reader r(bytes, what);
    r.expect_magic(gly_magic);
    if (auto v = r.u16(); v != gly_version) {
        throw data_error(what + ": unsupported version " + std::to_string(v));
    }
    const auto count = r.u32();
    const auto width = r.u16(), height = r.u16();
    if (width != glyph_side || height != glyph_side) {
        throw data_error(what + ": glyph size " + std::to_string(width) + "x" + std::to_string(height) +
                         " is not 64x64");
    }
    const std::size_t record = 4 + glyph_pixels;
    if (r.remaining() != std::size_t(count) * record) {
        throw data_error(what + ": truncated or padded payload, header count " + std::to_string(count) +
                         " needs " + std::to_string(std::size_t(count) * record) + " bytes, found " +
                         std::to_string(r.remaining()));
    }
    glyph_dataset ds;
    std::vector<char32_t> cps;
    ds.images.resize(count);
    for (auto& img : ds.images) {
        img.codepoint = char32_t(r.u32());
        r.raw(img.levels.data(), glyph_pixels, "glyph pixels");
        cps.push_back(img.codepoint);
    }
    if (!std::is_sorted(cps.begin(), cps.end()) || std::adjacent_find(cps.begin(), cps.end()) != cps.end()) {
        throw data_error(what + ": glyph codepoints are not strictly increasing");
    }
    try {
        ds.chars = charset(std::move(cps));
    } catch (const config_error& e) {
        throw data_error(what + ": " + e.what());
    }
    return ds;
}

inline nlohmann::json dataset_metadata(const glyph_dataset& ds) {
    std::vector<std::uint32_t> fallback(ds.fallbacks.begin(), ds.fallbacks.end());
    return {{"format", "GLY1"},
            {"count", ds.images.size()},
            {"font_id", ds.font_id},
            {"charset_sha256", to_hex(ds.chars.hash())},
            {"fallback_codepoints", fallback}};
}

/// Writes the GLY1 file and a JSON sidecar (<path>.json) with provenance.
inline void save_dataset(const glyph_dataset& ds, const std::filesystem::path& path) {
    io::write_file(path, encode_dataset(ds));
    io::write_file(path.string() + ".json", dataset_metadata(ds).dump(2) + "\n");
}

inline glyph_dataset load_dataset(const std::filesystem::path& path) {
    auto ds = decode_dataset(io::read_file(path), path.string());
    const std::filesystem::path side = path.string() + ".json";
    if (std::filesystem::exists(side)) {
        const auto meta = nlohmann::json::parse(io::read_file(side), nullptr, false);
        if (!meta.is_discarded()) {
            ds.font_id = meta.value("font_id", "");
            for (auto cp : meta.value("fallback_codepoints", std::vector<std::uint32_t>{})) {
                ds.fallbacks.push_back(char32_t(cp));
            }
        }
    }
    return ds;
}

} // namespace gel::glyphset
