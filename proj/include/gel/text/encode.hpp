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

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "gel/glyphset/charset.hpp"
#include "gel/text/utf8.hpp"

namespace gel::text {

/// Fixed-length charset-index sequence; pad_index() fills the tail.
struct encoded_sample {
    std::vector<std::uint32_t> indices;
    std::size_t label = 0;
};

/// Maps code points to charset indices (unknown -> geta mark).
inline std::vector<std::uint32_t> to_indices(std::u32string_view cps, const glyphset::charset& cs) {
    std::vector<std::uint32_t> out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
        out.push_back(std::uint32_t(cs.index_or_unknown(fold_width(cp))));
    }
    return out;
}

/// First c indices of seq starting at offset, right-padded.
inline std::vector<std::uint32_t> window(const std::vector<std::uint32_t>& seq, std::size_t offset, std::size_t c,
                                         std::uint32_t pad) {
    std::vector<std::uint32_t> out(c, pad);
    for (std::size_t i = 0; i < c && offset + i < seq.size(); ++i) {
        out[i] = seq[offset + i];
    }
    return out;
}

inline encoded_sample encode_text(std::string_view utf8, std::size_t label, const glyphset::charset& cs,
                                  std::size_t c) {
    return {window(to_indices(decode_utf8(utf8), cs), 0, c, std::uint32_t(cs.pad_index())), label};
}

enum class crop_mode { random_crop, slide_all };

/// Length-c windows of a text: one uniformly placed crop, or every stride-1 window.
template <std::uniform_random_bit_generator Rng>
std::vector<encoded_sample> crop_windows(std::string_view utf8, std::size_t label, const glyphset::charset& cs,
                                         std::size_t c, crop_mode mode, Rng& rng) {
    const auto seq = to_indices(decode_utf8(utf8), cs);
    const auto pad = std::uint32_t(cs.pad_index());
    const std::size_t count = seq.size() > c ? seq.size() - c + 1 : 1;
    std::vector<encoded_sample> out;
    if (mode == crop_mode::random_crop) {
        std::uniform_int_distribution<std::size_t> pos(0, count - 1);
        out.push_back({window(seq, pos(rng), c, pad), label});
        return out;
    }
    for (std::size_t o = 0; o < count; ++o) {
        out.push_back({window(seq, o, c, pad), label});
    }
    return out;
}

inline std::vector<encoded_sample> slide_all(std::string_view utf8, std::size_t label, const glyphset::charset& cs,
                                             std::size_t c) {
    std::mt19937_64 unused(0);
    return crop_windows(utf8, label, cs, c, crop_mode::slide_all, unused);
}

} // namespace gel::text
