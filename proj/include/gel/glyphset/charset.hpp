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

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gel/core/binary_io.hpp"
#include "gel/core/error.hpp"
#include "gel/core/hash.hpp"
#include "gel/glyphset/jis_kanji.hpp"

namespace gel::glyphset {

/// Placeholder glyph for characters outside the inventory (geta mark).
inline constexpr char32_t geta_mark = U'〓';

/*!
 * \brief Sorted, duplicate-free character inventory.
 *
 * The geta mark is always a member and doubles as the unknown character.
 * The pad sentinel is the index one past the last entry; it has no glyph.
 */
class charset {
public:
    charset() = default;

    explicit charset(std::vector<char32_t> entries) : entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end());
        entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
        if (!index_of(geta_mark)) {
            throw config_error("charset: the unknown-character mark U+3013 must be a member");
        }
    }

    const std::vector<char32_t>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    char32_t operator[](std::size_t i) const { return entries_[i]; }

    std::optional<std::size_t> index_of(char32_t cp) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), cp);
        if (it == entries_.end() || *it != cp) {
            return std::nullopt;
        }
        return std::size_t(it - entries_.begin());
    }

    bool contains(char32_t cp) const { return index_of(cp).has_value(); }

    /// Index of cp, or of the geta mark when cp is not a member.
    std::size_t index_or_unknown(char32_t cp) const { return index_of(cp).value_or(unknown_index()); }

    std::size_t unknown_index() const { return *index_of(geta_mark); }
    std::size_t pad_index() const noexcept { return entries_.size(); }

    /// SHA-256 over the little-endian u32 codepoints.
    digest256 hash() const {
        io::byte_writer w;
        for (auto cp : entries_) {
            w.u32(std::uint32_t(cp));
        }
        return sha256(w.bytes());
    }

    /// Up to k members closest to cp by codepoint distance (ties: lower first).
    std::vector<char32_t> nearest(char32_t cp, std::size_t k) const {
        std::vector<char32_t> out(entries_);
        auto dist = [cp](char32_t c) { return c > cp ? c - cp : cp - c; };
        std::stable_sort(out.begin(), out.end(), [&](char32_t a, char32_t b) { return dist(a) < dist(b); });
        out.resize(std::min(k, out.size()));
        return out;
    }

    friend bool operator==(const charset&, const charset&) = default;

private:
    std::vector<char32_t> entries_;
};

/*!
 * \brief The default inventory of 6,631 characters.
 *
 * JIS X 0208 level-1 and level-2 kanji (6,355), hiragana (83), katakana (86),
 * printable ASCII without space (94), the geta mark, and twelve common
 * Japanese punctuation marks.
 */
inline charset build_default_charset() {
    std::vector<char32_t> cps(detail::jis_kanji.begin(), detail::jis_kanji.end());
    for (char32_t c = U'ぁ'; c <= U'ん'; ++c) { // ぁ..ん
        cps.push_back(c);
    }
    for (char32_t c = U'ァ'; c <= U'ヶ'; ++c) { // ァ..ヶ
        cps.push_back(c);
    }
    for (char32_t c = 0x21; c <= 0x7E; ++c) {
        cps.push_back(c);
    }
    cps.push_back(geta_mark);
    for (char32_t c : {U'、', U'。', U'・', U'ー', U'「', U'」', U'『', U'』', U'【', U'】', U'〜', U'…'}) {
        cps.push_back(c);
    }
    return charset(std::move(cps));
}

/// Evenly strided subset of n entries that always keeps the geta mark.
inline charset subset_charset(const charset& full, std::size_t n) {
    if (n < 1 || n > full.size()) {
        throw config_error("subset: size " + std::to_string(n) + " outside [1, " + std::to_string(full.size()) + "]");
    }
    std::vector<char32_t> others;
    for (auto cp : full.entries()) {
        if (cp != geta_mark) {
            others.push_back(cp);
        }
    }
    std::vector<char32_t> picked{geta_mark};
    const std::size_t want = n - 1;
    for (std::size_t i = 0; i < want; ++i) {
        picked.push_back(others[i * others.size() / want]);
    }
    return charset(std::move(picked));
}

} // namespace gel::glyphset
