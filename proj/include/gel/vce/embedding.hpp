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

#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gel/core/binary_io.hpp"
#include "gel/core/hash.hpp"
#include "gel/glyphset/dataset.hpp"
#include "gel/glyphset/rasterize.hpp"
#include "gel/vce/model.hpp"

namespace gel::vce {

/*!
 * \brief Per-character latent means and standard deviations.
 *
 * Rows are aligned with the charset. Looking up the pad index yields the
 * zero vector. A deterministic encoder stores sigma = 0.
 */
class embedding_table {
public:
    embedding_table() = default;

    embedding_table(glyphset::charset chars, std::size_t dim, std::vector<float> mu, std::vector<float> sigma)
        : chars_(std::move(chars)), dim_(dim), mu_(std::move(mu)), sigma_(std::move(sigma)) {
        if (mu_.size() != chars_.size() * dim_ || sigma_.size() != mu_.size()) {
            throw shape_error("embedding_table: " + std::to_string(mu_.size()) + " means for " +
                              std::to_string(chars_.size()) + " characters of dimension " + std::to_string(dim_));
        }
        zeros_.assign(dim_, 0.0f);
    }

    const glyphset::charset& chars() const noexcept { return chars_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return chars_.size(); }
    digest256 charset_hash() const { return chars_.hash(); }

    /// Mean vector for a charset index; the pad index maps to zeros.
    std::span<const float> mu(std::size_t index) const {
        if (index == chars_.pad_index()) {
            return zeros_;
        }
        check(index);
        return {mu_.data() + index * dim_, dim_};
    }

    std::span<const float> sigma(std::size_t index) const {
        if (index == chars_.pad_index()) {
            return zeros_;
        }
        check(index);
        return {sigma_.data() + index * dim_, dim_};
    }

    const std::vector<float>& means() const noexcept { return mu_; }
    const std::vector<float>& sigmas() const noexcept { return sigma_; }

    /// True when every sigma is positive, i.e. the table came from a variational encoder.
    bool variational() const {
        return !sigma_.empty() && std::all_of(sigma_.begin(), sigma_.end(), [](float s) { return s > 0; });
    }

    /// Index of a codepoint; config_error listing nearby members when absent.
    std::size_t require(char32_t cp) const {
        if (auto i = chars_.index_of(cp)) {
            return *i;
        }
        std::string near;
        for (auto c : chars_.nearest(cp, 5)) {
            near += (near.empty() ? "" : " ") + glyphset::format_codepoint(c);
        }
        throw config_error("character " + glyphset::format_codepoint(cp) + " is not in the charset; nearest: " + near);
    }

    friend bool operator==(const embedding_table& a, const embedding_table& b) {
        return a.chars_ == b.chars_ && a.dim_ == b.dim_ && a.mu_ == b.mu_ && a.sigma_ == b.sigma_;
    }

private:
    void check(std::size_t index) const {
        if (index >= chars_.size()) {
            throw config_error("embedding_table: index " + std::to_string(index) + " out of range");
        }
    }

    glyphset::charset chars_{{glyphset::geta_mark}};
    std::size_t dim_ = 0;
    std::vector<float> mu_, sigma_, zeros_;
};

// EMB1 layout (little-endian):
//   "EMB1" | version u16 | dim u32 | count u32 | charset sha256 (32 bytes) |
//   count x { codepoint u32 | dim x f32 mu | dim x f32 sigma }
inline constexpr std::string_view emb_magic = "EMB1";
inline constexpr std::uint16_t emb_version = 1;

inline std::string encode_embeddings(const embedding_table& t) {
    io::byte_writer w;
    w.magic(emb_magic);
    w.u16(emb_version);
    w.u32(std::uint32_t(t.dim()));
    w.u32(std::uint32_t(t.size()));
    const auto h = t.charset_hash();
    w.raw(h.data(), h.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        w.u32(std::uint32_t(t.chars()[i]));
        for (float v : t.mu(i)) {
            w.f32(v);
        }
        for (float v : t.sigma(i)) {
            w.f32(v);
        }
    }
    return w.bytes();
}

inline embedding_table decode_embeddings(std::string_view bytes, const std::string& what = "EMB1") {
    io::byte_reader r(bytes, what);
    r.expect_magic(emb_magic);
    if (auto v = r.u16(); v != emb_version) {
        throw data_error(what + ": unsupported version " + std::to_string(v));
    }
    const std::size_t dim = r.u32();
    const std::size_t count = r.u32();
    digest256 hash;
    r.raw(hash.data(), hash.size(), "charset hash");
    const std::size_t record = 4 + 8 * dim;
    if (r.remaining() != count * record) {
        throw data_error(what + ": truncated or padded payload, header count " + std::to_string(count) + " needs " +
                         std::to_string(count * record) + " bytes, found " + std::to_string(r.remaining()));
    }
    std::vector<char32_t> cps(count);
    std::vector<float> mu(count * dim), sigma(count * dim);
    for (std::size_t i = 0; i < count; ++i) {
        cps[i] = char32_t(r.u32());
        for (std::size_t j = 0; j < dim; ++j) {
            mu[i * dim + j] = r.f32();
        }
        for (std::size_t j = 0; j < dim; ++j) {
            sigma[i * dim + j] = r.f32();
        }
    }
    if (!std::is_sorted(cps.begin(), cps.end()) || std::adjacent_find(cps.begin(), cps.end()) != cps.end()) {
        throw data_error(what + ": codepoints are not strictly increasing");
    }
    glyphset::charset chars{{glyphset::geta_mark}};
    try {
        chars = glyphset::charset(std::move(cps));
    } catch (const config_error& e) {
        throw data_error(what + ": " + e.what());
    }
    if (chars.hash() != hash) {
        throw data_error(what + ": charset hash does not match the stored codepoints");
    }
    return {std::move(chars), dim, std::move(mu), std::move(sigma)};
}

inline void save_embeddings(const embedding_table& t, const std::filesystem::path& path) {
    io::write_file(path, encode_embeddings(t));
}

inline embedding_table load_embeddings(const std::filesystem::path& path) {
    return decode_embeddings(io::read_file(path), path.string());
}

/// Encodes every glyph of the dataset; mu and sigma come from the posterior.
inline embedding_table export_embeddings(const glyph_autoencoder<float>& model, const glyphset::glyph_dataset& ds,
                                         std::size_t chunk = 256) {
    const std::size_t d = model.latent_dim();
    std::vector<float> mu(ds.size() * d), sigma(ds.size() * d);
    for (std::size_t start = 0; start < ds.size(); start += chunk) {
        std::vector<std::size_t> idx;
        for (std::size_t i = start; i < std::min(ds.size(), start + chunk); ++i) {
            idx.push_back(i);
        }
        const auto post = model.encode(glyphset::image_batch<float>(ds, idx));
        for (std::size_t b = 0; b < idx.size(); ++b) {
            for (std::size_t j = 0; j < d; ++j) {
                const std::size_t o = idx[b] * d + j;
                mu[o] = post.mu[b * d + j];
                sigma[o] = model.variational() ? std::exp(0.5f * post.logvar[b * d + j]) : 0.0f;
            }
        }
    }
    return {ds.chars, d, std::move(mu), std::move(sigma)};
}

/// Summary of a table over the whole charset.
struct table_statistics {
    std::vector<double> mean;       ///< per-dimension mean of mu
    std::vector<double> stddev;     ///< per-dimension population std of mu
    std::vector<double> kl_per_dim; ///< mean KL per dimension; empty for deterministic tables
    double total_kl = 0;

    /// Dimensions whose mean KL exceeds the threshold (nats).
    std::vector<std::size_t> active_dims(double threshold = 0.1) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < kl_per_dim.size(); ++i) {
            if (kl_per_dim[i] > threshold) {
                out.push_back(i);
            }
        }
        return out;
    }

    nlohmann::json to_json() const {
        return {{"mean", mean}, {"stddev", stddev}, {"kl_per_dim", kl_per_dim}, {"total_kl", total_kl},
                {"active_dims", active_dims()}};
    }
};

inline table_statistics statistics(const embedding_table& t) {
    const std::size_t d = t.dim(), n = t.size();
    table_statistics s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 0.0);
    const bool var = t.variational();
    if (var) {
        s.kl_per_dim.assign(d, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto mu = t.mu(i), sg = t.sigma(i);
        for (std::size_t j = 0; j < d; ++j) {
            s.mean[j] += mu[j];
            if (var) {
                s.kl_per_dim[j] += kl_term(mu[j], sg[j]);
            }
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        s.mean[j] /= double(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto mu = t.mu(i);
        for (std::size_t j = 0; j < d; ++j) {
            s.stddev[j] += (mu[j] - s.mean[j]) * (mu[j] - s.mean[j]);
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        s.stddev[j] = std::sqrt(s.stddev[j] / double(n));
    }
    for (auto& k : s.kl_per_dim) {
        k /= double(n);
        s.total_kl += k;
    }
    return s;
}

} // namespace gel::vce
