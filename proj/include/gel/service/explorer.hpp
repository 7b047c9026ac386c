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
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "gel/clcnn/evaluate.hpp"
#include "gel/core/png.hpp"
#include "gel/text/utf8.hpp"
#include "gel/vce/traverse.hpp"

namespace gel::service {

inline constexpr double z_limit = 4.0;  ///< decode clamps, ssa_preview rejects beyond this
inline constexpr std::size_t default_port = 8307;

struct response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;

    static response json(const nlohmann::json& j, int status = 200) { return {status, "application/json", j.dump()}; }
    static response error(int status, const std::string& message, nlohmann::json extra = nlohmann::json::object()) {
        extra["error"] = message;
        return json(extra, status);
    }
};

inline std::string base64(std::string_view bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()), int(bytes.size()));
    out.resize(std::size_t(n));
    return out;
}

struct neighbor {
    std::size_t index = 0;
    double distance = 0;
};

/// Exhaustive k-nearest search over table means; ties go to the lower charset index.
inline std::vector<neighbor> nearest(const vce::embedding_table& table, std::span<const double> z, std::size_t k) {
    std::vector<neighbor> all(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto mu = table.mu(i);
        double d2 = 0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            d2 += (double(mu[j]) - z[j]) * (double(mu[j]) - z[j]);
        }
        all[i] = {i, std::sqrt(d2)};
    }
    k = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + std::ptrdiff_t(k), all.end(), [](const neighbor& a, const neighbor& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
    });
    all.resize(k);
    return all;
}

/*!
 * \brief Request handlers over an immutable model, table and optional classifier.
 *
 * Handlers take already-extracted request parts and return a complete
 * response, so they can be exercised without a socket.
 */
class explorer {
public:
    struct classifier {
        clcnn::text_classifier<float> model;
        std::vector<std::string> categories;
    };

    explorer(vce::glyph_autoencoder<float> model, std::string model_charset_sha256, vce::embedding_table table,
             std::optional<classifier> clf = std::nullopt, std::string clf_table_sha256 = {})
        : model_(std::move(model)), table_(std::move(table)), clf_(std::move(clf)), stats_(vce::statistics(table_)) {
        const auto table_hash = to_hex(table_.charset_hash());
        if (model_charset_sha256 != table_hash) {
            throw data_error("service: model charset " + model_charset_sha256 + " does not match table charset " +
                             table_hash);
        }
        if (table_.dim() != model_.latent_dim()) {
            throw data_error("service: table dimension " + std::to_string(table_.dim()) + " differs from model " +
                             std::to_string(model_.latent_dim()));
        }
        if (clf_) {
            if (clf_table_sha256 != table_hash) {
                throw data_error("service: classifier was trained on table charset " + clf_table_sha256 +
                                 ", serving " + table_hash);
            }
            if (clf_->model.shape().embed_dim != table_.dim()) {
                throw data_error("service: classifier expects " + std::to_string(clf_->model.shape().embed_dim) +
                                 "-dim embeddings");
            }
        }
        active_ = stats_.active_dims();
    }

    const vce::embedding_table& table() const noexcept { return table_; }

    response info() const {
        nlohmann::json j{{"latent_dim", table_.dim()},
                         {"charset_size", table_.size()},
                         {"charset_sha256", to_hex(table_.charset_hash())},
                         {"active_dims", active_},
                         {"stats", stats_.to_json()},
                         {"z_limit", z_limit},
                         {"classifier", bool(clf_)}};
        if (clf_) {
            j["categories"] = clf_->categories;
            j["window"] = clf_->model.shape().window;
        }
        return response::json(j);
    }

    /// GET /api/chars: members matching any character of query (all members when empty), paged.
    response chars(const std::string& query, std::size_t page = 0, std::size_t page_size = 100) const {
        if (page_size < 1 || page_size > 1000) {
            return response::error(400, "page_size must lie in [1, 1000]");
        }
        std::vector<std::size_t> hits;
        if (query.empty()) {
            hits.resize(table_.size());
            std::iota(hits.begin(), hits.end(), std::size_t{0});
        } else {
            for (char32_t cp : text::decode_utf8(query)) {
                if (auto i = table_.chars().index_of(cp); i && std::find(hits.begin(), hits.end(), *i) == hits.end()) {
                    hits.push_back(*i);
                }
            }
        }
        nlohmann::json items = nlohmann::json::array();
        for (std::size_t k = page * page_size; k < std::min(hits.size(), (page + 1) * page_size); ++k) {
            const auto i = hits[k];
            const auto mu = table_.mu(i);
            std::vector<float> active;
            for (auto d : active_) {
                active.push_back(mu[d]);
            }
            items.push_back({{"codepoint", glyphset::format_codepoint(table_.chars()[i])},
                             {"char", text::encode_utf8(std::u32string(1, table_.chars()[i]))},
                             {"mu", std::vector<float>(mu.begin(), mu.end())},
                             {"active_mu", active}});
        }
        return response::json({{"total", hits.size()}, {"page", page}, {"page_size", page_size}, {"items", items}});
    }

    /// GET /api/embedding/{char}; 404 with nearby members for characters outside the charset.
    response embedding(const std::string& ch) const {
        const auto cp = single_char(ch);
        if (!cp) {
            return response::error(400, "expected exactly one character, got '" + ch + "'");
        }
        const auto i = table_.chars().index_of(*cp);
        if (!i) {
            return not_in_charset(*cp);
        }
        const auto mu = table_.mu(*i), sg = table_.sigma(*i);
        return response::json({{"char", ch},
                               {"codepoint", glyphset::format_codepoint(*cp)},
                               {"mu", std::vector<float>(mu.begin(), mu.end())},
                               {"sigma", std::vector<float>(sg.begin(), sg.end())}});
    }

    /// POST /api/decode {z}: 64x64 grayscale PNG of the reconstruction; z clamped to [-4, 4].
    response decode(const std::string& body) const {
        const auto req = parse(body);
        if (!req) {
            return response::error(400, "request body is not valid JSON");
        }
        std::vector<double> z;
        if (auto err = read_z(*req, z)) {
            return *err;
        }
        return {200, "image/png", render(z)};
    }

    /// POST /api/neighbors {z, k}
    response neighbors(const std::string& body) const {
        const auto req = parse(body);
        if (!req) {
            return response::error(400, "request body is not valid JSON");
        }
        std::vector<double> z;
        if (auto err = read_z(*req, z)) {
            return *err;
        }
        const auto k = req->value("k", nlohmann::json(10));
        if (!k.is_number_integer() || k.get<long long>() < 0) {
            return response::error(400, "k must be a nonnegative integer");
        }
        return response::json({{"neighbors", neighbor_json(nearest(table_, z, k.get<std::size_t>()))}});
    }

    /// POST /api/ssa_preview {char, dim, u}: mu(char) shifted by u along dim, decoded, with neighbors.
    response ssa_preview(const std::string& body) const {
        const auto req = parse(body);
        if (!req) {
            return response::error(400, "request body is not valid JSON");
        }
        if (!req->contains("char") || !(*req)["char"].is_string()) {
            return response::error(400, "char must be a one-character string");
        }
        const auto ch = (*req)["char"].get<std::string>();
        const auto cp = single_char(ch);
        if (!cp) {
            return response::error(400, "expected exactly one character, got '" + ch + "'");
        }
        const auto dim = req->value("dim", nlohmann::json());
        if (!dim.is_number_integer() || dim.get<long long>() < 0 || dim.get<std::size_t>() >= table_.dim()) {
            return response::error(400, "dim must be an integer in [0, " + std::to_string(table_.dim()) + ")");
        }
        const auto u = req->value("u", nlohmann::json());
        if (!u.is_number() || !std::isfinite(u.get<double>()) || std::abs(u.get<double>()) > z_limit) {
            return response::error(400, "u must be a finite number with |u| <= " + std::to_string(z_limit));
        }
        const auto i = table_.chars().index_of(*cp);
        if (!i) {
            return not_in_charset(*cp);
        }
        const auto mu = table_.mu(*i);
        std::vector<double> z(mu.begin(), mu.end());
        z[dim.get<std::size_t>()] += u.get<double>();
        return response::json({{"png", base64(render(z))}, {"z", z}, {"neighbors", neighbor_json(nearest(table_, z, 8))}});
    }

    /// POST /api/classify {text}: sliding-window classification; 503 without a classifier.
    response classify(const std::string& body) const {
        if (!clf_) {
            return response::error(503, "no classifier loaded (start the service with --clf)");
        }
        const auto req = parse(body);
        if (!req) {
            return response::error(400, "request body is not valid JSON");
        }
        if (!req->contains("text") || !(*req)["text"].is_string() || (*req)["text"].get<std::string>().empty()) {
            return response::error(400, "text must be a non-empty string");
        }
        const auto r = clcnn::evaluate_sliding(clf_->model, table_, (*req)["text"].get<std::string>());
        nlohmann::json j{{"label", r.label}, {"probs", r.mean_probs}, {"windows", r.window_probs}};
        if (r.label < clf_->categories.size()) {
            j["category"] = clf_->categories[r.label];
        }
        return response::json(j);
    }

private:
    static std::optional<nlohmann::json> parse(const std::string& body) {
        auto j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            return std::nullopt;
        }
        return j;
    }

    static std::optional<char32_t> single_char(const std::string& s) {
        const auto cps = text::decode_utf8(s);
        if (cps.size() != 1 || cps[0] == text::replacement_char) {
            return std::nullopt;
        }
        return cps[0];
    }

    std::optional<response> read_z(const nlohmann::json& req, std::vector<double>& z) const {
        const std::string want = "z must be an array of " + std::to_string(table_.dim()) + " finite numbers";
        if (!req.contains("z") || !req["z"].is_array()) {
            return response::error(400, want);
        }
        if (req["z"].size() != table_.dim()) {
            return response::error(400, want + ", got length " + std::to_string(req["z"].size()),
                                   {{"expected_length", table_.dim()}});
        }
        for (const auto& v : req["z"]) {
            if (!v.is_number() || !std::isfinite(v.get<double>())) {
                return response::error(400, want);
            }
            z.push_back(v.get<double>());
        }
        return std::nullopt;
    }

    std::string render(std::vector<double> z) const {
        tensor<float> batch({1, z.size()});
        for (std::size_t i = 0; i < z.size(); ++i) {
            batch[i] = float(std::clamp(z[i], -z_limit, z_limit));
        }
        return encode_png(vce::to_gray_images(model_.decode(batch))[0]);
    }

    nlohmann::json neighbor_json(const std::vector<neighbor>& ns) const {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& n : ns) {
            const char32_t cp = table_.chars()[n.index];
            out.push_back({{"char", text::encode_utf8(std::u32string(1, cp))},
                           {"codepoint", glyphset::format_codepoint(cp)},
                           {"distance", n.distance}});
        }
        return out;
    }

    response not_in_charset(char32_t cp) const {
        std::vector<std::string> near;
        for (auto c : table_.chars().nearest(cp, 5)) {
            near.push_back(glyphset::format_codepoint(c));
        }
        return response::error(404, "character " + glyphset::format_codepoint(cp) + " is not in the charset",
                               {{"nearest", near}});
    }

    vce::glyph_autoencoder<float> model_;
    vce::embedding_table table_;
    std::optional<classifier> clf_;
    vce::table_statistics stats_;
    std::vector<std::size_t> active_;
};

} // namespace gel::service
