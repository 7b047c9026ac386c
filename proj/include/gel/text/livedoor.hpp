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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "gel/core/binary_io.hpp"
#include "gel/core/error.hpp"

namespace gel::text {

struct document {
    std::size_t label = 0;
    std::string title;  ///< UTF-8
    std::string body;
    std::string id;     ///< "<category>/<file name>", stable across machines
};

struct corpus {
    std::vector<std::string> categories;  ///< sorted; label indexes into this
    std::vector<document> docs;
};

struct load_report {
    std::map<std::string, std::size_t> per_category;
    std::size_t total = 0;
    std::vector<std::string> skipped;  ///< malformed files

    nlohmann::json to_json() const {
        return {{"per_category", per_category}, {"total", total}, {"skipped", skipped}};
    }
};

namespace detail {

inline std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find('\n', start);
        if (end == std::string::npos) {
            end = s.size();
        }
        std::string line = s.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
        start = end + 1;
    }
    if (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    return lines;
}

inline bool is_license(const std::filesystem::path& p) {
    return p.stem() == "LICENSE";
}

} // namespace detail

/*!
 * \brief Reads the livedoor news layout: one directory per category of
 * UTF-8 articles (URL, timestamp, title, body...).
 *
 * root may be the text/ directory itself or its parent. Files with fewer
 * than three lines are skipped and listed in the report.
 */
inline corpus load_livedoor(std::filesystem::path root, load_report* report = nullptr) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) {
        throw data_error("livedoor: corpus root " + root.string() + " is not a directory");
    }
    if (fs::is_directory(root / "text")) {
        root /= "text";
    }
    corpus c;
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory()) {
            c.categories.push_back(e.path().filename().string());
        }
    }
    std::sort(c.categories.begin(), c.categories.end());
    load_report rep;
    for (std::size_t label = 0; label < c.categories.size(); ++label) {
        const auto& cat = c.categories[label];
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(root / cat)) {
            if (e.is_regular_file() && e.path().extension() == ".txt" && !detail::is_license(e.path())) {
                files.push_back(e.path());
            }
        }
        std::sort(files.begin(), files.end());
        std::size_t n = 0;
        for (const auto& f : files) {
            const auto lines = detail::split_lines(io::read_file(f));
            const std::string id = cat + "/" + f.filename().string();
            if (lines.size() < 3 || lines[2].empty()) {
                spdlog::warn("livedoor: skipping {} ({} lines, title missing)", f.string(), lines.size());
                rep.skipped.push_back(id);
                continue;
            }
            document d{label, lines[2], {}, id};
            for (std::size_t i = 3; i < lines.size(); ++i) {
                d.body += lines[i];
                d.body += '\n';
            }
            c.docs.push_back(std::move(d));
            ++n;
        }
        rep.per_category[cat] = n;
    }
    rep.total = c.docs.size();
    if (report) {
        *report = std::move(rep);
    }
    if (c.docs.empty()) {
        throw data_error("livedoor: no documents found under " + root.string());
    }
    return c;
}

} // namespace gel::text
