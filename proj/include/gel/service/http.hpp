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

#include <filesystem>
#include <string>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "gel/service/explorer.hpp"

namespace gel::service {

inline void send(httplib::Response& res, const response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
}

/// Registers the /api routes, permissive CORS headers and an optional static directory.
inline void mount(httplib::Server& server, const explorer& ex, const std::filesystem::path& static_dir = {}) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/api/info", [&ex](const httplib::Request&, httplib::Response& res) { send(res, ex.info()); });
    server.Get("/api/chars", [&ex](const httplib::Request& req, httplib::Response& res) {
        std::size_t page = 0, size = 100;
        try {
            if (req.has_param("page")) {
                page = std::stoul(req.get_param_value("page"));
            }
            if (req.has_param("page_size")) {
                size = std::stoul(req.get_param_value("page_size"));
            }
        } catch (const std::exception&) {
            send(res, response::error(400, "page and page_size must be nonnegative integers"));
            return;
        }
        send(res, ex.chars(req.get_param_value("query"), page, size));
    });
    server.Get(R"(/api/embedding/(.+))", [&ex](const httplib::Request& req, httplib::Response& res) {
        send(res, ex.embedding(req.matches[1]));
    });
    server.Post("/api/decode", [&ex](const httplib::Request& req, httplib::Response& res) {
        send(res, ex.decode(req.body));
    });
    server.Post("/api/neighbors", [&ex](const httplib::Request& req, httplib::Response& res) {
        send(res, ex.neighbors(req.body));
    });
    server.Post("/api/ssa_preview", [&ex](const httplib::Request& req, httplib::Response& res) {
        send(res, ex.ssa_preview(req.body));
    });
    server.Post("/api/classify", [&ex](const httplib::Request& req, httplib::Response& res) {
        send(res, ex.classify(req.body));
    });
    server.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        }
        spdlog::error("{} {}: {}", req.method, req.path, what);
        send(res, response::error(500, what));
    });
    if (!static_dir.empty()) {
        if (!server.set_mount_point("/", static_dir.string())) {
            throw config_error("service: static directory " + static_dir.string() + " does not exist");
        }
    }
}

} // namespace gel::service
