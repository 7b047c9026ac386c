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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "gel/core/error.hpp"

namespace gel::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

/// Appends little-endian fields to a byte buffer.
class byte_writer {
public:
    void u8(std::uint8_t v) { bytes_.push_back(char(v)); }
    void u16(std::uint16_t v) { raw(&v, 2); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void f32(float v) { raw(&v, 4); }
    void magic(std::string_view m) { bytes_.append(m); }
    void raw(const void* p, std::size_t n) { bytes_.append(static_cast<const char*>(p), n); }

    const std::string& bytes() const noexcept { return bytes_; }

private:
    std::string bytes_;
};

/// Reads little-endian fields; every short read is a truncation error.
class byte_reader {
public:
    byte_reader(std::string_view bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

    void expect_magic(std::string_view m) {
        need(m.size(), "magic");
        if (bytes_.substr(pos_, m.size()) != m) {
            throw data_error(what_ + ": bad magic, expected \"" + std::string(m) + "\"");
        }
        pos_ += m.size();
    }

    std::uint8_t u8() { return read<std::uint8_t>("u8"); }
    std::uint16_t u16() { return read<std::uint16_t>("u16"); }
    std::uint32_t u32() { return read<std::uint32_t>("u32"); }
    float f32() { return read<float>("f32"); }

    void raw(void* dst, std::size_t n, const char* field) {
        need(n, field);
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    std::size_t position() const noexcept { return pos_; }
    const std::string& what() const noexcept { return what_; }

    void expect_end() const {
        if (remaining()) {
            throw data_error(what_ + ": " + std::to_string(remaining()) + " trailing bytes after payload");
        }
    }

private:
    template <typename U>
    U read(const char* field) {
        U v;
        raw(&v, sizeof(U), field);
        return v;
    }

    void need(std::size_t n, const char* field) const {
        if (bytes_.size() - pos_ < n) {
            throw data_error(what_ + ": truncated while reading " + field + " at offset " + std::to_string(pos_));
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
    std::string what_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw data_error("cannot open '" + path.string() + "' for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw data_error("cannot open '" + path.string() + "' for writing");
    }
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) {
        throw data_error("write failed for '" + path.string() + "'");
    }
}

} // namespace gel::io
