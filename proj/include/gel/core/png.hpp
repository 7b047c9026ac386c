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

#include <png.h>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gel/core/error.hpp"

namespace gel {

/// 8-bit grayscale raster, row-major.
struct gray_image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Encodes a grayscale image as PNG. Output depends only on the pixels.
inline std::string encode_png(const gray_image& img) {
    if (img.pixels.size() != img.width * img.height || img.width == 0 || img.height == 0) {
        throw config_error("encode_png: pixel buffer does not match " + std::to_string(img.width) + "x" +
                           std::to_string(img.height));
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("encode_png: libpng initialization failed");
    }
    std::string out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("encode_png: libpng write failed");
    }
    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t n) {
            static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(data), n);
        },
        nullptr);
    png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < img.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(img.pixels.data() + y * img.width));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

/// Decodes an 8-bit grayscale PNG (used by tests and tools).
inline gray_image decode_png(const std::string& bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw data_error(std::string("decode_png: ") + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    gray_image out{image.width, image.height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(image))};
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw data_error(std::string("decode_png: ") + image.message);
    }
    return out;
}

/// Tiles equally sized images into a rows x cols grid.
inline gray_image tile_images(std::span<const gray_image> tiles, std::size_t cols) {
    if (tiles.empty() || cols == 0) {
        throw config_error("tile_images: nothing to tile");
    }
    const std::size_t w = tiles[0].width, h = tiles[0].height, rows = (tiles.size() + cols - 1) / cols;
    gray_image grid{w * cols, h * rows, std::vector<std::uint8_t>(w * cols * h * rows, 0)};
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        const std::size_t r = i / cols, c = i % cols;
        for (std::size_t y = 0; y < h; ++y) {
            std::copy_n(tiles[i].pixels.data() + y * w, w, grid.pixels.data() + (r * h + y) * grid.width + c * w);
        }
    }
    return grid;
}

} // namespace gel
