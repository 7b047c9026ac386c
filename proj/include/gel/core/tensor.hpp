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
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gel/core/error.hpp"

namespace gel {

using shape_t = std::vector<std::size_t>;

inline std::size_t shape_size(const shape_t& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string to_string(const shape_t& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) {
            out += "x";
        }
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

/*!
 * \brief Dense row-major tensor.
 *
 * The first dimension is the batch dimension for every layer in this
 * library; sample_size() is the per-sample element count.
 */
template <typename T>
class tensor {
public:
    using value_type = T;

    tensor() = default;

    explicit tensor(shape_t shape, T fill = T{0}) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

    tensor(shape_t shape, std::vector<T> values) : shape_(std::move(shape)), data_(std::move(values)) {
        if (data_.size() != shape_size(shape_)) {
            throw shape_error("tensor: " + std::to_string(data_.size()) + " values do not fill shape " + to_string(shape_));
        }
    }

    const shape_t& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    /// Elements per leading-dimension slice.
    std::size_t sample_size() const noexcept {
        return shape_.empty() || shape_[0] == 0 ? 0 : data_.size() / shape_[0];
    }

    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    std::span<T> sample(std::size_t n) noexcept { return {data_.data() + n * sample_size(), sample_size()}; }
    std::span<const T> sample(std::size_t n) const noexcept { return {data_.data() + n * sample_size(), sample_size()}; }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    /// Changes the shape while keeping the values; element count must agree.
    void reshape(shape_t shape) {
        if (shape_size(shape) != data_.size()) {
            throw shape_error("reshape: cannot view " + to_string(shape_) + " as " + to_string(shape));
        }
        shape_ = std::move(shape);
    }

    /// Reallocates if needed; contents are unspecified afterwards unless zeroed.
    void resize(shape_t shape) {
        data_.resize(shape_size(shape));
        shape_ = std::move(shape);
    }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }
    void zero() { fill(T{0}); }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
    }

    friend bool operator==(const tensor& a, const tensor& b) { return a.shape_ == b.shape_ && a.data_ == b.data_; }

private:
    shape_t shape_;
    std::vector<T> data_;
};

template <typename To, typename From>
tensor<To> tensor_cast(const tensor<From>& in) {
    std::vector<To> values(in.begin(), in.end());
    return tensor<To>(in.shape(), std::move(values));
}

template <typename T>
double squared_norm(std::span<const T> values) {
    double s = 0;
    for (T v : values) {
        s += double(v) * double(v);
    }
    return s;
}

} // namespace gel
