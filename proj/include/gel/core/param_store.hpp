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
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gel/core/error.hpp"
#include "gel/core/tensor.hpp"

namespace gel {

/// One trainable tensor with its gradient and Adam moments.
template <typename T>
struct parameter {
    std::string name;
    tensor<T> value;
    tensor<T> grad;
    tensor<T> first_moment;
    tensor<T> second_moment;
    std::size_t fan_in = 0; ///< 0 for biases
};

/*!
 * \brief Ordered collection of named parameters.
 *
 * Parameters live behind stable pointers so layers can hold references to
 * them for the lifetime of the store.
 */
template <typename T>
class param_store {
public:
    param_store() = default;
    param_store(const param_store&) = delete;
    param_store& operator=(const param_store&) = delete;
    param_store(param_store&&) noexcept = default;
    param_store& operator=(param_store&&) noexcept = default;

    parameter<T>& add(const std::string& name, shape_t shape, std::size_t fan_in) {
        if (index_.count(name)) {
            throw config_error("param_store: duplicate parameter name '" + name + "'");
        }
        auto p = std::make_unique<parameter<T>>();
        p->name = name;
        p->value = tensor<T>(shape);
        p->grad = tensor<T>(shape);
        p->first_moment = tensor<T>(shape);
        p->second_moment = tensor<T>(shape);
        p->fan_in = fan_in;
        index_[name] = params_.size();
        params_.push_back(std::move(p));
        return *params_.back();
    }

    parameter<T>* find(const std::string& name) {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : params_[it->second].get();
    }
    const parameter<T>* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : params_[it->second].get();
    }

    parameter<T>& at(const std::string& name) {
        if (auto* p = find(name)) {
            return *p;
        }
        throw config_error("param_store: no parameter named '" + name + "'");
    }

    std::size_t size() const noexcept { return params_.size(); }
    parameter<T>& operator[](std::size_t i) { return *params_[i]; }
    const parameter<T>& operator[](std::size_t i) const { return *params_[i]; }

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.cbegin(); }
    auto end() const { return params_.cend(); }

    std::size_t element_count() const {
        std::size_t n = 0;
        for (const auto& p : params_) {
            n += p->value.size();
        }
        return n;
    }

    void zero_grad() {
        for (auto& p : params_) {
            p->grad.zero();
        }
    }

    std::uint64_t step_count() const noexcept { return steps_; }
    void set_step_count(std::uint64_t s) noexcept { steps_ = s; }

    /// He-uniform weights (bound sqrt(6 / fan_in)), zero biases.
    void init_he_uniform(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        for (auto& p : params_) {
            p->first_moment.zero();
            p->second_moment.zero();
            p->grad.zero();
            if (p->fan_in == 0) {
                p->value.zero();
                continue;
            }
            const double bound = std::sqrt(6.0 / double(p->fan_in));
            std::uniform_real_distribution<double> dist(-bound, bound);
            for (auto& v : p->value) {
                v = T(dist(rng));
            }
        }
        steps_ = 0;
    }

    void zero_values() {
        for (auto& p : params_) {
            p->value.zero();
        }
    }

    /// Copies values (not optimizer state) from a store with identical layout.
    template <typename U>
    void copy_values_from(const param_store<U>& other) {
        if (other.size() != size()) {
            throw config_error("param_store: layout mismatch on copy");
        }
        for (std::size_t i = 0; i < size(); ++i) {
            auto& dst = (*this)[i];
            const auto& src = other[i];
            if (dst.name != src.name || dst.value.shape() != src.value.shape()) {
                throw config_error("param_store: layout mismatch at '" + dst.name + "'");
            }
            for (std::size_t j = 0; j < dst.value.size(); ++j) {
                dst.value[j] = T(src.value[j]);
            }
        }
    }

    std::vector<tensor<T>> snapshot() const {
        std::vector<tensor<T>> out;
        out.reserve(params_.size());
        for (const auto& p : params_) {
            out.push_back(p->value);
        }
        return out;
    }

    void restore(const std::vector<tensor<T>>& values) {
        for (std::size_t i = 0; i < params_.size(); ++i) {
            params_[i]->value = values.at(i);
        }
    }

private:
    std::vector<std::unique_ptr<parameter<T>>> params_;
    std::map<std::string, std::size_t> index_;
    std::uint64_t steps_ = 0;
};

struct adam_options {
    double lr = 1e-4;
    double weight_decay = 0.0; ///< decoupled (AdamW-style)
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam update using the gradients held in the store.
template <typename T>
void adam_step(param_store<T>& store, const adam_options& opt) {
    for (const auto& p : store) {
        if (!p->grad.all_finite()) {
            throw numerical_error("adam_step: non-finite gradient in parameter '" + p->name + "'");
        }
    }
    store.set_step_count(store.step_count() + 1);
    const double t = double(store.step_count());
    const double c1 = 1.0 - std::pow(opt.beta1, t);
    const double c2 = 1.0 - std::pow(opt.beta2, t);
    for (auto& p : store) {
        T* w = p->value.data();
        const T* g = p->grad.data();
        T* m = p->first_moment.data();
        T* v = p->second_moment.data();
        for (std::size_t i = 0, n = p->value.size(); i < n; ++i) {
            m[i] = T(opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i]);
            v[i] = T(opt.beta2 * v[i] + (1.0 - opt.beta2) * double(g[i]) * g[i]);
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            w[i] = T(w[i] - opt.lr * (m_hat / (std::sqrt(v_hat) + opt.eps) + opt.weight_decay * w[i]));
        }
    }
}

} // namespace gel
