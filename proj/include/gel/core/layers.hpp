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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gel/core/blas.hpp"
#include "gel/core/param_store.hpp"
#include "gel/core/tensor.hpp"

namespace gel {

/// Spatial output size of a strided convolution; 0 when the window does not fit.
constexpr std::size_t conv_out_size(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    return in + 2 * pad < k ? 0 : (in + 2 * pad - k) / stride + 1;
}

/// Spatial output size of a transposed convolution.
constexpr std::size_t deconv_out_size(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    return in == 0 || (in - 1) * stride + k < 2 * pad ? 0 : (in - 1) * stride + k - 2 * pad;
}

/// Pooling output length; 0 on underflow.
constexpr std::size_t pool_out_size(std::size_t in, std::size_t k, std::size_t stride) {
    return in < k ? 0 : (in - k) / stride + 1;
}

namespace detail {

// Output positions [lo, hi) whose input index o*s - p + kk lies inside [0, n).
inline std::pair<std::size_t, std::size_t> valid_range(std::size_t n, std::size_t out, std::size_t kk, std::size_t s,
                                                       std::size_t p) {
    const std::size_t lo = kk >= p ? 0 : (p - kk + s - 1) / s;
    const std::size_t end = n + p > kk ? (n + p - kk + s - 1) / s : 0;
    return {std::min(lo, out), std::min(std::max(end, lo), out)};
}

// col[(c*k + ki)*k + kj][oh*wo + ow] = img[c][oh*s - p + ki][ow*s - p + kj] (zero outside)
template <typename T>
void im2col(const T* img, std::size_t channels, std::size_t h, std::size_t w, std::size_t k, std::size_t s,
            std::size_t p, std::size_t ho, std::size_t wo, T* col) {
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t ki = 0; ki < k; ++ki) {
            const auto [hlo, hhi] = valid_range(h, ho, ki, s, p);
            for (std::size_t kj = 0; kj < k; ++kj) {
                const auto [wlo, whi] = valid_range(w, wo, kj, s, p);
                T* row = col + ((c * k + ki) * k + kj) * ho * wo;
                std::fill(row, row + hlo * wo, T{0});
                for (std::size_t oh = hlo; oh < hhi; ++oh) {
                    T* dst = row + oh * wo;
                    const T* src = img + (c * h + oh * s + ki - p) * w;
                    std::fill(dst, dst + wlo, T{0});
                    for (std::size_t ow = wlo; ow < whi; ++ow) {
                        dst[ow] = src[ow * s + kj - p];
                    }
                    std::fill(dst + whi, dst + wo, T{0});
                }
                std::fill(row + hhi * wo, row + ho * wo, T{0});
            }
        }
    }
}

// Adjoint of im2col: accumulates col back into img (img must be zeroed by the caller).
template <typename T>
void col2im(const T* col, std::size_t channels, std::size_t h, std::size_t w, std::size_t k, std::size_t s,
            std::size_t p, std::size_t ho, std::size_t wo, T* img) {
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t ki = 0; ki < k; ++ki) {
            const auto [hlo, hhi] = valid_range(h, ho, ki, s, p);
            for (std::size_t kj = 0; kj < k; ++kj) {
                const auto [wlo, whi] = valid_range(w, wo, kj, s, p);
                const T* row = col + ((c * k + ki) * k + kj) * ho * wo;
                for (std::size_t oh = hlo; oh < hhi; ++oh) {
                    const T* src = row + oh * wo;
                    T* dst = img + (c * h + oh * s + ki - p) * w;
                    for (std::size_t ow = wlo; ow < whi; ++ow) {
                        dst[ow * s + kj - p] += src[ow];
                    }
                }
            }
        }
    }
}

inline std::string describe(const std::string& layer, const std::string& kind) {
    return "layer '" + layer + "' (" + kind + ")";
}

} // namespace detail

/*!
 * \brief A differentiable layer acting on a batch (first dimension).
 *
 * Layers hold no activation state: backward receives the forward input and
 * output, so a built network can run concurrent inference calls.
 */
template <typename T>
class layer {
public:
    explicit layer(std::string name) : name_(std::move(name)) {}
    virtual ~layer() = default;

    const std::string& name() const noexcept { return name_; }
    virtual std::string kind() const = 0;

    /// Per-sample output shape; throws shape_error naming this layer.
    virtual shape_t output_shape(const shape_t& in) const = 0;

    virtual void forward(const tensor<T>& in, tensor<T>& out) const = 0;

    /// Accumulates parameter gradients; writes grad_in unless it is null.
    virtual void backward(const tensor<T>& in, const tensor<T>& out, const tensor<T>& grad_out,
                          tensor<T>* grad_in) = 0;

protected:
    [[noreturn]] void shape_fail(const std::string& what, const shape_t& got) const {
        throw shape_error(detail::describe(name_, kind()) + ": " + what + ", got per-sample input " + to_string(got));
    }

    static shape_t batch_shape(std::size_t n, const shape_t& sample) {
        shape_t s{n};
        s.insert(s.end(), sample.begin(), sample.end());
        return s;
    }

private:
    std::string name_;
};

template <typename T>
class conv2d final : public layer<T> {
public:
    conv2d(param_store<T>& store, const std::string& name, std::size_t in_channels, std::size_t out_channels,
           std::size_t kernel, std::size_t stride, std::size_t pad)
        : layer<T>(name), cin_(in_channels), cout_(out_channels), k_(kernel), s_(stride), p_(pad),
          weight_(&store.add(name + ".weight", {out_channels, in_channels, kernel, kernel}, in_channels * kernel * kernel)),
          bias_(&store.add(name + ".bias", {out_channels}, 0)) {}

    std::string kind() const override { return "conv2d"; }

    shape_t output_shape(const shape_t& in) const override {
        if (in.size() != 3 || in[0] != cin_) {
            this->shape_fail("expected [" + std::to_string(cin_) + ",H,W]", in);
        }
        const auto ho = conv_out_size(in[1], k_, s_, p_);
        const auto wo = conv_out_size(in[2], k_, s_, p_);
        if (ho == 0 || wo == 0) {
            this->shape_fail("spatial size underflows kernel " + std::to_string(k_), in);
        }
        return {cout_, ho, wo};
    }

    void forward(const tensor<T>& in, tensor<T>& out) const override {
        const std::size_t n = in.dim(0), h = in.dim(2), w = in.dim(3);
        const std::size_t ho = conv_out_size(h, k_, s_, p_), wo = conv_out_size(w, k_, s_, p_);
        const std::size_t kk = cin_ * k_ * k_, hw = ho * wo;
        out.resize({n, cout_, ho, wo});
        std::vector<T> col(kk * hw);
        for (std::size_t b = 0; b < n; ++b) {
            detail::im2col(in.sample(b).data(), cin_, h, w, k_, s_, p_, ho, wo, col.data());
            T* y = out.sample(b).data();
            for (std::size_t c = 0; c < cout_; ++c) {
                std::fill(y + c * hw, y + (c + 1) * hw, bias_->value[c]);
            }
            blas::gemm(false, false, cout_, hw, kk, T{1}, weight_->value.data(), col.data(), T{1}, y);
        }
    }

    void backward(const tensor<T>& in, const tensor<T>& out, const tensor<T>& grad_out,
                  tensor<T>* grad_in) override {
        const std::size_t n = in.dim(0), h = in.dim(2), w = in.dim(3);
        const std::size_t ho = out.dim(2), wo = out.dim(3);
        const std::size_t kk = cin_ * k_ * k_, hw = ho * wo;
        std::vector<T> col(kk * hw);
        if (grad_in) {
            grad_in->resize(in.shape());
            grad_in->zero();
        }
        for (std::size_t b = 0; b < n; ++b) {
            const T* g = grad_out.sample(b).data();
            detail::im2col(in.sample(b).data(), cin_, h, w, k_, s_, p_, ho, wo, col.data());
            blas::gemm(false, true, cout_, kk, hw, T{1}, g, col.data(), T{1}, weight_->grad.data());
            for (std::size_t c = 0; c < cout_; ++c) {
                T acc{0};
                for (std::size_t i = 0; i < hw; ++i) {
                    acc += g[c * hw + i];
                }
                bias_->grad[c] += acc;
            }
            if (grad_in) {
                blas::gemm(true, false, kk, hw, cout_, T{1}, weight_->value.data(), g, T{0}, col.data());
                detail::col2im(col.data(), cin_, h, w, k_, s_, p_, ho, wo, grad_in->sample(b).data());
            }
        }
    }

private:
    std::size_t cin_, cout_, k_, s_, p_;
    parameter<T>* weight_;
    parameter<T>* bias_;
};

/// Transposed convolution; weight layout [in, out, k, k], the adjoint of conv2d.
template <typename T>
class deconv2d final : public layer<T> {
public:
    deconv2d(param_store<T>& store, const std::string& name, std::size_t in_channels, std::size_t out_channels,
             std::size_t kernel, std::size_t stride, std::size_t pad)
        : layer<T>(name), cin_(in_channels), cout_(out_channels), k_(kernel), s_(stride), p_(pad),
          weight_(&store.add(name + ".weight", {in_channels, out_channels, kernel, kernel},
                             std::max<std::size_t>(1, in_channels * kernel * kernel / (stride * stride)))),
          bias_(&store.add(name + ".bias", {out_channels}, 0)) {}

    std::string kind() const override { return "deconv2d"; }

    shape_t output_shape(const shape_t& in) const override {
        if (in.size() != 3 || in[0] != cin_) {
            this->shape_fail("expected [" + std::to_string(cin_) + ",H,W]", in);
        }
        const auto ho = deconv_out_size(in[1], k_, s_, p_);
        const auto wo = deconv_out_size(in[2], k_, s_, p_);
        if (ho == 0 || wo == 0) {
            this->shape_fail("empty transposed-convolution output", in);
        }
        return {cout_, ho, wo};
    }

    void forward(const tensor<T>& in, tensor<T>& out) const override {
        const std::size_t n = in.dim(0), h = in.dim(2), w = in.dim(3);
        const std::size_t ho = deconv_out_size(h, k_, s_, p_), wo = deconv_out_size(w, k_, s_, p_);
        const std::size_t kk = cout_ * k_ * k_, hw = h * w, ohw = ho * wo;
        out.resize({n, cout_, ho, wo});
        out.zero();
        std::vector<T> col(kk * hw);
        for (std::size_t b = 0; b < n; ++b) {
            blas::gemm(true, false, kk, hw, cin_, T{1}, weight_->value.data(), in.sample(b).data(), T{0}, col.data());
            T* y = out.sample(b).data();
            detail::col2im(col.data(), cout_, ho, wo, k_, s_, p_, h, w, y);
            for (std::size_t c = 0; c < cout_; ++c) {
                const T bc = bias_->value[c];
                for (std::size_t i = 0; i < ohw; ++i) {
                    y[c * ohw + i] += bc;
                }
            }
        }
    }

    void backward(const tensor<T>& in, const tensor<T>& out, const tensor<T>& grad_out,
                  tensor<T>* grad_in) override {
        const std::size_t n = in.dim(0), h = in.dim(2), w = in.dim(3);
        const std::size_t ho = out.dim(2), wo = out.dim(3);
        const std::size_t kk = cout_ * k_ * k_, hw = h * w, ohw = ho * wo;
        std::vector<T> col(kk * hw);
        if (grad_in) {
            grad_in->resize(in.shape());
        }
        for (std::size_t b = 0; b < n; ++b) {
            const T* g = grad_out.sample(b).data();
            detail::im2col(g, cout_, ho, wo, k_, s_, p_, h, w, col.data());
            blas::gemm(false, true, cin_, kk, hw, T{1}, in.sample(b).data(), col.data(), T{1}, weight_->grad.data());
            for (std::size_t c = 0; c < cout_; ++c) {
                T acc{0};
                for (std::size_t i = 0; i < ohw; ++i) {
                    acc += g[c * ohw + i];
                }
                bias_->grad[c] += acc;
            }
            if (grad_in) {
                blas::gemm(false, false, cin_, hw, kk, T{1}, weight_->value.data(), col.data(), T{0},
                           grad_in->sample(b).data());
            }
        }
    }

private:
    std::size_t cin_, cout_, k_, s_, p_;
    parameter<T>* weight_;
    parameter<T>* bias_;
};

/// Valid (unpadded) stride-1 1-D convolution over [C, L] samples.
template <typename T>
class conv1d final : public layer<T> {
public:
    conv1d(param_store<T>& store, const std::string& name, std::size_t in_channels, std::size_t out_channels,
           std::size_t kernel)
        : layer<T>(name), cin_(in_channels), cout_(out_channels), k_(kernel),
          weight_(&store.add(name + ".weight", {out_channels, in_channels, kernel}, in_channels * kernel)),
          bias_(&store.add(name + ".bias", {out_channels}, 0)) {}

    std::string kind() const override { return "conv1d"; }

    shape_t output_shape(const shape_t& in) const override {
        if (in.size() != 2 || in[0] != cin_) {
            this->shape_fail("expected [" + std::to_string(cin_) + ",L]", in);
        }
        if (in[1] < k_) {
            this->shape_fail("length " + std::to_string(in[1]) + " shorter than kernel " + std::to_string(k_), in);
        }
        return {cout_, in[1] - k_ + 1};
    }

    // The whole batch is unfolded into one [C*k, N*Lo] matrix so a single GEMM covers it.
    void forward(const tensor<T>& in, tensor<T>& out) const override {
        const std::size_t n = in.dim(0), len = in.dim(2), lo = len - k_ + 1, kk = cin_ * k_, cols = n * lo;
        std::vector<T> col(kk * cols), y(cout_ * cols);
        unfold(in, n, len, lo, col.data());
        blas::gemm(false, false, cout_, cols, kk, T{1}, weight_->value.data(), col.data(), T{0}, y.data());
        out.resize({n, cout_, lo});
        for (std::size_t b = 0; b < n; ++b) {
            T* dst = out.sample(b).data();
            for (std::size_t c = 0; c < cout_; ++c) {
                const T* src = y.data() + c * cols + b * lo;
                const T bc = bias_->value[c];
                for (std::size_t t = 0; t < lo; ++t) {
                    dst[c * lo + t] = src[t] + bc;
                }
            }
        }
    }

    void backward(const tensor<T>& in, const tensor<T>& out, const tensor<T>& grad_out,
                  tensor<T>* grad_in) override {
        const std::size_t n = in.dim(0), len = in.dim(2), lo = out.dim(2), kk = cin_ * k_, cols = n * lo;
        std::vector<T> col(kk * cols), g(cout_ * cols);
        for (std::size_t b = 0; b < n; ++b) {
            const T* src = grad_out.sample(b).data();
            for (std::size_t c = 0; c < cout_; ++c) {
                std::copy(src + c * lo, src + (c + 1) * lo, g.data() + c * cols + b * lo);
            }
        }
        unfold(in, n, len, lo, col.data());
        blas::gemm(false, true, cout_, kk, cols, T{1}, g.data(), col.data(), T{1}, weight_->grad.data());
        for (std::size_t c = 0; c < cout_; ++c) {
            T acc{0};
            for (std::size_t i = 0; i < cols; ++i) {
                acc += g[c * cols + i];
            }
            bias_->grad[c] += acc;
        }
        if (!grad_in) {
            return;
        }
        blas::gemm(true, false, kk, cols, cout_, T{1}, weight_->value.data(), g.data(), T{0}, col.data());
        grad_in->resize(in.shape());
        grad_in->zero();
        for (std::size_t b = 0; b < n; ++b) {
            T* dst = grad_in->sample(b).data();
            for (std::size_t c = 0; c < cin_; ++c) {
                for (std::size_t j = 0; j < k_; ++j) {
                    const T* row = col.data() + (c * k_ + j) * cols + b * lo;
                    for (std::size_t t = 0; t < lo; ++t) {
                        dst[c * len + t + j] += row[t];
                    }
                }
            }
        }
    }

private:
    void unfold(const tensor<T>& in, std::size_t n, std::size_t len, std::size_t lo, T* col) const {
        const std::size_t cols = n * lo;
        for (std::size_t b = 0; b < n; ++b) {
            const T* x = in.sample(b).data();
            for (std::size_t c = 0; c < cin_; ++c) {
                for (std::size_t j = 0; j < k_; ++j) {
                    std::copy(x + c * len + j, x + c * len + j + lo, col + (c * k_ + j) * cols + b * lo);
                }
            }
        }
    }

    std::size_t cin_, cout_, k_;
    parameter<T>* weight_;
    parameter<T>* bias_;
};

/// Max pooling over [C, L]; gradient routes to the first maximal element.
template <typename T>
class maxpool1d final : public layer<T> {
public:
    maxpool1d(const std::string& name, std::size_t kernel, std::size_t stride)
        : layer<T>(name), k_(kernel), s_(stride) {}

    std::string kind() const override { return "maxpool1d"; }

    shape_t output_shape(const shape_t& in) const override {
        if (in.size() != 2) {
            this->shape_fail("expected [C,L]", in);
        }
        const auto lo = pool_out_size(in[1], k_, s_);
        if (lo < 1) {
            this->shape_fail("incoming length " + std::to_string(in[1]) + " underflows pooling window " +
                                 std::to_string(k_),
                             in);
        }
        return {in[0], lo};
    }

    void forward(const tensor<T>& in, tensor<T>& out) const override {
        const std::size_t n = in.dim(0), ch = in.dim(1), len = in.dim(2), lo = pool_out_size(len, k_, s_);
        out.resize({n, ch, lo});
        for (std::size_t r = 0; r < n * ch; ++r) {
            const T* x = in.data() + r * len;
            T* y = out.data() + r * lo;
            for (std::size_t t = 0; t < lo; ++t) {
                y[t] = x[argmax(x, t)];
            }
        }
    }

    void backward(const tensor<T>& in, const tensor<T>& out, const tensor<T>& grad_out,
                  tensor<T>* grad_in) override {
        if (!grad_in) {
            return;
        }
        const std::size_t rows = in.dim(0) * in.dim(1), len = in.dim(2), lo = out.dim(2);
        grad_in->resize(in.shape());
        grad_in->zero();
        for (std::size_t r = 0; r < rows; ++r) {
            const T* x = in.data() + r * len;
            for (std::size_t t = 0; t < lo; ++t) {
                (*grad_in)[r * len + argmax(x, t)] += grad_out[r * lo + t];
            }
        }
    }

private:
    std::size_t argmax(const T* x, std::size_t t) const {
        std::size_t best = t * s_;
        for (std::size_t i = best + 1; i < t * s_ + k_; ++i) {
            if (x[i] > x[best]) {
                best = i;
            }
        }
        return best;
    }

    std::size_t k_, s_;
};

/// Fully connected layer; flattens every trailing dimension of its input.
template <typename T>
class linear final : public layer<T> {
public:
    linear(param_store<T>& store, const std::string& name, std::size_t in_features, std::size_t out_features)
        : layer<T>(name), in_(in_features), out_(out_features),
          weight_(&store.add(name + ".weight", {out_features, in_features}, in_features)),
          bias_(&store.add(name + ".bias", {out_features}, 0)) {}

    std::string kind() const override { return "linear"; }

    shape_t output_shape(const shape_t& in) const override {
        if (shape_size(in) != in_) {
            this->shape_fail("expected " + std::to_string(in_) + " input features", in);
        }
        return {out_};
    }

    void forward(const tensor<T>& in, tensor<T>& out) const override {
        const std::size_t n = in.dim(0);
        out.resize({n, out_});
        for (std::size_t b = 0; b < n; ++b) {
            std::copy(bias_->value.begin(), bias_->value.end(), out.sample(b).begin());
        }
        blas::gemm(false, true, n, out_, in_, T{1}, in.data(), weight_->value.data(), T{1}, out.data());
    }

    void backward(const tensor<T>& in, const tensor<T>&, const tensor<T>& grad_out, tensor<T>* grad_in) override {
        const std::size_t n = in.dim(0);
        blas::gemm(true, false, out_, in_, n, T{1}, grad_out.data(), in.data(), T{1}, weight_->grad.data());
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t o = 0; o < out_; ++o) {
                bias_->grad[o] += grad_out[b * out_ + o];
            }
        }
        if (grad_in) {
            grad_in->resize(in.shape());
            blas::gemm(false, false, n, in_, out_, T{1}, grad_out.data(), weight_->value.data(), T{0},
                       grad_in->data());
        }
    }

private:
    std::size_t in_, out_;
    parameter<T>* weight_;
    parameter<T>* bias_;
};

template <typename T>
class relu final : public layer<T> {
public:
    using layer<T>::layer;
    std::string kind() const override { return "relu"; }
    shape_t output_shape(const shape_t& in) const override { return in; }

    void forward(const tensor<T>& in, tensor<T>& out) const override {
        out.resize(in.shape());
        const T* x = in.data();
        T* y = out.data();
        for (std::size_t i = 0, n = in.size(); i < n; ++i) {
            y[i] = std::max(x[i], T{0});
        }
    }

    void backward(const tensor<T>& in, const tensor<T>&, const tensor<T>& grad_out, tensor<T>* grad_in) override {
        if (!grad_in) {
            return;
        }
        grad_in->resize(in.shape());
        const T* x = in.data();
        const T* g = grad_out.data();
        T* d = grad_in->data();
        for (std::size_t i = 0, n = in.size(); i < n; ++i) {
            d[i] = x[i] > T{0} ? g[i] : T{0};
        }
    }
};

template <typename T>
class sigmoid final : public layer<T> {
public:
    using layer<T>::layer;
    std::string kind() const override { return "sigmoid"; }
    shape_t output_shape(const shape_t& in) const override { return in; }

    void forward(const tensor<T>& in, tensor<T>& out) const override {
        out.resize(in.shape());
        for (std::size_t i = 0; i < in.size(); ++i) {
            out[i] = T(1) / (T(1) + std::exp(-in[i]));
        }
    }

    void backward(const tensor<T>& in, const tensor<T>& out, const tensor<T>& grad_out, tensor<T>* grad_in) override {
        if (!grad_in) {
            return;
        }
        grad_in->resize(in.shape());
        for (std::size_t i = 0; i < in.size(); ++i) {
            (*grad_in)[i] = grad_out[i] * out[i] * (T(1) - out[i]);
        }
    }
};

/// Reinterprets each sample with a new shape of the same size.
template <typename T>
class reshape final : public layer<T> {
public:
    reshape(const std::string& name, shape_t target) : layer<T>(name), target_(std::move(target)) {}
    std::string kind() const override { return "reshape"; }

    shape_t output_shape(const shape_t& in) const override {
        if (shape_size(in) != shape_size(target_)) {
            this->shape_fail("cannot view as " + to_string(target_), in);
        }
        return target_;
    }

    void forward(const tensor<T>& in, tensor<T>& out) const override {
        out = in;
        out.reshape(this->batch_shape(in.dim(0), target_));
    }

    void backward(const tensor<T>& in, const tensor<T>&, const tensor<T>& grad_out, tensor<T>* grad_in) override {
        if (grad_in) {
            *grad_in = grad_out;
            grad_in->reshape(in.shape());
        }
    }

private:
    shape_t target_;
};

/*!
 * \brief A chain of layers with build-time shape validation.
 *
 * build() runs the shape algebra once and fails naming the first layer that
 * cannot accept its input. forward() keeps activations for backward();
 * infer() is const and keeps nothing, so it is safe to call concurrently.
 */
template <typename T>
class sequential {
public:
    template <template <typename> class L, typename... Args>
    L<T>& add(Args&&... args) {
        auto l = std::make_unique<L<T>>(std::forward<Args>(args)...);
        auto& ref = *l;
        layers_.push_back(std::move(l));
        shapes_.clear();
        return ref;
    }

    void build(const shape_t& input) {
        shapes_.assign(1, input);
        for (const auto& l : layers_) {
            shapes_.push_back(l->output_shape(shapes_.back()));
        }
        acts_.assign(layers_.size() + 1, tensor<T>{});
    }

    bool built() const noexcept { return !shapes_.empty(); }

    /// Per-sample shapes: input first, then the output of each layer.
    const std::vector<shape_t>& shapes() const noexcept { return shapes_; }
    const shape_t& input_shape() const { return shapes_.front(); }
    const shape_t& output_shape() const { return shapes_.back(); }

    std::size_t size() const noexcept { return layers_.size(); }
    const layer<T>& operator[](std::size_t i) const { return *layers_[i]; }

    const tensor<T>& forward(const tensor<T>& in) {
        check_input(in);
        acts_[0] = in;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            layers_[i]->forward(acts_[i], acts_[i + 1]);
        }
        return acts_.back();
    }

    /// Backpropagates through the activations of the last forward() call.
    void backward(const tensor<T>& grad_out, tensor<T>* grad_in) {
        tensor<T> g = grad_out, next;
        for (std::size_t i = layers_.size(); i-- > 0;) {
            tensor<T>* target = i == 0 ? grad_in : &next;
            layers_[i]->backward(acts_[i], acts_[i + 1], g, target);
            if (i > 0) {
                std::swap(g, next);
            }
        }
    }

    tensor<T> infer(const tensor<T>& in) const {
        check_input(in);
        tensor<T> a = in, b;
        for (const auto& l : layers_) {
            l->forward(a, b);
            std::swap(a, b);
        }
        return a;
    }

private:
    void check_input(const tensor<T>& in) const {
        if (!built()) {
            throw config_error("sequential: forward before build()");
        }
        const shape_t sample(in.shape().begin() + (in.rank() ? 1 : 0), in.shape().end());
        if (in.rank() == 0 || sample != shapes_.front()) {
            const std::string first = layers_.empty() ? "<empty>" : layers_.front()->name();
            throw shape_error("input to layer '" + first + "' has shape " + to_string(in.shape()) +
                              ", expected [N]+" + to_string(shapes_.front()));
        }
    }

    std::vector<std::unique_ptr<layer<T>>> layers_;
    std::vector<shape_t> shapes_;
    std::vector<tensor<T>> acts_;
};

} // namespace gel
