#include "eqf/error.hpp"
#include "eqf/neural/layers.hpp"
#include "init.hpp"

#include <limits>

namespace eqf::nn {

namespace {

struct Dims {
    std::size_t c, h, w, d;
    std::size_t at(std::size_t ci, std::size_t hi, std::size_t wi, std::size_t di) const {
        return ((ci * h + hi) * w + wi) * d + di;
    }
};

Dims dims_of(const Tensor& x, std::size_t expected_channels) {
    if (x.rank() != 4 || x.dim(0) != expected_channels)
        throw Error(Errc::ShapeMismatch, "expected [" + std::to_string(expected_channels) + ", H, W, D]");
    return {x.dim(0), x.dim(1), x.dim(2), x.dim(3)};
}

// Calls f(out_index, in_index, weight_index) for every in-bounds tap of the same-padded kernel.
template <typename F>
void for_each_tap(const Dims& in, std::size_t out_channels, F f) {
    constexpr auto K = Conv3d::kKernel;
    constexpr long pad = 1;
    for (std::size_t o = 0; o < out_channels; ++o)
        for (std::size_t ci = 0; ci < in.c; ++ci)
            for (std::size_t kh = 0; kh < K; ++kh)
                for (std::size_t kw = 0; kw < K; ++kw)
                    for (std::size_t kd = 0; kd < K; ++kd) {
                        const std::size_t widx = (((o * in.c + ci) * K + kh) * K + kw) * K + kd;
                        for (std::size_t h = 0; h < in.h; ++h) {
                            const long ih = static_cast<long>(h + kh) - pad;
                            if (ih < 0 || ih >= static_cast<long>(in.h)) continue;
                            for (std::size_t w = 0; w < in.w; ++w) {
                                const long iw = static_cast<long>(w + kw) - pad;
                                if (iw < 0 || iw >= static_cast<long>(in.w)) continue;
                                for (std::size_t d = 0; d < in.d; ++d) {
                                    const long id = static_cast<long>(d + kd) - pad;
                                    if (id < 0 || id >= static_cast<long>(in.d)) continue;
                                    const std::size_t out_idx = ((o * in.h + h) * in.w + w) * in.d + d;
                                    const std::size_t in_idx =
                                        in.at(ci, static_cast<std::size_t>(ih), static_cast<std::size_t>(iw),
                                              static_cast<std::size_t>(id));
                                    f(out_idx, in_idx, widx);
                                }
                            }
                        }
                    }
}

}  // namespace

Conv3d::Conv3d(std::size_t in_channels, std::size_t out_channels)
    : in_(in_channels),
      out_(out_channels),
      weight_({out_channels, in_channels, kKernel, kKernel, kKernel}),
      bias_({out_channels}),
      grad_weight_({out_channels, in_channels, kKernel, kKernel, kKernel}),
      grad_bias_({out_channels}) {}

void Conv3d::initialize(std::mt19937_64& rng) {
    const double taps = static_cast<double>(kKernel * kKernel * kKernel);
    detail::glorot_uniform(weight_, static_cast<double>(in_) * taps, static_cast<double>(out_) * taps, rng);
    bias_.fill(0.0);
}

Tensor Conv3d::forward(const Tensor& x, bool /*training*/) {
    const Dims in = dims_of(x, in_);
    input_ = x;
    Tensor y({out_, in.h, in.w, in.d});
    const std::size_t spatial = in.h * in.w * in.d;
    for (std::size_t o = 0; o < out_; ++o)
        for (std::size_t s = 0; s < spatial; ++s) y[o * spatial + s] = bias_[o];
    const double* xd = x.data();
    const double* wd = weight_.data();
    double* yd = y.data();
    for_each_tap(in, out_, [&](std::size_t oi, std::size_t ii, std::size_t wi) { yd[oi] += wd[wi] * xd[ii]; });
    return y;
}

Tensor Conv3d::backward(const Tensor& grad_out) {
    const Dims in = dims_of(input_, in_);
    if (grad_out.size() != out_ * in.h * in.w * in.d) throw Error(Errc::ShapeMismatch, "conv3d gradient size");
    const std::size_t spatial = in.h * in.w * in.d;
    for (std::size_t o = 0; o < out_; ++o)
        for (std::size_t s = 0; s < spatial; ++s) grad_bias_[o] += grad_out[o * spatial + s];

    Tensor dx(input_.shape());
    const double* xd = input_.data();
    const double* wd = weight_.data();
    const double* gd = grad_out.data();
    double* gwd = grad_weight_.data();
    double* dxd = dx.data();
    for_each_tap(in, out_, [&](std::size_t oi, std::size_t ii, std::size_t wi) {
        gwd[wi] += gd[oi] * xd[ii];
        dxd[ii] += wd[wi] * gd[oi];
    });
    return dx;
}

Tensor MaxPool3d::forward(const Tensor& x, bool /*training*/) {
    if (x.rank() != 4) throw Error(Errc::ShapeMismatch, "maxpool3d expects [C, H, W, D]");
    const Dims in{x.dim(0), x.dim(1), x.dim(2), x.dim(3)};
    const std::size_t oh = in.h / kPool, ow = in.w / kPool, od = in.d / kPool;
    if (oh == 0 || ow == 0 || od == 0) throw Error(Errc::BadDims, "maxpool3d input smaller than the pool");
    in_shape_ = x.shape();
    Tensor y({in.c, oh, ow, od});
    argmax_.assign(y.size(), 0);
    std::size_t out = 0;
    for (std::size_t c = 0; c < in.c; ++c)
        for (std::size_t h = 0; h < oh; ++h)
            for (std::size_t w = 0; w < ow; ++w)
                for (std::size_t d = 0; d < od; ++d, ++out) {
                    double best = -std::numeric_limits<double>::infinity();
                    std::size_t best_idx = 0;
                    for (std::size_t a = 0; a < kPool; ++a)
                        for (std::size_t b = 0; b < kPool; ++b)
                            for (std::size_t e = 0; e < kPool; ++e) {
                                const std::size_t idx = in.at(c, h * kPool + a, w * kPool + b, d * kPool + e);
                                if (x[idx] > best) {
                                    best = x[idx];
                                    best_idx = idx;
                                }
                            }
                    y[out] = best;
                    argmax_[out] = best_idx;
                }
    return y;
}

Tensor MaxPool3d::backward(const Tensor& grad_out) {
    if (grad_out.size() != argmax_.size()) throw Error(Errc::ShapeMismatch, "maxpool3d gradient size");
    Tensor dx(in_shape_);
    for (std::size_t i = 0; i < argmax_.size(); ++i) dx[argmax_[i]] += grad_out[i];
    return dx;
}

}  // namespace eqf::nn
