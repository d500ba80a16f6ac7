#include "eqf/neural/layers.hpp"

#include "eqf/error.hpp"
#include "init.hpp"

#include <string>

namespace eqf::nn {

Dense::Dense(std::size_t in, std::size_t out)
    : in_(in),
      out_(out),
      weight_({out, in}),
      bias_({out}),
      grad_weight_({out, in}),
      grad_bias_({out}) {}

void Dense::initialize(std::mt19937_64& rng) {
    detail::glorot_uniform(weight_, static_cast<double>(in_), static_cast<double>(out_), rng);
    bias_.fill(0.0);
}

Tensor Dense::forward(const Tensor& x, bool /*training*/) {
    if (x.size() != in_) throw Error(Errc::ShapeMismatch, "dense expects " + std::to_string(in_) + " inputs");
    input_ = x;
    Tensor y({out_});
    y.vector() = weight_.matrix() * x.vector() + bias_.vector();
    return y;
}

Tensor Dense::backward(const Tensor& grad_out) {
    if (grad_out.size() != out_) throw Error(Errc::ShapeMismatch, "dense gradient size");
    grad_weight_.matrix().noalias() += grad_out.vector() * input_.vector().transpose();
    grad_bias_.vector() += grad_out.vector();
    Tensor dx(input_.shape());
    dx.vector() = weight_.matrix().transpose() * grad_out.vector();
    return dx;
}

Tensor Relu::forward(const Tensor& x, bool /*training*/) {
    input_ = x;
    Tensor y = x;
    for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor Relu::backward(const Tensor& grad_out) {
    if (grad_out.size() != input_.size()) throw Error(Errc::ShapeMismatch, "relu gradient size");
    Tensor dx = grad_out;
    for (std::size_t i = 0; i < dx.size(); ++i)
        if (!(input_[i] > 0.0)) dx[i] = 0.0;
    return dx;
}

Tensor Flatten::forward(const Tensor& x, bool /*training*/) {
    in_shape_ = x.shape();
    return x.reshaped({x.size()});
}

Tensor Flatten::backward(const Tensor& grad_out) { return grad_out.reshaped(in_shape_); }

Dropout::Dropout(double rate, std::uint64_t seed) : rate_(rate), seed_(seed), rng_(seed) {
    if (!(rate >= 0.0 && rate < 1.0)) throw Error(Errc::InvalidParams, "dropout rate must be in [0, 1)");
}

Tensor Dropout::forward(const Tensor& x, bool training) {
    if (!training || rate_ == 0.0) {
        mask_.clear();
        return x;
    }
    std::bernoulli_distribution keep(1.0 - rate_);
    const double scale = 1.0 / (1.0 - rate_);
    mask_.resize(x.size());
    Tensor y = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mask_[i] = keep(rng_) ? scale : 0.0;
        y[i] *= mask_[i];
    }
    return y;
}

Tensor Dropout::backward(const Tensor& grad_out) {
    if (mask_.empty()) return grad_out;
    if (mask_.size() != grad_out.size()) throw Error(Errc::ShapeMismatch, "dropout gradient size");
    Tensor dx = grad_out;
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask_[i];
    return dx;
}

std::unique_ptr<Layer> make_layer(const nlohmann::json& config) {
    const auto kind = config.at("kind").get<std::string>();
    if (kind == "dense") return std::make_unique<Dense>(config.at("in").get<std::size_t>(), config.at("out").get<std::size_t>());
    if (kind == "relu") return std::make_unique<Relu>();
    if (kind == "flatten") return std::make_unique<Flatten>();
    if (kind == "dropout")
        return std::make_unique<Dropout>(config.at("rate").get<double>(), config.at("seed").get<std::uint64_t>());
    if (kind == "lstm")
        return std::make_unique<Lstm>(config.at("input_dim").get<std::size_t>(), config.at("units").get<std::size_t>(),
                                      config.at("return_sequences").get<bool>());
    if (kind == "conv3d")
        return std::make_unique<Conv3d>(config.at("in_channels").get<std::size_t>(),
                                        config.at("out_channels").get<std::size_t>());
    if (kind == "maxpool3d") return std::make_unique<MaxPool3d>();
    throw Error(Errc::ShapeMismatch, "unknown layer kind " + kind);
}

}  // namespace eqf::nn
