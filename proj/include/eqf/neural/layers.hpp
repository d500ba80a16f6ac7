#pragma once

#include "eqf/neural/tensor.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace eqf::nn {

struct Param {
    Tensor* value;
    Tensor* grad;
};

// A layer processes one sample at a time. forward() caches what backward() needs; backward()
// must follow the matching forward() and accumulates into the parameter gradients.
class Layer {
public:
    virtual ~Layer() = default;

    virtual std::string kind() const = 0;
    virtual Tensor forward(const Tensor& x, bool training) = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;
    virtual std::vector<Param> params() { return {}; }
    virtual nlohmann::json config() const = 0;
    virtual void initialize(std::mt19937_64& /*rng*/) {}
};

class Dense final : public Layer {
public:
    Dense(std::size_t in, std::size_t out);

    std::string kind() const override { return "dense"; }
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Param> params() override { return {{&weight_, &grad_weight_}, {&bias_, &grad_bias_}}; }
    nlohmann::json config() const override { return {{"kind", kind()}, {"in", in_}, {"out", out_}}; }
    void initialize(std::mt19937_64& rng) override;

    Tensor& weight() { return weight_; }  // [out, in]
    Tensor& bias() { return bias_; }

private:
    std::size_t in_, out_;
    Tensor weight_, bias_, grad_weight_, grad_bias_;
    Tensor input_;
};

class Relu final : public Layer {
public:
    std::string kind() const override { return "relu"; }
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    nlohmann::json config() const override { return {{"kind", kind()}}; }

private:
    Tensor input_;
};

class Flatten final : public Layer {
public:
    std::string kind() const override { return "flatten"; }
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    nlohmann::json config() const override { return {{"kind", kind()}}; }

private:
    std::vector<std::size_t> in_shape_;
};

// Inverted dropout: kept activations are scaled by 1 / (1 - rate) during training; identity at
// inference.
class Dropout final : public Layer {
public:
    Dropout(double rate, std::uint64_t seed);

    std::string kind() const override { return "dropout"; }
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    nlohmann::json config() const override { return {{"kind", kind()}, {"rate", rate_}, {"seed", seed_}}; }

    double rate() const noexcept { return rate_; }

private:
    double rate_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    std::vector<double> mask_;  // 0 or 1/(1-rate); empty when the last pass was inference
};

struct LstmState {
    Eigen::VectorXd h;
    Eigen::VectorXd c;
};

// Gate order in the stacked parameters: input, forget, cell candidate, output.
class Lstm final : public Layer {
public:
    Lstm(std::size_t input_dim, std::size_t units, bool return_sequences);

    std::string kind() const override { return "lstm"; }
    // x: [T, input_dim] -> [T, units] when return_sequences, else [units]. Zero initial state.
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Param> params() override {
        return {{&w_input_, &g_input_}, {&w_recurrent_, &g_recurrent_}, {&bias_, &g_bias_}};
    }
    nlohmann::json config() const override {
        return {{"kind", kind()}, {"input_dim", input_dim_}, {"units", units_}, {"return_sequences", return_sequences_}};
    }
    void initialize(std::mt19937_64& rng) override;

    // Full-sequence pass from an explicit initial state; returns [T, units] and the final state.
    Tensor forward_from(const Tensor& x, const LstmState& initial, LstmState* final_state);

    std::size_t units() const noexcept { return units_; }
    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t parameter_count() const noexcept { return 4 * (units_ * input_dim_ + units_ * units_ + units_); }

    Tensor& input_weights() { return w_input_; }          // [4u, input_dim]
    Tensor& recurrent_weights() { return w_recurrent_; }  // [4u, u]
    Tensor& bias() { return bias_; }                      // [4u]

private:
    std::size_t input_dim_, units_;
    bool return_sequences_;
    Tensor w_input_, w_recurrent_, bias_;
    Tensor g_input_, g_recurrent_, g_bias_;

    // Cache of the last forward pass, each [T, units] (h_prev/c_prev include the initial state row).
    RowMatrix x_, gi_, gf_, gg_, go_, c_, h_, c_prev_, h_prev_;
};

// Same-padded 3x3x3 convolution with stride 1. x: [C, H, W, D] -> [O, H, W, D].
class Conv3d final : public Layer {
public:
    static constexpr std::size_t kKernel = 3;

    Conv3d(std::size_t in_channels, std::size_t out_channels);

    std::string kind() const override { return "conv3d"; }
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Param> params() override { return {{&weight_, &grad_weight_}, {&bias_, &grad_bias_}}; }
    nlohmann::json config() const override {
        return {{"kind", kind()}, {"in_channels", in_}, {"out_channels", out_}, {"kernel", kKernel}};
    }
    void initialize(std::mt19937_64& rng) override;

    Tensor& weight() { return weight_; }  // [O, C, 3, 3, 3]
    Tensor& bias() { return bias_; }

private:
    std::size_t in_, out_;
    Tensor weight_, bias_, grad_weight_, grad_bias_;
    Tensor input_;
};

// Non-overlapping 2x2x2 max pooling; trailing odd cells are dropped. x: [C, H, W, D].
class MaxPool3d final : public Layer {
public:
    static constexpr std::size_t kPool = 2;

    std::string kind() const override { return "maxpool3d"; }
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    nlohmann::json config() const override { return {{"kind", kind()}, {"pool", kPool}}; }

private:
    std::vector<std::size_t> in_shape_;
    std::vector<std::size_t> argmax_;  // flat input index for each output cell
};

std::unique_ptr<Layer> make_layer(const nlohmann::json& config);

}  // namespace eqf::nn
