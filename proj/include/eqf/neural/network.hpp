#pragma once

#include "eqf/neural/layers.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace eqf::nn {

// Sequential stack of layers.
class Network {
public:
    Network() = default;
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    template <typename L, typename... Args>
    L& emplace(Args&&... args) {
        auto layer = std::make_unique<L>(std::forward<Args>(args)...);
        L& ref = *layer;
        layers_.push_back(std::move(layer));
        return ref;
    }
    void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

    Tensor forward(const Tensor& x, bool training);
    Tensor backward(const Tensor& grad_out);

    std::vector<Param> params();
    std::size_t parameter_count();
    void zero_grad();
    void initialize(std::uint64_t seed);

    std::vector<double> flat_parameters();
    void set_flat_parameters(std::span<const double> values);
    std::vector<double> flat_gradients();

    std::size_t size() const noexcept { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_.at(i); }

    nlohmann::json architecture() const;
    static Network from_architecture(const nlohmann::json& arch);

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

// Mean of squared differences over every element.
double mse(std::span<const Tensor> predictions, std::span<const Tensor> targets);

// Zeroes the gradients, runs forward/backward over the batch and leaves d(MSE)/d(param) in the
// parameter gradients. Returns the batch MSE. Throws NonFiniteGradient if a gradient overflows.
double backprop(Network& net, std::span<const Tensor> inputs, std::span<const Tensor> targets, bool training = true);

}  // namespace eqf::nn
