#include "eqf/neural/network.hpp"

#include "eqf/error.hpp"

#include <random>

namespace eqf::nn {

Tensor Network::forward(const Tensor& x, bool training) {
    Tensor cur = x;
    for (auto& layer : layers_) cur = layer->forward(cur, training);
    return cur;
}

Tensor Network::backward(const Tensor& grad_out) {
    Tensor cur = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) cur = (*it)->backward(cur);
    return cur;
}

std::vector<Param> Network::params() {
    std::vector<Param> out;
    for (auto& layer : layers_) {
        auto p = layer->params();
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

std::size_t Network::parameter_count() {
    std::size_t n = 0;
    for (const auto& p : params()) n += p.value->size();
    return n;
}

void Network::zero_grad() {
    for (auto& p : params()) p.grad->fill(0.0);
}

void Network::initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& layer : layers_) layer->initialize(rng);
}

std::vector<double> Network::flat_parameters() {
    std::vector<double> out;
    for (const auto& p : params()) out.insert(out.end(), p.value->values().begin(), p.value->values().end());
    return out;
}

void Network::set_flat_parameters(std::span<const double> values) {
    std::size_t off = 0;
    for (auto& p : params()) {
        if (off + p.value->size() > values.size()) throw Error(Errc::ShapeMismatch, "parameter blob too short");
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(off), p.value->size(), p.value->data());
        off += p.value->size();
    }
    if (off != values.size()) throw Error(Errc::ShapeMismatch, "parameter blob too long");
}

std::vector<double> Network::flat_gradients() {
    std::vector<double> out;
    for (const auto& p : params()) out.insert(out.end(), p.grad->values().begin(), p.grad->values().end());
    return out;
}

nlohmann::json Network::architecture() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& layer : layers_) arr.push_back(layer->config());
    return arr;
}

Network Network::from_architecture(const nlohmann::json& arch) {
    Network net;
    for (const auto& cfg : arch) net.add(make_layer(cfg));
    return net;
}

double mse(std::span<const Tensor> predictions, std::span<const Tensor> targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw Error(Errc::ShapeMismatch, "predictions and targets differ in count");
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].size() != targets[i].size()) throw Error(Errc::ShapeMismatch, "target shape");
        for (std::size_t k = 0; k < targets[i].size(); ++k) {
            const double d = predictions[i][k] - targets[i][k];
            s += d * d;
        }
        count += targets[i].size();
    }
    return s / static_cast<double>(count);
}

double backprop(Network& net, std::span<const Tensor> inputs, std::span<const Tensor> targets, bool training) {
    if (inputs.size() != targets.size() || inputs.empty())
        throw Error(Errc::ShapeMismatch, "inputs and targets differ in count");
    net.zero_grad();
    std::size_t count = 0;
    for (const auto& t : targets) count += t.size();
    const double norm = 2.0 / static_cast<double>(count);

    double loss = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Tensor pred = net.forward(inputs[i], training);
        if (pred.size() != targets[i].size()) throw Error(Errc::ShapeMismatch, "prediction and target shapes differ");
        Tensor grad(pred.shape());
        for (std::size_t k = 0; k < pred.size(); ++k) {
            const double d = pred[k] - targets[i][k];
            loss += d * d;
            grad[k] = norm * d;
        }
        net.backward(grad);
    }
    for (const auto& p : net.params())
        if (!p.grad->all_finite()) throw Error(Errc::NonFiniteGradient, "gradient overflow");
    return loss / static_cast<double>(count);
}

}  // namespace eqf::nn
