#include "eqf/neural/adam.hpp"

#include "eqf/error.hpp"

#include <cmath>

namespace eqf::nn {

namespace {

void ensure_moments(AdamState& state, std::size_t n) {
    if (state.first_moment.empty() && state.second_moment.empty()) {
        state.first_moment.assign(n, 0.0);
        state.second_moment.assign(n, 0.0);
    }
    if (state.first_moment.size() != n || state.second_moment.size() != n)
        throw Error(Errc::ShapeMismatch, "Adam moments do not match the parameter count");
}

void update_slice(AdamState& state, double* p, const double* g, std::size_t n, std::size_t off, double c1,
                  double c2) {
    double* m = state.first_moment.data() + off;
    double* v = state.second_moment.data() + off;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
        v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

}  // namespace

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size()) throw Error(Errc::ShapeMismatch, "params and grads differ in size");
    ensure_moments(state, params.size());
    ++state.step;
    const auto t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    update_slice(state, params.data(), grads.data(), params.size(), 0, c1, c2);
}

void adam_step(AdamState& state, std::span<const Param> params) {
    std::size_t total = 0;
    for (const auto& p : params) {
        if (p.value->size() != p.grad->size()) throw Error(Errc::ShapeMismatch, "param and grad differ in size");
        total += p.value->size();
    }
    ensure_moments(state, total);
    ++state.step;
    const auto t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    std::size_t off = 0;
    for (const auto& p : params) {
        update_slice(state, p.value->data(), p.grad->data(), p.value->size(), off, c1, c2);
        off += p.value->size();
    }
}

}  // namespace eqf::nn
