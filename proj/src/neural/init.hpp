#pragma once

#include "eqf/neural/tensor.hpp"

#include <cmath>
#include <random>

namespace eqf::nn::detail {

inline void glorot_uniform(Tensor& t, double fan_in, double fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : t.values()) v = dist(rng);
}

}  // namespace eqf::nn::detail
