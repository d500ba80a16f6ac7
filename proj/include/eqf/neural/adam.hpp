#pragma once

#include "eqf/neural/layers.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace eqf::nn {

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t step = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
};

// Bias-corrected Adam update of `params` in place. Moments are sized on the first call.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

// Same update applied to every parameter tensor, treated as one flat vector.
void adam_step(AdamState& state, std::span<const Param> params);

}  // namespace eqf::nn
