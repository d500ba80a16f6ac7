#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace eqf::detail {

// Objective returning f(x) and writing the gradient into `grad` when non-null.
using Objective = std::function<double(std::span<const double>, std::vector<double>*)>;

struct BfgsResult {
    std::vector<double> x;
    double f = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Quasi-Newton minimization with an inverse-Hessian update and Armijo backtracking.
// Converged when the objective change falls below tol * (1 + |f|) on consecutive iterations or
// the gradient vanishes.
BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, std::size_t max_iterations, double tol);

}  // namespace eqf::detail
