#pragma once

#include <json.hpp>

#include <span>
#include <vector>

namespace eqf::hybrid {

struct ConfidenceWeights {
    double w_garch = 0.5;
    double w_lstm = 0.5;
};

struct HybridForecast {
    std::vector<double> combined;
    std::vector<double> garch;
    std::vector<double> lstm;
    ConfidenceWeights weights;
    std::vector<double> volatility;  // GARCH sigma path, reported alongside the point forecast
};

// Weights proportional to 1 / RMSE on the validation slice. A model with zero RMSE takes all
// the weight (0.5 / 0.5 if both are exact).
ConfidenceWeights compute_weights(std::span<const double> actual, std::span<const double> garch,
                                  std::span<const double> lstm);

HybridForecast combine(std::span<const double> garch, std::span<const double> lstm, const ConfidenceWeights& weights,
                       std::span<const double> volatility = {});

nlohmann::json to_json(const HybridForecast& h);

}  // namespace eqf::hybrid
