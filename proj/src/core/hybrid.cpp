#include "eqf/hybrid.hpp"

#include "eqf/error.hpp"
#include "eqf/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace eqf::hybrid {

ConfidenceWeights compute_weights(std::span<const double> actual, std::span<const double> garch,
                                  std::span<const double> lstm) {
    if (actual.size() != garch.size() || actual.size() != lstm.size())
        throw Error(Errc::LengthMismatch, "validation paths differ in length");
    if (actual.size() < 2) throw Error(Errc::SeriesTooShort, "validation slice needs at least 2 points");

    const double rg = metrics::root_mean_squared_error(actual, garch);
    const double rl = metrics::root_mean_squared_error(actual, lstm);
    if (rg == 0.0 && rl == 0.0) return {0.5, 0.5};
    if (rg == 0.0) return {1.0, 0.0};
    if (rl == 0.0) return {0.0, 1.0};
    if (rg == rl) return {0.5, 0.5};
    const double ig = 1.0 / rg, il = 1.0 / rl;
    return {ig / (ig + il), il / (ig + il)};
}

HybridForecast combine(std::span<const double> garch, std::span<const double> lstm, const ConfidenceWeights& weights,
                       std::span<const double> volatility) {
    if (garch.size() != lstm.size()) throw Error(Errc::LengthMismatch, "component paths differ in length");
    if (!(weights.w_garch >= 0.0) || !(weights.w_lstm >= 0.0) ||
        std::abs(weights.w_garch + weights.w_lstm - 1.0) > 1e-12)
        throw Error(Errc::InvalidParams, "weights must be nonnegative and sum to 1");

    HybridForecast h;
    h.garch.assign(garch.begin(), garch.end());
    h.lstm.assign(lstm.begin(), lstm.end());
    h.weights = weights;
    h.volatility.assign(volatility.begin(), volatility.end());
    h.combined.resize(garch.size());
    for (std::size_t i = 0; i < garch.size(); ++i) {
        // Exact projections for the boundary weights.
        if (weights.w_lstm == 0.0) h.combined[i] = garch[i];
        else if (weights.w_garch == 0.0) h.combined[i] = lstm[i];
        else if (garch[i] == lstm[i]) h.combined[i] = garch[i];
        else
            h.combined[i] = std::clamp(weights.w_garch * garch[i] + weights.w_lstm * lstm[i],
                                       std::min(garch[i], lstm[i]), std::max(garch[i], lstm[i]));
    }
    return h;
}

nlohmann::json to_json(const HybridForecast& h) {
    return {
        {"weights", {{"garch", h.weights.w_garch}, {"lstm", h.weights.w_lstm}}},
        {"combined", h.combined},
        {"components", {{"garch", h.garch}, {"lstm", h.lstm}}},
        {"volatility", h.volatility},
    };
}

}  // namespace eqf::hybrid
