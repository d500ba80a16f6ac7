#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace eqf::garch {

// p = number of squared-return (ARCH) lags, q = number of variance (GARCH) lags.
// q == 0 is a pure ARCH(p) model.
struct GarchSpec {
    std::size_t p = 1;
    std::size_t q = 1;

    std::size_t warmup() const noexcept { return p > q ? p : q; }
    std::size_t n_params() const noexcept { return 1 + p + q; }
};

struct GarchParams {
    double omega = 0.0;
    std::vector<double> alpha;  // size p
    std::vector<double> beta;   // size q
    double mu = 0.0;

    double persistence() const noexcept;
    double unconditional_variance() const noexcept;
};

struct GarchFit {
    GarchSpec spec;
    GarchParams params;
    std::vector<double> sigma_path;  // conditional volatility per training observation
    double log_likelihood = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

// Upper bound on alpha + beta mass.
inline constexpr double kMaxPersistence = 1.0 - 1e-6;

// Throws InvalidParams when omega <= 0, a coefficient is negative, the stationarity bound is
// violated or the coefficient counts do not match the spec.
void validate(const GarchParams& params, const GarchSpec& spec);

// sigma^2 path of the same length as x. The first max(p, q) entries hold the sample variance of
// the demeaned series; the recursion runs on x - mu afterwards.
std::vector<double> conditional_variance_path(std::span<const double> x, const GarchParams& params,
                                              const GarchSpec& spec);

// Gaussian quasi negative log-likelihood over the post-warm-up range.
double negative_log_likelihood(std::span<const double> x, const GarchParams& params, const GarchSpec& spec);

// Unconstrained coordinates: z[0] = log(omega); z[1..p+q] are multinomial-logistic logits for
// (alpha, beta) against an implicit slack category, scaled so the mass stays below kMaxPersistence.
std::vector<double> to_unconstrained(const GarchParams& params, const GarchSpec& spec);
GarchParams from_unconstrained(std::span<const double> z, const GarchSpec& spec, double mu);

// NLL as a function of the unconstrained coordinates; fills `grad` (same size as z) when given.
double nll_unconstrained(std::span<const double> x, std::span<const double> z, const GarchSpec& spec, double mu,
                         std::vector<double>* grad);

struct FitOptions {
    std::size_t starts = 5;
    std::size_t max_iterations = 2000;
    double tolerance = 1e-8;
    std::uint64_t seed = 12345;
};

GarchFit fit_garch(std::span<const double> x, const GarchSpec& spec, const FitOptions& options = {});

// h-step variance forecasts conditioned on the whole of x (which may extend past the fitted
// sample). Unknown future squared shocks are replaced by their conditional expectation.
std::vector<double> forecast_variance(const GarchFit& fit, std::span<const double> x, std::size_t horizon);
std::vector<double> forecast_volatility(const GarchFit& fit, std::span<const double> x, std::size_t horizon);

std::vector<double> simulate_garch(const GarchParams& params, const GarchSpec& spec, std::size_t n,
                                   std::uint64_t seed);

nlohmann::json to_json(const GarchFit& fit);
GarchFit fit_from_json(const nlohmann::json& j);

}  // namespace eqf::garch
