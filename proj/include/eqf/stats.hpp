#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eqf::stats {

struct DescriptiveStats {
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;   // sample (n - 1)
    double variance = 0.0;  // std_dev^2
    double min = 0.0;
    double max = 0.0;
    double skewness = 0.0;  // bias-adjusted Fisher-Pearson G1
    double kurtosis = 0.0;  // bias-adjusted excess kurtosis G2 (normal -> 0)
    std::size_t n = 0;
    // Set for constant input; skewness and kurtosis are NaN in that case.
    bool degenerate_variance = false;
};

DescriptiveStats describe(std::span<const double> x);

struct CorrelogramPoint {
    std::size_t lag = 0;
    double value = 0.0;
    double confidence_band = 0.0;  // 1.96 / sqrt(n)
};

// Lags 1..max_lag. Requires max_lag < n / 2.
std::vector<CorrelogramPoint> acf(std::span<const double> x, std::size_t max_lag);
// Durbin-Levinson recursion on the sample autocorrelations.
std::vector<CorrelogramPoint> pacf(std::span<const double> x, std::size_t max_lag);

struct CriticalValues {
    double pct1 = 0.0;
    double pct5 = 0.0;
    double pct10 = 0.0;
};

struct AdfResult {
    double t_statistic = 0.0;
    std::size_t lags_used = 0;
    std::size_t nobs = 0;  // observations in the final regression
    CriticalValues critical_values;
    bool is_stationary = false;  // t_statistic < 5% critical value
};

// Constant-only Dickey-Fuller critical values, interpolated linearly in 1/n.
CriticalValues adf_critical_values(std::size_t nobs);

// Schwert rule floor(12 * (n/100)^0.25).
std::size_t schwert_max_lag(std::size_t n);

// Regression dx_t = c + gamma x_{t-1} + sum delta_i dx_{t-i} + e_t, lag order picked by AIC over
// 0..max_lag on a common sample, then refit on all usable observations. max_lag = 0 selects the
// Schwert bound.
AdfResult adf_test(std::span<const double> x, std::size_t max_lag = 0);

double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace eqf::stats
