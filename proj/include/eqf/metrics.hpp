#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace eqf::metrics {

// Errors are forecast minus actual.
double mean_error(std::span<const double> actual, std::span<const double> forecast);
double mean_absolute_error(std::span<const double> actual, std::span<const double> forecast);
double root_mean_squared_error(std::span<const double> actual, std::span<const double> forecast);
// Fractions, not percentages. Throw ZeroActual when an actual value is 0.
double mean_percentage_error(std::span<const double> actual, std::span<const double> forecast);
double mean_absolute_percentage_error(std::span<const double> actual, std::span<const double> forecast);
// 1 - mean(min/max) over pairs where both values are positive; NaN if there are none.
double minmax_error(std::span<const double> actual, std::span<const double> forecast);

struct MetricsTable {
    double mape = 0.0;
    double me = 0.0;
    double mae = 0.0;
    double mpe = 0.0;
    double rmse = 0.0;
    double correlation = 0.0;
    double minmax = 0.0;
    std::size_t n = 0;
    std::string target_kind;  // "price", "log_price" or "return"
};

MetricsTable error_metrics(std::span<const double> actual, std::span<const double> forecast,
                           std::string_view target_kind = "price");

// Same as error_metrics, but a metric that cannot be computed for this input (zero actuals,
// constant forecast) is NaN instead of an error.
MetricsTable error_metrics_lenient(std::span<const double> actual, std::span<const double> forecast,
                                   std::string_view target_kind);

enum class Verdict { Better, Equal, Worse };

std::string_view verdict_name(Verdict v) noexcept;

struct TheilVerdict {
    double u2 = 0.0;
    Verdict verdict = Verdict::Equal;
};

inline constexpr double kTheilEqualityTolerance = 1e-12;

Verdict classify_u2(double u2) noexcept;

// `actual` carries the observation preceding the scored range first: actual.size() == forecast.size() + 1.
TheilVerdict theil_u2(std::span<const double> actual, std::span<const double> forecast);

}  // namespace eqf::metrics
