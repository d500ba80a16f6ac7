#include "eqf/metrics.hpp"

#include "eqf/error.hpp"
#include "eqf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eqf::metrics {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.size() != forecast.size()) throw Error(Errc::LengthMismatch, "actual and forecast differ in length");
    if (actual.empty()) throw Error(Errc::SeriesTooShort, "nothing to score");
}

template <typename F>
double mean_over(std::span<const double> actual, std::span<const double> forecast, F term) {
    check_pair(actual, forecast);
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) s += term(actual[i], forecast[i]);
    return s / static_cast<double>(actual.size());
}

void check_nonzero(std::span<const double> actual) {
    for (double a : actual)
        if (a == 0.0) throw Error(Errc::ZeroActual, "percentage metric with a zero actual");
}

template <typename F>
double or_nan(F f) {
    try {
        return f();
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

double mean_error(std::span<const double> actual, std::span<const double> forecast) {
    return mean_over(actual, forecast, [](double y, double f) { return f - y; });
}

double mean_absolute_error(std::span<const double> actual, std::span<const double> forecast) {
    return mean_over(actual, forecast, [](double y, double f) { return std::abs(f - y); });
}

double root_mean_squared_error(std::span<const double> actual, std::span<const double> forecast) {
    return std::sqrt(mean_over(actual, forecast, [](double y, double f) { return (f - y) * (f - y); }));
}

double mean_percentage_error(std::span<const double> actual, std::span<const double> forecast) {
    check_nonzero(actual);
    return mean_over(actual, forecast, [](double y, double f) { return (f - y) / y; });
}

double mean_absolute_percentage_error(std::span<const double> actual, std::span<const double> forecast) {
    check_nonzero(actual);
    return mean_over(actual, forecast, [](double y, double f) { return std::abs(f - y) / std::abs(y); });
}

double minmax_error(std::span<const double> actual, std::span<const double> forecast) {
    check_pair(actual, forecast);
    double s = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] > 0.0 && forecast[i] > 0.0) {
            s += std::min(actual[i], forecast[i]) / std::max(actual[i], forecast[i]);
            ++used;
        }
    }
    if (used == 0) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 - s / static_cast<double>(used);
}

MetricsTable error_metrics(std::span<const double> actual, std::span<const double> forecast,
                           std::string_view target_kind) {
    check_pair(actual, forecast);
    if (actual.size() < 2) throw Error(Errc::SeriesTooShort, "error metrics need at least 2 points");
    MetricsTable t;
    t.n = actual.size();
    t.target_kind = std::string(target_kind);
    t.me = mean_error(actual, forecast);
    t.mae = mean_absolute_error(actual, forecast);
    t.rmse = root_mean_squared_error(actual, forecast);
    t.mpe = mean_percentage_error(actual, forecast);
    t.mape = mean_absolute_percentage_error(actual, forecast);
    t.correlation = stats::pearson(forecast, actual);
    t.minmax = minmax_error(actual, forecast);
    return t;
}

MetricsTable error_metrics_lenient(std::span<const double> actual, std::span<const double> forecast,
                                   std::string_view target_kind) {
    check_pair(actual, forecast);
    MetricsTable t;
    t.n = actual.size();
    t.target_kind = std::string(target_kind);
    t.me = mean_error(actual, forecast);
    t.mae = mean_absolute_error(actual, forecast);
    t.rmse = root_mean_squared_error(actual, forecast);
    t.mpe = or_nan([&] { return mean_percentage_error(actual, forecast); });
    t.mape = or_nan([&] { return mean_absolute_percentage_error(actual, forecast); });
    t.correlation = or_nan([&] { return stats::pearson(forecast, actual); });
    t.minmax = minmax_error(actual, forecast);
    return t;
}

std::string_view verdict_name(Verdict v) noexcept {
    switch (v) {
    case Verdict::Better: return "better";
    case Verdict::Equal: return "equal";
    case Verdict::Worse: return "worse";
    }
    return "equal";
}

Verdict classify_u2(double u2) noexcept {
    if (std::abs(u2 - 1.0) <= kTheilEqualityTolerance) return Verdict::Equal;
    return u2 > 1.0 ? Verdict::Worse : Verdict::Better;
}

TheilVerdict theil_u2(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.size() != forecast.size() + 1)
        throw Error(Errc::LengthMismatch, "theil_u2 needs one more actual than forecasts");
    if (forecast.empty()) throw Error(Errc::SeriesTooShort, "nothing to score");
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < forecast.size(); ++t) {
        const double prev = actual[t];
        const double cur = actual[t + 1];
        if (prev == 0.0) throw Error(Errc::ZeroDenominator, "zero actual at index " + std::to_string(t));
        const double fe = (forecast[t] - cur) / prev;
        const double ne = (prev - cur) / prev;
        num += fe * fe;
        den += ne * ne;
    }
    if (den == 0.0) throw Error(Errc::ZeroDenominator, "naive forecast error is zero");
    TheilVerdict v;
    v.u2 = std::sqrt(num / den);
    v.verdict = classify_u2(v.u2);
    return v;
}

}  // namespace eqf::metrics
