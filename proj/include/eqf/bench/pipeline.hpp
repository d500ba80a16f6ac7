#pragma once

#include "eqf/bench/config.hpp"
#include "eqf/metrics.hpp"
#include "eqf/stats.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eqf::bench {

struct Growth {
    double simple = 0.0;  // last / first - 1
    double log = 0.0;     // ln(last / first)
};

struct ModelResult {
    std::string name;
    // Forecasts over the test horizon, aligned with the test dates.
    std::vector<double> prices;
    std::vector<double> returns;
    std::vector<double> volatility;  // conditional sd forecasts; empty for models without one
    metrics::MetricsTable return_metrics;
    metrics::MetricsTable log_price_metrics;
    metrics::MetricsTable price_metrics;
    metrics::TheilVerdict theil_prices;
    metrics::TheilVerdict theil_returns;
    Growth growth;
    nlohmann::json details;  // fitted parameters, weights, loss history
};

struct Diagnostics {
    stats::DescriptiveStats returns;
    stats::DescriptiveStats prices;
    stats::AdfResult adf_prices;
    stats::AdfResult adf_returns;
    std::optional<double> price_correlation;  // with the second series when given
    std::vector<stats::CorrelogramPoint> acf;
    std::vector<stats::CorrelogramPoint> pacf;
};

struct RunReport {
    int schema = 1;
    std::string generated_at;  // UTC; excluded from determinism comparisons
    std::string config_hash;
    nlohmann::json config;
    std::string mode;  // "static" or "rolling"

    std::string label;
    std::size_t train_len = 0;
    std::size_t test_len = 0;
    std::string train_end_date;
    double anchor_price = 0.0;  // last training price
    std::vector<double> full_prices;  // whole primary series, for the overview panels
    std::vector<std::string> test_dates;
    std::vector<double> actual_prices;
    std::vector<double> actual_returns;
    Growth actual_growth;

    Diagnostics diagnostics;
    std::vector<ModelResult> models;
    std::string volatility_proxy = "squared_returns";
    std::optional<metrics::MetricsTable> volatility_metrics;  // GARCH variance vs squared returns

    const ModelResult* find(const std::string& name) const;
};

// Metric row names, in output order.
inline const std::vector<std::string> kMetricRows{"MAPE", "ME", "MAE", "MPE", "RMSE", "CORRELATION", "MINMAX",
                                                  "THEIL_U2"};

// Value of `row` for a model on the given target ("prices" or "returns"); NaN when undefined.
double metric_value(const ModelResult& m, const std::string& target, const std::string& row);

// Model with the smallest |value| (largest correlation, U2 closest to zero); empty if all are NaN.
std::string best_model(const RunReport& r, const std::string& target, const std::string& row);

RunReport run_pipeline(const RunConfig& cfg);

// Pipeline pieces shared with the CLI.
struct LoadedData {
    PriceSeries primary;
    std::optional<PriceSeries> second;  // aligned to the primary dates
};
LoadedData load_inputs(const RunConfig& cfg);
Diagnostics diagnose(const LoadedData& data, std::size_t correlogram_lags);

}  // namespace eqf::bench
