#pragma once

#include "eqf/bench/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace eqf::bench {

nlohmann::json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);

// Copy of the report JSON without the fields that legitimately differ between identical runs.
nlohmann::json comparable(const nlohmann::json& report);

// Metric rows x model columns + BEST.
struct MetricsCsv {
    std::vector<std::string> columns;  // model names then "BEST"
    std::vector<std::string> rows;
    std::vector<std::vector<std::string>> cells;  // rows x columns, text as written
};

std::string metrics_csv(const RunReport& r, const std::string& target);
MetricsCsv parse_metrics_csv(const std::string& text);

std::string summary_text(const RunReport& r);
std::string correlogram_csv(const RunReport& r);

// report.json, metrics_prices.csv, metrics_returns.csv, summary.txt, correlogram.csv.
std::vector<std::filesystem::path> emit_report(const RunReport& r, const std::filesystem::path& dir);
RunReport load_report(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace eqf::bench
