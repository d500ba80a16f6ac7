#pragma once

#include "eqf/bench/pipeline.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace eqf::bench::plots {

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

// [min, max] of every finite value, widened by `margin` of the span on each side.
Range padded_range(const std::vector<std::vector<double>>& series, double margin = 0.05);

struct Line {
    std::string label;
    std::vector<double> y;
    std::string color;
};

std::string line_chart(const std::string& title, const std::vector<Line>& lines, const std::string& y_label);
struct Points {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color;
};

std::string scatter_chart(const std::string& title, const std::vector<Points>& sets, const std::string& x_label,
                          const std::string& y_label);
std::string histogram(const std::string& title, const std::vector<double>& x, std::size_t bins);

// Shared panels (prices, returns, return histogram, correlogram, predicted-vs-actual returns for all
// models) plus one predicted-vs-actual price chart per model.
std::vector<std::filesystem::path> emit_plots(const RunReport& r, const std::filesystem::path& dir);

}  // namespace eqf::bench::plots
