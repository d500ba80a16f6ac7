#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eqf {

// Dates are ISO-8601 labels compared lexicographically; no calendar arithmetic.
using Date = std::string;

struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> values;
    std::string label;

    std::size_t size() const noexcept { return values.size(); }

    // Throws unless dates are strictly increasing, values finite and > 0, length >= 2.
    void validate() const;
};

struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> values;
    double base_price = 1.0;  // price at the date preceding the first return

    std::size_t size() const noexcept { return values.size(); }
};

struct SplitSpec {
    std::size_t train_len = 0;
    std::size_t test_len = 0;
};

PriceSeries load_csv(const std::filesystem::path& path, const std::string& column);
void write_csv(const PriceSeries& p, const std::filesystem::path& path, const std::string& column);

ReturnSeries log_returns(const PriceSeries& p);

// values[i] = anchor * exp(sum_{j<=i} r[j]); the anchor itself is not included.
std::vector<double> reconstruct_path(std::span<const double> returns, double anchor);

// Left inverse of log_returns: the anchor is prepended, so the result has size() + 1 points.
// Dates are taken from `r`, with `anchor_date` for the anchor.
PriceSeries reconstruct_prices(const ReturnSeries& r, double anchor, const Date& anchor_date = "");

std::vector<double> log_returns_of(std::span<const double> prices);

// Chronological split. Throws LengthMismatch unless train_len + test_len == size and both >= 1.
std::pair<PriceSeries, PriceSeries> split(const PriceSeries& series, SplitSpec spec);
std::pair<ReturnSeries, ReturnSeries> split(const ReturnSeries& series, SplitSpec spec);

// Default 93/7 chronological split used when no explicit spec is given.
SplitSpec default_split(std::size_t total);

}  // namespace eqf
