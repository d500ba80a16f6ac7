#include "eqf/timeseries.hpp"

#include "eqf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace eqf {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

bool is_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

template <typename Series>
void check_split(const Series& s, SplitSpec spec) {
    if (spec.train_len < 1 || spec.test_len < 1 || spec.train_len + spec.test_len != s.size()) {
        throw Error(Errc::LengthMismatch, "split " + std::to_string(spec.train_len) + ":" +
                                              std::to_string(spec.test_len) + " does not cover length " +
                                              std::to_string(s.size()));
    }
}

template <typename T>
std::vector<T> slice(const std::vector<T>& v, std::size_t from, std::size_t to) {
    return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to));
}

}  // namespace

void PriceSeries::validate() const {
    if (values.size() < 2) throw Error(Errc::SeriesTooShort, "price series needs at least 2 points");
    if (dates.size() != values.size()) throw Error(Errc::LengthMismatch, "dates and values differ in length");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] <= 0.0) throw Error(Errc::NonPositivePrice, dates[i]);
        if (i > 0 && !(dates[i - 1] < dates[i])) throw Error(Errc::DuplicateDate, dates[i]);
    }
}

PriceSeries load_csv(const std::filesystem::path& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::MissingColumn, "empty file " + path.string());
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_fields(line);
    const auto find_col = [&](std::string_view name) -> std::ptrdiff_t {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const auto date_col = find_col("date");
    if (date_col < 0) throw Error(Errc::MissingColumn, "date");
    const auto value_col = find_col(column);
    if (value_col < 0) throw Error(Errc::MissingColumn, column);

    struct Row {
        Date date;
        double value;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        const auto need = static_cast<std::size_t>(std::max(date_col, value_col));
        double value = 0.0;
        if (fields.size() <= need || !is_iso_date(fields[static_cast<std::size_t>(date_col)]) ||
            !parse_double(fields[static_cast<std::size_t>(value_col)], value)) {
            throw Error(Errc::UnparseableRow, "line " + std::to_string(line_no));
        }
        rows.push_back({Date(fields[static_cast<std::size_t>(date_col)]), value});
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });

    PriceSeries out;
    out.label = column;
    out.dates.reserve(rows.size());
    out.values.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!std::isfinite(rows[i].value) || rows[i].value <= 0.0) throw Error(Errc::NonPositivePrice, rows[i].date);
        if (i > 0 && rows[i].date == rows[i - 1].date) throw Error(Errc::DuplicateDate, rows[i].date);
        out.dates.push_back(rows[i].date);
        out.values.push_back(rows[i].value);
    }
    if (out.size() < 2) throw Error(Errc::SeriesTooShort, path.string());
    return out;
}

void write_csv(const PriceSeries& p, const std::filesystem::path& path, const std::string& column) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    out << "date," << column << '\n';
    char buf[32];
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), p.values[i]);
        out << p.dates[i] << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    }
    if (!out) throw Error(Errc::IoError, "write failed " + path.string());
}

std::vector<double> log_returns_of(std::span<const double> prices) {
    if (prices.size() < 2) throw Error(Errc::SeriesTooShort, "need at least 2 prices");
    std::vector<double> r(prices.size() - 1);
    for (std::size_t i = 0; i + 1 < prices.size(); ++i) r[i] = std::log(prices[i + 1] / prices[i]);
    return r;
}

ReturnSeries log_returns(const PriceSeries& p) {
    if (p.size() < 2) throw Error(Errc::SeriesTooShort, "need at least 2 prices");
    ReturnSeries r;
    r.values = log_returns_of(p.values);
    r.dates = slice(p.dates, 1, p.dates.size());
    r.base_price = p.values.front();
    return r;
}

std::vector<double> reconstruct_path(std::span<const double> returns, double anchor) {
    if (!(anchor > 0.0) || !std::isfinite(anchor)) throw Error(Errc::InvalidAnchor, std::to_string(anchor));
    std::vector<double> out(returns.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        cum += returns[i];
        out[i] = anchor * std::exp(cum);
    }
    return out;
}

PriceSeries reconstruct_prices(const ReturnSeries& r, double anchor, const Date& anchor_date) {
    PriceSeries p;
    p.values.reserve(r.size() + 1);
    p.values.push_back(anchor);
    const auto path = reconstruct_path(r.values, anchor);
    p.values.insert(p.values.end(), path.begin(), path.end());
    p.dates.reserve(r.size() + 1);
    p.dates.push_back(anchor_date);
    p.dates.insert(p.dates.end(), r.dates.begin(), r.dates.end());
    return p;
}

std::pair<PriceSeries, PriceSeries> split(const PriceSeries& series, SplitSpec spec) {
    check_split(series, spec);
    const auto n = series.size();
    PriceSeries train{slice(series.dates, 0, spec.train_len), slice(series.values, 0, spec.train_len), series.label};
    PriceSeries test{slice(series.dates, spec.train_len, n), slice(series.values, spec.train_len, n), series.label};
    return {std::move(train), std::move(test)};
}

std::pair<ReturnSeries, ReturnSeries> split(const ReturnSeries& series, SplitSpec spec) {
    check_split(series, spec);
    const auto n = series.size();
    ReturnSeries train{slice(series.dates, 0, spec.train_len), slice(series.values, 0, spec.train_len),
                       series.base_price};
    const double cum = std::accumulate(train.values.begin(), train.values.end(), 0.0);
    ReturnSeries test{slice(series.dates, spec.train_len, n), slice(series.values, spec.train_len, n),
                      series.base_price * std::exp(cum)};
    return {std::move(train), std::move(test)};
}

SplitSpec default_split(std::size_t total) {
    if (total < 2) throw Error(Errc::SeriesTooShort, "cannot split fewer than 2 points");
    auto test = static_cast<std::size_t>(std::llround(0.07 * static_cast<double>(total)));
    test = std::clamp<std::size_t>(test, 1, total - 1);
    return {total - test, test};
}

}  // namespace eqf
