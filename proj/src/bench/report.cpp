#include "eqf/bench/report.hpp"

#include "eqf/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace eqf::bench {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double real(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::vector<double> reals(const json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(real(x));
    return out;
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string pct(double v, int decimals = 2) {
    if (!std::isfinite(v)) return "n/a";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << 100.0 * v << "%";
    return os.str();
}

json metrics_json(const metrics::MetricsTable& t) {
    return {{"mape", num(t.mape)},
            {"mape_pct", num(100.0 * t.mape)},
            {"me", num(t.me)},
            {"mae", num(t.mae)},
            {"mpe", num(t.mpe)},
            {"mpe_pct", num(100.0 * t.mpe)},
            {"rmse", num(t.rmse)},
            {"correlation", num(t.correlation)},
            {"minmax", num(t.minmax)},
            {"n", t.n},
            {"target_kind", t.target_kind}};
}

metrics::MetricsTable metrics_from(const json& j) {
    metrics::MetricsTable t;
    t.mape = real(j.at("mape"));
    t.me = real(j.at("me"));
    t.mae = real(j.at("mae"));
    t.mpe = real(j.at("mpe"));
    t.rmse = real(j.at("rmse"));
    t.correlation = real(j.at("correlation"));
    t.minmax = real(j.at("minmax"));
    t.n = j.at("n").get<std::size_t>();
    t.target_kind = j.at("target_kind").get<std::string>();
    return t;
}

json theil_json(const metrics::TheilVerdict& v) {
    if (!std::isfinite(v.u2)) return {{"u2", nullptr}, {"verdict", nullptr}};
    return {{"u2", v.u2}, {"verdict", std::string(metrics::verdict_name(v.verdict))}};
}

metrics::TheilVerdict theil_from(const json& j) {
    metrics::TheilVerdict v;
    v.u2 = real(j.at("u2"));
    if (std::isfinite(v.u2)) v.verdict = metrics::classify_u2(v.u2);
    return v;
}

json describe_json(const stats::DescriptiveStats& d) {
    return {{"n", d.n},           {"mean", num(d.mean)},         {"median", num(d.median)},
            {"std_dev", num(d.std_dev)}, {"variance", num(d.variance)}, {"min", num(d.min)},
            {"max", num(d.max)},  {"skewness", num(d.skewness)}, {"kurtosis", num(d.kurtosis)},
            {"degenerate_variance", d.degenerate_variance}};
}

stats::DescriptiveStats describe_from(const json& j) {
    stats::DescriptiveStats d;
    d.n = j.at("n").get<std::size_t>();
    d.mean = real(j.at("mean"));
    d.median = real(j.at("median"));
    d.std_dev = real(j.at("std_dev"));
    d.variance = real(j.at("variance"));
    d.min = real(j.at("min"));
    d.max = real(j.at("max"));
    d.skewness = real(j.at("skewness"));
    d.kurtosis = real(j.at("kurtosis"));
    d.degenerate_variance = j.at("degenerate_variance").get<bool>();
    return d;
}

json adf_json(const stats::AdfResult& a) {
    return {{"t_statistic", num(a.t_statistic)},
            {"lags_used", a.lags_used},
            {"nobs", a.nobs},
            {"critical_values", {{"1%", a.critical_values.pct1}, {"5%", a.critical_values.pct5}, {"10%", a.critical_values.pct10}}},
            {"is_stationary", a.is_stationary}};
}

stats::AdfResult adf_from(const json& j) {
    stats::AdfResult a;
    a.t_statistic = real(j.at("t_statistic"));
    a.lags_used = j.at("lags_used").get<std::size_t>();
    a.nobs = j.at("nobs").get<std::size_t>();
    const auto& cv = j.at("critical_values");
    a.critical_values = {cv.at("1%").get<double>(), cv.at("5%").get<double>(), cv.at("10%").get<double>()};
    a.is_stationary = j.at("is_stationary").get<bool>();
    return a;
}

json correlogram_json(const std::vector<stats::CorrelogramPoint>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back({{"lag", p.lag}, {"value", num(p.value)}, {"band", num(p.confidence_band)}});
    return a;
}

std::vector<stats::CorrelogramPoint> correlogram_from(const json& j) {
    std::vector<stats::CorrelogramPoint> out;
    for (const auto& p : j) out.push_back({p.at("lag").get<std::size_t>(), real(p.at("value")), real(p.at("band"))});
    return out;
}

json growth_json(const Growth& g) { return {{"simple", num(g.simple)}, {"log", num(g.log)}}; }
Growth growth_from(const json& j) { return {real(j.at("simple")), real(j.at("log"))}; }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

json to_json(const RunReport& r) {
    json j;
    j["schema"] = r.schema;
    j["generated_at"] = r.generated_at;
    j["provenance"] = {{"config_hash", r.config_hash}, {"config", r.config}, {"mode", r.mode}};
    j["conventions"] = {{"error", "forecast - actual"},
                        {"mape", "fraction (mape_pct = x100)"},
                        {"volatility_proxy", r.volatility_proxy}};
    j["data"] = {{"label", r.label},
                 {"train_len", r.train_len},
                 {"test_len", r.test_len},
                 {"train_end_date", r.train_end_date},
                 {"anchor_price", r.anchor_price},
                 {"full_prices", nums(r.full_prices)},
                 {"test_dates", r.test_dates},
                 {"actual_prices", nums(r.actual_prices)},
                 {"actual_returns", nums(r.actual_returns)},
                 {"actual_growth", growth_json(r.actual_growth)}};
    const auto& d = r.diagnostics;
    j["diagnostics"] = {{"returns", describe_json(d.returns)},
                        {"prices", describe_json(d.prices)},
                        {"adf_prices", adf_json(d.adf_prices)},
                        {"adf_returns", adf_json(d.adf_returns)},
                        {"price_correlation", d.price_correlation ? num(*d.price_correlation) : json(nullptr)},
                        {"acf", correlogram_json(d.acf)},
                        {"pacf", correlogram_json(d.pacf)}};
    json models = json::array();
    for (const auto& m : r.models) {
        models.push_back({{"name", m.name},
                          {"forecast", {{"prices", nums(m.prices)}, {"returns", nums(m.returns)}, {"volatility", nums(m.volatility)}}},
                          {"metrics",
                           {{"returns", metrics_json(m.return_metrics)},
                            {"log_prices", metrics_json(m.log_price_metrics)},
                            {"prices", metrics_json(m.price_metrics)}}},
                          {"theil_u2", {{"prices", theil_json(m.theil_prices)}, {"returns", theil_json(m.theil_returns)}}},
                          {"growth", growth_json(m.growth)},
                          {"details", m.details}});
    }
    j["models"] = models;
    json best;
    for (const std::string target : {"prices", "returns"})
        for (const auto& row : kMetricRows) best[target][row] = best_model(r, target, row);
    j["best"] = best;
    j["volatility_metrics"] = r.volatility_metrics ? metrics_json(*r.volatility_metrics) : json(nullptr);
    return j;
}

RunReport report_from_json(const json& j) {
    try {
        RunReport r;
        r.schema = j.at("schema").get<int>();
        if (r.schema != 1) throw Error(Errc::IoError, "unsupported report schema " + std::to_string(r.schema));
        r.generated_at = j.at("generated_at").get<std::string>();
        const auto& prov = j.at("provenance");
        r.config_hash = prov.at("config_hash").get<std::string>();
        r.config = prov.at("config");
        r.mode = prov.at("mode").get<std::string>();
        r.volatility_proxy = j.at("conventions").at("volatility_proxy").get<std::string>();
        const auto& data = j.at("data");
        r.label = data.at("label").get<std::string>();
        r.train_len = data.at("train_len").get<std::size_t>();
        r.test_len = data.at("test_len").get<std::size_t>();
        r.train_end_date = data.at("train_end_date").get<std::string>();
        r.anchor_price = data.at("anchor_price").get<double>();
        r.full_prices = reals(data.at("full_prices"));
        r.test_dates = data.at("test_dates").get<std::vector<std::string>>();
        r.actual_prices = reals(data.at("actual_prices"));
        r.actual_returns = reals(data.at("actual_returns"));
        r.actual_growth = growth_from(data.at("actual_growth"));
        const auto& d = j.at("diagnostics");
        r.diagnostics.returns = describe_from(d.at("returns"));
        r.diagnostics.prices = describe_from(d.at("prices"));
        r.diagnostics.adf_prices = adf_from(d.at("adf_prices"));
        r.diagnostics.adf_returns = adf_from(d.at("adf_returns"));
        if (!d.at("price_correlation").is_null()) r.diagnostics.price_correlation = d.at("price_correlation").get<double>();
        r.diagnostics.acf = correlogram_from(d.at("acf"));
        r.diagnostics.pacf = correlogram_from(d.at("pacf"));
        for (const auto& mj : j.at("models")) {
            ModelResult m;
            m.name = mj.at("name").get<std::string>();
            m.prices = reals(mj.at("forecast").at("prices"));
            m.returns = reals(mj.at("forecast").at("returns"));
            m.volatility = reals(mj.at("forecast").at("volatility"));
            m.return_metrics = metrics_from(mj.at("metrics").at("returns"));
            m.log_price_metrics = metrics_from(mj.at("metrics").at("log_prices"));
            m.price_metrics = metrics_from(mj.at("metrics").at("prices"));
            m.theil_prices = theil_from(mj.at("theil_u2").at("prices"));
            m.theil_returns = theil_from(mj.at("theil_u2").at("returns"));
            m.growth = growth_from(mj.at("growth"));
            m.details = mj.at("details");
            r.models.push_back(std::move(m));
        }
        if (!j.at("volatility_metrics").is_null()) r.volatility_metrics = metrics_from(j.at("volatility_metrics"));
        return r;
    } catch (const json::exception& e) {
        throw Error(Errc::IoError, std::string("malformed report: ") + e.what());
    }
}

json comparable(const json& report) {
    json c = report;
    c.erase("generated_at");
    return c;
}

std::string metrics_csv(const RunReport& r, const std::string& target) {
    std::ostringstream os;
    os << "metric";
    for (const auto& m : r.models) os << ',' << m.name;
    os << ",BEST\n";
    for (const auto& row : kMetricRows) {
        os << row;
        for (const auto& m : r.models) os << ',' << fmt(metric_value(m, target, row));
        os << ',' << best_model(r, target, row) << '\n';
    }
    return os.str();
}

MetricsCsv parse_metrics_csv(const std::string& text) {
    MetricsCsv out;
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) throw Error(Errc::IoError, "empty metrics CSV");
    auto header = split_csv_line(line);
    if (header.empty() || header.front() != "metric" || header.back() != "BEST")
        throw Error(Errc::IoError, "metrics CSV header must start with 'metric' and end with 'BEST'");
    out.columns.assign(header.begin() + 1, header.end());
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw Error(Errc::IoError, "metrics CSV row '" + cells.front() + "' has the wrong number of cells");
        out.rows.push_back(cells.front());
        out.cells.emplace_back(cells.begin() + 1, cells.end());
    }
    return out;
}

std::string summary_text(const RunReport& r) {
    std::ostringstream os;
    const std::string first = r.test_dates.empty() ? "" : r.test_dates.front();
    const std::string last = r.test_dates.empty() ? "" : r.test_dates.back();
    os << "Series: " << r.label << "\n";
    os << "Training: " << r.train_len << " prices ending " << r.train_end_date << "; test horizon: " << r.test_len
       << " steps (" << first << " to " << last << "), " << r.mode << " forecasts.\n";
    os << "Errors are forecast minus actual. MAPE is shown as a percentage.\n\n";
    os << "Over the test horizon the series moved from " << fmt(r.anchor_price) << " to "
       << fmt(r.actual_prices.empty() ? r.anchor_price : r.actual_prices.back()) << ": growth "
       << pct(r.actual_growth.simple) << " (log growth " << pct(r.actual_growth.log) << ").\n\n";
    for (const auto& m : r.models) {
        os << "[" << m.name << "]\n";
        os << "  forecast growth " << pct(m.growth.simple) << " (log " << pct(m.growth.log) << ") against actual "
           << pct(r.actual_growth.simple) << "\n";
        os << "  price RMSE " << fmt(m.price_metrics.rmse) << ", MAE " << fmt(m.price_metrics.mae) << ", MAPE "
           << pct(m.price_metrics.mape, 4) << ", correlation " << fmt(m.price_metrics.correlation) << "\n";
        if (std::isfinite(m.theil_prices.u2)) {
            const auto v = m.theil_prices.verdict;
            os << "  Theil U2 " << fmt(m.theil_prices.u2) << ": the forecast is "
               << (v == metrics::Verdict::Worse   ? "worse than guessing"
                   : v == metrics::Verdict::Equal ? "equal to guessing"
                                                  : "better than guessing")
               << "\n";
        } else {
            os << "  Theil U2 undefined for this horizon\n";
        }
        if (m.name == "garch_lstm" && m.details.contains("w_garch"))
            os << "  weights: garch " << fmt(m.details["w_garch"].get<double>()) << ", lstm "
               << fmt(m.details["w_lstm"].get<double>()) << "\n";
    }
    os << "\nBest by metric (prices):";
    for (const auto& row : kMetricRows) {
        const auto b = best_model(r, "prices", row);
        os << " " << row << "=" << (b.empty() ? "-" : b);
    }
    os << "\n";
    return os.str();
}

std::string correlogram_csv(const RunReport& r) {
    std::ostringstream os;
    os << "kind,lag,value,band\n";
    for (const auto& p : r.diagnostics.acf) os << "acf," << p.lag << ',' << fmt(p.value) << ',' << fmt(p.confidence_band) << '\n';
    for (const auto& p : r.diagnostics.pacf) os << "pacf," << p.lag << ',' << fmt(p.value) << ',' << fmt(p.confidence_band) << '\n';
    return os.str();
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

std::vector<std::filesystem::path> emit_report(const RunReport& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written{dir / "report.json", dir / "metrics_prices.csv", dir / "metrics_returns.csv",
                                               dir / "summary.txt", dir / "correlogram.csv"};
    write_text(written[0], to_json(r).dump(2) + "\n");
    write_text(written[1], metrics_csv(r, "prices"));
    write_text(written[2], metrics_csv(r, "returns"));
    write_text(written[3], summary_text(r));
    write_text(written[4], correlogram_csv(r));
    return written;
}

RunReport load_report(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::IoError, path.string() + ": " + e.what());
    }
    return report_from_json(j);
}

}  // namespace eqf::bench
