#include "eqf/bench/pipeline.hpp"

#include "eqf/error.hpp"
#include "eqf/garch.hpp"
#include "eqf/hybrid.hpp"
#include "eqf/neural/models.hpp"
#include "eqf/var.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <limits>
#include <map>

namespace eqf::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename F>
auto stage(const std::string& name, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), name + ": " + e.detail());
    }
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Log returns of `prices` relative to the preceding `anchor`; NaN where a price is not positive.
std::vector<double> returns_from(double anchor, std::span<const double> prices) {
    std::vector<double> out(prices.size());
    double prev = anchor;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        out[i] = prev > 0.0 && prices[i] > 0.0 ? std::log(prices[i] / prev) : kNaN;
        prev = prices[i];
    }
    return out;
}

struct Path {
    std::vector<double> prices;
    std::vector<double> returns;
    std::vector<double> volatility;
};

// Return-space forecasts become prices: static paths compound from the anchor, rolling paths
// step off the previous actual price.
std::vector<double> prices_from_returns(std::span<const double> r, double anchor, std::span<const double> actual,
                                        bool rolling) {
    if (!rolling) return reconstruct_path(r, anchor);
    std::vector<double> out(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) out[k] = (k == 0 ? anchor : actual[k - 1]) * std::exp(r[k]);
    return out;
}

Path garch_path(const garch::GarchFit& fit, std::span<const double> hist_prices, std::span<const double> future,
                std::size_t horizon, bool rolling) {
    Path p;
    const double anchor = hist_prices.back();
    const auto hist_r = log_returns_of(hist_prices);
    p.returns.assign(horizon, fit.params.mu);
    p.prices = prices_from_returns(p.returns, anchor, future, rolling);
    if (!rolling) {
        p.volatility = garch::forecast_volatility(fit, hist_r, horizon);
    } else {
        const auto fut_r = returns_from(anchor, future);
        std::vector<double> ext = hist_r;
        for (std::size_t k = 0; k < horizon; ++k) {
            p.volatility.push_back(std::sqrt(garch::forecast_variance(fit, ext, 1)[0]));
            ext.push_back(fut_r[k]);
        }
    }
    return p;
}

template <typename Model>
std::vector<double> window_forecast(Model& model, std::span<const double> hist, std::span<const double> future,
                                    std::size_t horizon, bool rolling) {
    const std::size_t w = model.config.window;
    if (hist.size() < w) throw Error(Errc::SeriesTooShort, "history shorter than the model window");
    if (!rolling) return nn::predict_recursive(model, hist.last(w), horizon);
    const auto all = concat(hist, future);
    std::vector<double> out(horizon);
    for (std::size_t k = 0; k < horizon; ++k)
        out[k] = model.predict_next(std::span(all).subspan(hist.size() + k - w, w));
    return out;
}

Path lstm_path(nn::LstmWindowModel& model, std::span<const double> hist_prices, std::span<const double> future,
               std::size_t horizon, bool rolling) {
    Path p;
    p.prices = window_forecast(model, hist_prices, future, horizon, rolling);
    p.returns = returns_from(hist_prices.back(), p.prices);
    return p;
}

double nan_if_throws(const std::function<double()>& f) {
    try {
        return f();
    } catch (const Error&) {
        return kNaN;
    }
}

metrics::TheilVerdict theil_or_nan(std::span<const double> actual_with_prev, std::span<const double> forecast) {
    try {
        return metrics::theil_u2(actual_with_prev, forecast);
    } catch (const Error&) {
        return {kNaN, metrics::Verdict::Equal};
    }
}

std::vector<double> logs(std::span<const double> x) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return v > 0.0 ? std::log(v) : kNaN; });
    return out;
}

Growth growth_of(double anchor, double last) {
    Growth g;
    g.simple = last / anchor - 1.0;
    g.log = last > 0.0 ? std::log(last / anchor) : kNaN;
    return g;
}

struct Context {
    const RunConfig& cfg;
    std::vector<double> train_prices;
    std::vector<double> test_prices;
    std::vector<double> train_returns;
    std::vector<double> test_returns;
    double anchor = 0.0;
    double last_train_return = 0.0;
    std::size_t horizon = 0;
};

ModelResult score(const Context& ctx, std::string name, Path path, nlohmann::json details) {
    ModelResult m;
    m.name = std::move(name);
    m.prices = std::move(path.prices);
    m.returns = std::move(path.returns);
    m.volatility = std::move(path.volatility);
    m.return_metrics = metrics::error_metrics_lenient(ctx.test_returns, m.returns, "return");
    m.log_price_metrics = metrics::error_metrics_lenient(logs(ctx.test_prices), logs(m.prices), "log_price");
    m.price_metrics = metrics::error_metrics_lenient(ctx.test_prices, m.prices, "price");
    m.theil_prices = theil_or_nan(concat(std::vector<double>{ctx.anchor}, ctx.test_prices), m.prices);
    m.theil_returns = theil_or_nan(concat(std::vector<double>{ctx.last_train_return}, ctx.test_returns), m.returns);
    m.growth = growth_of(ctx.anchor, m.prices.back());
    m.details = std::move(details);
    return m;
}

nlohmann::json selection_json(const var::OrderSelection& sel) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : sel.table)
        rows.push_back({{"p", r.order},
                        {"aic", r.criteria.aic},
                        {"bic", r.criteria.bic},
                        {"hqic", r.criteria.hqic},
                        {"fpe", r.criteria.fpe},
                        {"log_likelihood", r.criteria.log_likelihood}});
    return {{"chosen", sel.chosen}, {"table", rows}};
}

}  // namespace

const ModelResult* RunReport::find(const std::string& name) const {
    for (const auto& m : models)
        if (m.name == name) return &m;
    return nullptr;
}

double metric_value(const ModelResult& m, const std::string& target, const std::string& row) {
    const auto& t = target == "prices" ? m.price_metrics : target == "log_prices" ? m.log_price_metrics : m.return_metrics;
    if (row == "MAPE") return t.mape;
    if (row == "ME") return t.me;
    if (row == "MAE") return t.mae;
    if (row == "MPE") return t.mpe;
    if (row == "RMSE") return t.rmse;
    if (row == "CORRELATION") return t.correlation;
    if (row == "MINMAX") return t.minmax;
    if (row == "THEIL_U2") return target == "prices" ? m.theil_prices.u2 : m.theil_returns.u2;
    throw Error(Errc::ConfigError, "unknown metric row '" + row + "'");
}

std::string best_model(const RunReport& r, const std::string& target, const std::string& row) {
    std::string best;
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& m : r.models) {
        const double v = metric_value(m, target, row);
        if (!std::isfinite(v)) continue;
        const double s = row == "CORRELATION" ? -v : std::abs(v);
        if (s < best_score) {
            best_score = s;
            best = m.name;
        }
    }
    return best;
}

LoadedData load_inputs(const RunConfig& cfg) {
    LoadedData d;
    d.primary = load_csv(cfg.data, cfg.column);
    d.primary.label = std::filesystem::path(cfg.data).stem().string();
    if (cfg.second_data.empty()) return d;
    auto second = load_csv(cfg.second_data, cfg.column);
    second.label = std::filesystem::path(cfg.second_data).stem().string();
    // Inner join on dates; both inputs are sorted.
    PriceSeries a, b;
    a.label = d.primary.label;
    b.label = second.label;
    std::size_t i = 0, j = 0;
    while (i < d.primary.size() && j < second.size()) {
        if (d.primary.dates[i] < second.dates[j]) {
            ++i;
        } else if (second.dates[j] < d.primary.dates[i]) {
            ++j;
        } else {
            a.dates.push_back(d.primary.dates[i]);
            a.values.push_back(d.primary.values[i]);
            b.dates.push_back(second.dates[j]);
            b.values.push_back(second.values[j]);
            ++i;
            ++j;
        }
    }
    if (a.size() < 3) throw Error(Errc::SeriesTooShort, "the two series share fewer than 3 dates");
    d.primary = std::move(a);
    d.second = std::move(b);
    return d;
}

Diagnostics diagnose(const LoadedData& data, std::size_t correlogram_lags) {
    Diagnostics d;
    const auto r = log_returns(data.primary).values;
    d.returns = stats::describe(r);
    d.prices = stats::describe(data.primary.values);
    d.adf_prices = stats::adf_test(data.primary.values);
    d.adf_returns = stats::adf_test(r);
    if (data.second) d.price_correlation = stats::pearson(data.primary.values, data.second->values);
    const std::size_t lags = std::min(correlogram_lags, (r.size() - 1) / 2);
    if (lags >= 1 && !d.returns.degenerate_variance) {
        d.acf = stats::acf(r, lags);
        d.pacf = stats::pacf(r, lags);
    }
    return d;
}

RunReport run_pipeline(const RunConfig& cfg) {
    stage("config", [&] {
        validate(cfg);
        return 0;
    });
    const LoadedData data = stage("ingest", [&] { return load_inputs(cfg); });
    const std::size_t total = data.primary.size();
    const SplitSpec spec = cfg.split ? *cfg.split : default_split(total);
    const auto [train, test] = stage("split", [&] { return split(data.primary, spec); });

    RunReport report;
    report.generated_at = utc_now();
    report.config = to_json(cfg);
    report.config_hash = config_hash(cfg);
    report.mode = cfg.rolling ? "rolling" : "static";
    report.label = data.primary.label;
    report.train_len = train.size();
    report.test_len = test.size();
    report.train_end_date = train.dates.back();
    report.full_prices = data.primary.values;
    report.test_dates = test.dates;
    report.diagnostics = stage("diagnose", [&] { return diagnose(data, cfg.correlogram_lags); });

    Context ctx{cfg, train.values, test.values, log_returns_of(train.values), {}, train.values.back(), 0.0, test.size()};
    ctx.test_returns = returns_from(ctx.anchor, ctx.test_prices);
    ctx.last_train_return = ctx.train_returns.back();
    report.anchor_price = ctx.anchor;
    report.actual_prices = ctx.test_prices;
    report.actual_returns = ctx.test_returns;
    report.actual_growth = growth_of(ctx.anchor, ctx.test_prices.back());

    const bool hybrid = cfg.enabled("garch") && cfg.enabled("lstm");
    const std::size_t H = ctx.horizon;
    const bool rolling = cfg.rolling;

    // With the hybrid active, GARCH and LSTM fit on the head of training and the tail scores them.
    std::size_t fit_len = ctx.train_prices.size();
    std::size_t val_len = 0;
    if (hybrid) {
        val_len = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(cfg.validation_fraction *
                                                                               static_cast<double>(fit_len))));
        if (val_len + 3 > fit_len) throw Error(Errc::SeriesTooShort, "hybrid: training too short for a validation slice");
        fit_len -= val_len;
    }
    const std::span<const double> fit_prices(ctx.train_prices.data(), fit_len);
    const std::span<const double> val_prices(ctx.train_prices.data() + fit_len, val_len);

    std::optional<garch::GarchFit> gfit;
    std::optional<nn::LstmWindowModel> lstm;
    Path garch_test, lstm_test;

    if (cfg.enabled("garch")) {
        gfit = stage("garch", [&] {
            return garch::fit_garch(log_returns_of(fit_prices), {cfg.garch_p, cfg.garch_q});
        });
        garch_test = stage("garch", [&] { return garch_path(*gfit, ctx.train_prices, ctx.test_prices, H, rolling); });
        nlohmann::json details = garch::to_json(*gfit);
        details["persistence"] = gfit->params.persistence();
        details["unconditional_volatility"] = std::sqrt(gfit->params.unconditional_variance());
        details["fit_observations"] = fit_len - 1;
        report.models.push_back(score(ctx, "garch", garch_test, details));

        std::vector<double> sq(ctx.test_returns.size()), var(garch_test.volatility.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = ctx.test_returns[i] * ctx.test_returns[i];
        for (std::size_t i = 0; i < var.size(); ++i) var[i] = garch_test.volatility[i] * garch_test.volatility[i];
        report.volatility_metrics = metrics::error_metrics_lenient(sq, var, "variance");
    }

    if (cfg.enabled("var")) {
        report.models.push_back(stage("var", [&] {
            const auto& second = *data.second;
            const std::vector<double> s_train(second.values.begin(), second.values.begin() + static_cast<std::ptrdiff_t>(spec.train_len));
            const std::vector<double> s_test(second.values.begin() + static_cast<std::ptrdiff_t>(spec.train_len), second.values.end());
            const std::vector<std::vector<double>> cols{ctx.train_returns, log_returns_of(s_train)};
            const Eigen::MatrixXd y = var::stack_series(cols);
            nlohmann::json details;
            std::size_t order = cfg.var_order;
            if (order == 0) {
                const std::size_t max_p = std::min(cfg.var_max_p, (static_cast<std::size_t>(y.rows()) - 1) / 3);
                const auto sel = var::select_order(y, max_p);
                order = sel.chosen;
                details["selection"] = selection_json(sel);
            }
            const auto fit = var::fit_var_ols(y, {2, order, true});
            Path p;
            if (!rolling) {
                const Eigen::MatrixXd fc = var::forecast_var(fit, y.bottomRows(static_cast<Eigen::Index>(order)), H);
                p.returns.assign(fc.col(0).data(), fc.col(0).data() + H);
            } else {
                const std::vector<double> s_fut = returns_from(s_train.back(), s_test);
                Eigen::MatrixXd all(y.rows() + static_cast<Eigen::Index>(H), 2);
                all.topRows(y.rows()) = y;
                for (std::size_t k = 0; k < H; ++k) all.row(y.rows() + static_cast<Eigen::Index>(k)) << ctx.test_returns[k], s_fut[k];
                for (std::size_t k = 0; k < H; ++k) {
                    const auto start = y.rows() + static_cast<Eigen::Index>(k) - static_cast<Eigen::Index>(order);
                    p.returns.push_back(var::predict_next(fit, all.middleRows(start, static_cast<Eigen::Index>(order)))(0));
                }
            }
            p.prices = prices_from_returns(p.returns, ctx.anchor, ctx.test_prices, rolling);
            details["fit"] = var::to_json(fit);
            return score(ctx, "var", p, details);
        }));
    }

    if (cfg.enabled("lstm")) {
        lstm = stage("lstm", [&] { return nn::fit_lstm_window_model(fit_prices, cfg.lstm); });
        lstm_test = stage("lstm", [&] { return lstm_path(*lstm, ctx.train_prices, ctx.test_prices, H, rolling); });
        nlohmann::json details{{"target", "price"},
                               {"window", cfg.lstm.window},
                               {"epochs", cfg.lstm.epochs},
                               {"seed", cfg.lstm.seed},
                               {"units", nn::LstmWindowModel::kUnits},
                               {"parameters", lstm->net.parameter_count()},
                               {"fit_observations", fit_len},
                               {"loss_history", lstm->loss_history}};
        report.models.push_back(score(ctx, "lstm", lstm_test, details));
    }

    if (cfg.enabled("cnn")) {
        report.models.push_back(stage("cnn", [&] {
            auto model = nn::fit_cnn3d(ctx.train_returns, cfg.cnn, cfg.cnn_dims);
            Path p;
            p.returns = window_forecast(model, ctx.train_returns, ctx.test_returns, H, rolling);
            p.prices = prices_from_returns(p.returns, ctx.anchor, ctx.test_prices, rolling);
            nlohmann::json details{{"target", "return"},
                                   {"window", cfg.cnn.window},
                                   {"epochs", cfg.cnn.epochs},
                                   {"seed", cfg.cnn.seed},
                                   {"dims", cfg.cnn_dims},
                                   {"parameters", model.net.parameter_count()},
                                   {"loss_history", model.loss_history}};
            return score(ctx, "cnn", p, details);
        }));
    }

    if (hybrid) {
        report.models.push_back(stage("hybrid", [&] {
            const std::vector<double> val_future(val_prices.begin(), val_prices.end());
            const auto gv = garch_path(*gfit, fit_prices, val_future, val_len, rolling);
            const auto lv = lstm_path(*lstm, fit_prices, val_future, val_len, rolling);
            const auto w = hybrid::compute_weights(val_future, gv.prices, lv.prices);
            const auto h = hybrid::combine(garch_test.prices, lstm_test.prices, w, garch_test.volatility);
            Path p;
            p.prices = h.combined;
            p.returns = returns_from(ctx.anchor, p.prices);
            p.volatility = h.volatility;
            nlohmann::json details{{"w_garch", w.w_garch},
                                   {"w_lstm", w.w_lstm},
                                   {"validation_observations", val_len},
                                   {"validation_rmse_garch", nan_if_throws([&] {
                                        return metrics::root_mean_squared_error(val_future, gv.prices);
                                    })},
                                   {"validation_rmse_lstm", nan_if_throws([&] {
                                        return metrics::root_mean_squared_error(val_future, lv.prices);
                                    })}};
            return score(ctx, "garch_lstm", p, details);
        }));
    }
    return report;
}

}  // namespace eqf::bench
