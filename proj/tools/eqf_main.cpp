// eqf: equity forecasting bench. Subcommands: diagnose, fit, forecast, backtest, report.
#include "eqf/bench/config.hpp"
#include "eqf/bench/pipeline.hpp"
#include "eqf/bench/plots.hpp"
#include "eqf/bench/report.hpp"
#include "eqf/error.hpp"
#include "eqf/garch.hpp"
#include "eqf/neural/checkpoint.hpp"
#include "eqf/var.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <sstream>

namespace {

using namespace eqf;
using namespace eqf::bench;

struct CommonFlags {
    std::string config, data, second_data, split, models, out;
    std::optional<std::uint64_t> seed;
    bool rolling = false;
    std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "key=value configuration file");
    cmd->add_option("--data", f.data, "primary price CSV (date,<column>)");
    cmd->add_option("--second-data", f.second_data, "second price CSV, required by the var model");
    cmd->add_option("--split", f.split, "TRAIN:TEST counts of prices");
    cmd->add_option("--models", f.models, "comma list of garch,var,lstm,cnn");
    cmd->add_option("--seed", f.seed, "seed for every stochastic component");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_flag("--rolling", f.rolling, "rolling one-step forecasts instead of static multi-step");
    cmd->add_option("--set", f.settings, "extra key=value override, repeatable (e.g. --set epochs=10)");
}

RunConfig resolve(const CommonFlags& f) {
    RunConfig cfg;
    if (!f.config.empty()) apply_config_file(cfg, f.config);
    if (!f.data.empty()) cfg.data = f.data;
    if (!f.second_data.empty()) cfg.second_data = f.second_data;
    if (!f.split.empty()) cfg.split = parse_split(f.split);
    if (!f.models.empty()) cfg.models = parse_models(f.models);
    if (f.seed) set_seed(cfg, *f.seed);
    if (!f.out.empty()) cfg.out = f.out;
    if (f.rolling) cfg.rolling = true;
    for (const auto& s : f.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw Error(Errc::ConfigError, "--set expects key=value, got '" + s + "'");
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    return cfg;
}

int cmd_diagnose(const CommonFlags& f) {
    RunConfig cfg = resolve(f);
    if (cfg.data.empty()) throw Error(Errc::ConfigError, "no primary data file given");
    const auto data = load_inputs(cfg);
    const auto d = diagnose(data, cfg.correlogram_lags);
    RunReport shell;
    shell.label = data.primary.label;
    shell.diagnostics = d;
    const auto j = to_json(shell)["diagnostics"];
    std::cout << j.dump(2) << "\n";
    if (!f.out.empty()) {
        std::filesystem::create_directories(cfg.out);
        write_text(std::filesystem::path(cfg.out) / "diagnostics.json", j.dump(2) + "\n");
        write_text(std::filesystem::path(cfg.out) / "correlogram.csv", correlogram_csv(shell));
    }
    return 0;
}

int cmd_fit(const CommonFlags& f) {
    RunConfig cfg = resolve(f);
    validate(cfg);
    const auto data = load_inputs(cfg);
    const SplitSpec spec = cfg.split ? *cfg.split : default_split(data.primary.size());
    const auto train = split(data.primary, spec).first;
    const auto r = log_returns_of(train.values);
    const std::filesystem::path dir = cfg.out;
    std::filesystem::create_directories(dir);
    for (const auto& m : cfg.models) {
        std::filesystem::path path;
        if (m == "garch") {
            path = dir / "garch.json";
            write_text(path, garch::to_json(garch::fit_garch(r, {cfg.garch_p, cfg.garch_q})).dump(2) + "\n");
        } else if (m == "var") {
            const auto s_train = split(*data.second, spec).first;
            const std::vector<std::vector<double>> cols{r, log_returns_of(s_train.values)};
            const auto y = var::stack_series(cols);
            std::size_t order = cfg.var_order;
            if (order == 0)
                order = var::select_order(y, std::min(cfg.var_max_p, (static_cast<std::size_t>(y.rows()) - 1) / 3)).chosen;
            path = dir / "var.json";
            write_text(path, var::to_json(var::fit_var_ols(y, {2, order, true})).dump(2) + "\n");
        } else if (m == "lstm") {
            auto model = nn::fit_lstm_window_model(train.values, cfg.lstm);
            path = dir / "lstm.ckpt";
            nn::write_checkpoint(path, nn::to_checkpoint(model));
        } else if (m == "cnn") {
            auto model = nn::fit_cnn3d(r, cfg.cnn, cfg.cnn_dims);
            path = dir / "cnn.ckpt";
            nn::write_checkpoint(path, nn::to_checkpoint(model));
        }
        std::cout << m << " -> " << path.string() << "\n";
    }
    return 0;
}

int cmd_forecast(const CommonFlags& f) {
    const RunConfig cfg = resolve(f);
    const auto report = run_pipeline(cfg);
    std::ostringstream os;
    os << "date,actual";
    for (const auto& m : report.models) os << ',' << m.name;
    os << '\n';
    auto num = [](double v) {
        char buf[32];
        return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
    };
    for (std::size_t i = 0; i < report.test_len; ++i) {
        os << report.test_dates[i] << ',' << num(report.actual_prices[i]);
        for (const auto& m : report.models) os << ',' << num(m.prices[i]);
        os << '\n';
    }
    std::filesystem::create_directories(cfg.out);
    const auto path = std::filesystem::path(cfg.out) / "forecasts.csv";
    write_text(path, os.str());
    std::cout << "forecasts -> " << path.string() << "\n";
    return 0;
}

int cmd_backtest(const CommonFlags& f, bool plots) {
    const RunConfig cfg = resolve(f);
    const auto report = run_pipeline(cfg);
    for (const auto& p : emit_report(report, cfg.out)) std::cout << p.string() << "\n";
    if (plots)
        for (const auto& p : plots::emit_plots(report, std::filesystem::path(cfg.out) / "plots")) std::cout << p.string() << "\n";
    std::cout << "\n" << summary_text(report);
    return 0;
}

int cmd_report(const std::string& report_path, const std::string& out, bool plots) {
    const auto report = load_report(report_path);
    const std::filesystem::path dir = out.empty() ? std::filesystem::path(report_path).parent_path() : std::filesystem::path(out);
    for (const auto& p : emit_report(report, dir)) std::cout << p.string() << "\n";
    if (plots)
        for (const auto& p : plots::emit_plots(report, dir / "plots")) std::cout << p.string() << "\n";
    std::cout << "\n" << summary_text(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equity forecasting bench: GARCH, VAR, LSTM and 3D-CNN backtests on daily prices"};
    app.require_subcommand(1);

    CommonFlags diag_f, fit_f, fc_f, bt_f;
    bool bt_no_plots = false, rep_no_plots = false;
    std::string rep_path, rep_out;

    auto* diag = app.add_subcommand("diagnose", "descriptive statistics, ADF tests and correlogram");
    add_common(diag, diag_f);
    auto* fit = app.add_subcommand("fit", "fit the enabled models on the training split and save them");
    add_common(fit, fit_f);
    auto* fc = app.add_subcommand("forecast", "fit and forecast the test horizon; writes forecasts.csv");
    add_common(fc, fc_f);
    auto* bt = app.add_subcommand("backtest", "full pipeline: report.json, metric tables, summary, plots");
    add_common(bt, bt_f);
    bt->add_flag("--no-plots", bt_no_plots, "skip SVG output");
    auto* rep = app.add_subcommand("report", "re-render tables, summary and plots from a saved report.json");
    rep->add_option("--report", rep_path, "path to report.json")->required();
    rep->add_option("--out", rep_out, "output directory (defaults to the report's directory)");
    rep->add_flag("--no-plots", rep_no_plots, "skip SVG output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*diag) return cmd_diagnose(diag_f);
        if (*fit) return cmd_fit(fit_f);
        if (*fc) return cmd_forecast(fc_f);
        if (*bt) return cmd_backtest(bt_f, !bt_no_plots);
        if (*rep) return cmd_report(rep_path, rep_out, !rep_no_plots);
    } catch (const Error& e) {
        std::cerr << "eqf: " << e.what() << "\n";
        return is_numerical(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "eqf: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
