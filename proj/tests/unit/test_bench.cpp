#include "eqf/bench/config.hpp"
#include "eqf/bench/pipeline.hpp"
#include "eqf/bench/plots.hpp"
#include "eqf/bench/report.hpp"
#include "eqf/error.hpp"
#include "eqf/garch.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <regex>

using namespace eqf;
using namespace eqf::bench;

namespace {

const std::string kData = std::string(EQF_DATA_DIR) + "/sp500_sample.csv";
const std::string kSecond = std::string(EQF_DATA_DIR) + "/spdr_sample.csv";

// 300 GARCH-driven prices written to a temp CSV.
std::string small_series() {
    garch::GarchParams p;
    p.omega = 2e-6;
    p.alpha = {0.1};
    p.beta = {0.85};
    const auto r = garch::simulate_garch(p, {1, 1}, 299, 8);
    std::string csv = "date,adj_close\n";
    double price = 100.0;
    for (int i = 0; i < 300; ++i) {
        if (i > 0) price *= std::exp(r[static_cast<std::size_t>(i - 1)] + 0.0003);
        char date[16];
        std::snprintf(date, sizeof date, "2020-%02d-%02d", 1 + i / 28, 1 + i % 28);
        csv += std::string(date) + "," + std::to_string(price) + "\n";
    }
    return eqf::testing::temp_file("small_series.csv", csv).string();
}

RunConfig garch_only() {
    RunConfig cfg;
    cfg.data = small_series();
    cfg.models = {"garch"};
    cfg.split = SplitSpec{270, 30};
    return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto path = eqf::testing::temp_file("run.cfg",
                                              "# comment\n"
                                              "data = prices.csv\n"
                                              "models = garch, lstm,var\n"
                                              "split = 100:20   # trailing comment\n"
                                              "lstm.epochs = 7\n"
                                              "cnn.dims = 4x3x2\n"
                                              "var.order = auto\n"
                                              "rolling = true\n");
    const auto cfg = load_config(path);
    CHECK(cfg.data == "prices.csv");
    CHECK(cfg.models == std::vector<std::string>{"garch", "lstm", "var"});
    CHECK(cfg.split->train_len == 100);
    CHECK(cfg.split->test_len == 20);
    CHECK(cfg.lstm.epochs == 7);
    CHECK(cfg.cnn_dims == nn::Dims3{4, 3, 2});
    CHECK(cfg.var_order == 0);
    CHECK(cfg.rolling);

    RunConfig c;
    CHECK_THROWS_AS(apply_setting(c, "lstm.epochs", "ten"), Error);
    CHECK_THROWS_AS(apply_setting(c, "nonsense", "1"), Error);
    CHECK_THROWS_AS(parse_models("garch,arima"), Error);
    CHECK_THROWS_AS(parse_split("100-20"), Error);
    try {
        load_config(eqf::testing::temp_file("bad.cfg", "data=x\nlstm.lr=abc\n"));
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    set_seed(c, 9);
    CHECK(c.lstm.seed == 9);
    CHECK(c.cnn.seed == 10);
}

TEST_CASE("config validation") {
    RunConfig cfg;
    cfg.data = kData;
    CHECK_NOTHROW(validate(cfg));
    cfg.models = {};
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg.models = {"var"};
    try {
        validate(cfg);
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigError);
        CHECK_FALSE(is_numerical(e.code()));
    }
    cfg.second_data = kSecond;
    CHECK_NOTHROW(validate(cfg));
    cfg.cnn_dims = {1, 3, 3};
    CHECK_THROWS_AS(validate(cfg), Error);
}

TEST_CASE("config hash ignores the output directory and tracks everything else") {
    RunConfig a;
    a.data = kData;
    RunConfig b = a;
    b.out = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.lstm.epochs = 3;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("VAR without a second series fails before any fitting") {
    RunConfig cfg;
    cfg.data = kData;
    cfg.models = {"garch", "var"};
    try {
        run_pipeline(cfg);
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigError);
        CHECK(std::string(e.what()).find("config:") != std::string::npos);
    }
}

TEST_CASE("minimal GARCH pipeline") {
    const auto r = run_pipeline(garch_only());
    REQUIRE(r.models.size() == 1);
    const auto& m = r.models[0];
    CHECK(m.name == "garch");
    CHECK(m.prices.size() == 30);
    CHECK(m.returns.size() == 30);
    CHECK(m.volatility.size() == 30);
    CHECK(r.test_len == 30);
    CHECK(r.train_len == 270);
    CHECK(r.actual_returns.size() == 30);
    CHECK(r.actual_returns[0] == doctest::Approx(std::log(r.actual_prices[0] / r.anchor_price)));
    // Static path compounds the constant mean from the anchor.
    const double mu = m.details["mu"].get<double>();
    CHECK(m.prices[29] == doctest::Approx(r.anchor_price * std::exp(30 * mu)).epsilon(1e-12));
    CHECK(m.growth.log == doctest::Approx(30 * mu).epsilon(1e-9));
    CHECK(r.volatility_metrics.has_value());
    CHECK(r.mode == "static");
    CHECK(m.theil_prices.u2 == doctest::Approx(metrics::theil_u2(
                                                   [&] {
                                                       std::vector<double> a{r.anchor_price};
                                                       a.insert(a.end(), r.actual_prices.begin(), r.actual_prices.end());
                                                       return a;
                                                   }(),
                                                   m.prices)
                                                   .u2));
}

TEST_CASE("rolling mode steps off the previous actual price") {
    auto cfg = garch_only();
    cfg.rolling = true;
    const auto r = run_pipeline(cfg);
    const auto& m = r.models[0];
    const double mu = m.details["mu"].get<double>();
    CHECK(r.mode == "rolling");
    CHECK(m.prices[0] == doctest::Approx(r.anchor_price * std::exp(mu)));
    for (std::size_t k = 1; k < m.prices.size(); ++k)
        CHECK(m.prices[k] == doctest::Approx(r.actual_prices[k - 1] * std::exp(mu)).epsilon(1e-12));
}

TEST_CASE("report files round trip through the loaders") {
    const auto r = run_pipeline(garch_only());
    const auto dir = std::filesystem::temp_directory_path() / "eqf_tests" / "report_rt";
    std::filesystem::remove_all(dir);
    const auto files = emit_report(r, dir);
    CHECK(files.size() == 5);
    for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);

    const auto loaded = load_report(dir / "report.json");
    CHECK(to_json(loaded) == to_json(r));

    const auto csv = parse_metrics_csv(read_text(dir / "metrics_prices.csv"));
    CHECK(csv.rows == kMetricRows);
    CHECK(csv.columns == std::vector<std::string>{"garch", "BEST"});
    for (const auto& row : csv.cells) CHECK(row.back() == "garch");
    CHECK(std::stod(csv.cells[4][0]) == doctest::Approx(r.models[0].price_metrics.rmse).epsilon(1e-15));

    const auto j = nlohmann::json::parse(read_text(dir / "report.json"));
    CHECK(j["schema"] == 1);
    CHECK(j["conventions"]["error"] == "forecast - actual");
    CHECK(j["models"][0]["metrics"]["prices"]["mape_pct"].get<double>() ==
          doctest::Approx(100.0 * r.models[0].price_metrics.mape));
    CHECK_THROWS_AS(load_report(dir / "missing.json"), Error);
    write_text(dir / "broken.json", "{\"schema\": 2}");
    CHECK_THROWS_AS(load_report(dir / "broken.json"), Error);
}

TEST_CASE("BEST column is recomputable from the values") {
    RunReport r;
    auto model = [](std::string name, double rmse, double me, double corr, double u2) {
        ModelResult m;
        m.name = std::move(name);
        m.price_metrics.rmse = rmse;
        m.price_metrics.me = me;
        m.price_metrics.correlation = corr;
        m.price_metrics.mape = std::nan("");
        m.theil_prices.u2 = u2;
        return m;
    };
    r.models = {model("a", 3.0, -0.5, 0.2, 1.7), model("b", 2.0, 0.9, -0.9, 0.8), model("c", 2.5, 0.1, 0.4, 1.0)};
    CHECK(best_model(r, "prices", "RMSE") == "b");
    CHECK(best_model(r, "prices", "ME") == "c");
    CHECK(best_model(r, "prices", "CORRELATION") == "c");
    CHECK(best_model(r, "prices", "THEIL_U2") == "b");
    CHECK(best_model(r, "prices", "MAPE").empty());
    const auto csv = parse_metrics_csv(metrics_csv(r, "prices"));
    CHECK(csv.columns.size() == 4);
    CHECK(csv.cells[0] == std::vector<std::string>{"NA", "NA", "NA", ""});
}

TEST_CASE("plots") {
    SUBCASE("padded range") {
        const auto rr = plots::padded_range({{1.0, 3.0}, {2.0, 11.0, std::nan("")}});
        CHECK(rr.lo == doctest::Approx(0.5));
        CHECK(rr.hi == doctest::Approx(11.5));
        const auto flat = plots::padded_range({{2.0, 2.0}});
        CHECK(flat.lo < 2.0);
        CHECK(flat.hi > 2.0);
    }
    SUBCASE("garch-only report gives the shared panels plus one model chart") {
        const auto r = run_pipeline(garch_only());
        const auto dir = std::filesystem::temp_directory_path() / "eqf_tests" / "plots";
        std::filesystem::remove_all(dir);
        const auto files = plots::emit_plots(r, dir);
        CHECK(files.size() == 6);
        std::size_t model_charts = 0;
        for (const auto& f : files) {
            const auto svg = read_text(f);
            CHECK(svg.rfind("<svg", 0) == 0);
            CHECK(svg.find("</svg>") != std::string::npos);
            if (f.filename().string().rfind("forecast_", 0) == 0) ++model_charts;
        }
        CHECK(model_charts == 1);
        // Price chart axis spans the union of actual and forecast with a 5% margin.
        const auto svg = read_text(dir / "forecast_garch.svg");
        std::smatch m;
        REQUIRE(std::regex_search(svg, m, std::regex("y-range (\\S+) (\\S+)<")));
        const auto expect = plots::padded_range({r.actual_prices, r.models[0].prices});
        CHECK(std::stod(m[1]) == doctest::Approx(expect.lo).epsilon(1e-5));
        CHECK(std::stod(m[2]) == doctest::Approx(expect.hi).epsilon(1e-5));
        double lo = 1e300, hi = -1e300;
        for (const auto* v : {&r.actual_prices, &r.models[0].prices})
            for (double x : *v) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        CHECK(expect.lo == doctest::Approx(lo - 0.05 * (hi - lo)));
        CHECK(expect.hi == doctest::Approx(hi + 0.05 * (hi - lo)));
    }
}

TEST_CASE("diagnostics on the bundled pair") {
    RunConfig cfg;
    cfg.data = kData;
    cfg.second_data = kSecond;
    const auto data = load_inputs(cfg);
    REQUIRE(data.second.has_value());
    CHECK(data.second->size() == data.primary.size());
    const auto d = diagnose(data, 20);
    CHECK(d.acf.size() == 20);
    CHECK(d.returns.n == 2830);
    CHECK(d.adf_returns.is_stationary);
    CHECK_FALSE(d.adf_prices.is_stationary);
    REQUIRE(d.price_correlation.has_value());
    CHECK(*d.price_correlation > 0.9);
}

TEST_CASE("pipeline with the hybrid block and determinism") {
    auto cfg = garch_only();
    cfg.models = {"garch", "lstm"};
    cfg.lstm.epochs = 2;
    cfg.lstm.window = 10;
    const auto a = run_pipeline(cfg);
    const auto b = run_pipeline(cfg);
    REQUIRE(a.models.size() == 3);
    CHECK(a.models[2].name == "garch_lstm");
    const auto& h = a.models[2];
    const double wg = h.details["w_garch"].get<double>();
    CHECK(wg + h.details["w_lstm"].get<double>() == doctest::Approx(1.0));
    for (std::size_t i = 0; i < h.prices.size(); ++i)
        CHECK(h.prices[i] == doctest::Approx(wg * a.models[0].prices[i] + (1 - wg) * a.models[1].prices[i]).epsilon(1e-12));
    CHECK(comparable(to_json(a)) == comparable(to_json(b)));
}
