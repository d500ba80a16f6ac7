#include "eqf/error.hpp"
#include "eqf/metrics.hpp"
#include "eqf/neural/checkpoint.hpp"
#include "eqf/neural/models.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace eqf;
using namespace eqf::nn;

namespace {

std::vector<double> sine(std::size_t n, double period) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period);
    return x;
}

// One-step in-sample predictions for every window of `x`.
template <typename Model>
std::vector<double> in_sample(Model& m, const std::vector<double>& x) {
    std::vector<double> out;
    const std::size_t w = m.config.window;
    for (std::size_t t = w; t < x.size(); ++t) out.push_back(m.predict_next(std::span(x).subspan(t - w, w)));
    return out;
}

}  // namespace

TEST_CASE("standardizer") {
    const auto s = Standardizer::fit(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(s.mean == 2.0);
    CHECK(s.scale == 1.0);
    CHECK(s.invert(s.apply(17.5)) == doctest::Approx(17.5));
    CHECK(Standardizer::fit(std::vector<double>{4.0, 4.0}).scale == 1.0);
}

TEST_CASE("windows") {
    std::vector<Tensor> in, tg;
    make_windows(std::vector<double>{1, 2, 3, 4, 5}, 3, in, tg);
    REQUIRE(in.size() == 2);
    CHECK(in[0].shape() == std::vector<std::size_t>{3, 1});
    CHECK(in[1][0] == 2.0);
    CHECK(tg[1][0] == 5.0);
    make_windows(std::vector<double>{1, 2, 3}, 3, in, tg);
    CHECK(in.empty());
    TrainConfig cfg;
    cfg.window = 3;
    CHECK_THROWS_AS(fit_lstm_window_model(std::vector<double>{1, 2, 3}, cfg), Error);
}

TEST_CASE("3d tensorization") {
    std::vector<double> w(10);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(i + 1);
    const Tensor c = cube_from_window(w, {2, 2, 3});
    CHECK(c.shape() == std::vector<std::size_t>{1, 2, 2, 3});
    CHECK(c[0] == 1.0);
    CHECK(c[9] == 10.0);
    CHECK(c[10] == 0.0);
    CHECK(c[11] == 0.0);
    CHECK_THROWS_AS(cube_from_window(w, {2, 2, 2}), Error);
    const auto t = tensorize_returns_3d(std::vector<double>{1, 2, 3, 4, 5, 6}, 4, {2, 2, 2});
    REQUIRE(t.inputs.size() == 2);
    CHECK(t.targets == std::vector<double>{5.0, 6.0});
    CHECK(t.inputs[1][0] == 2.0);
}

TEST_CASE("training reduces loss and is deterministic") {
    const auto x = sine(120, 20.0);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.window = 10;
    cfg.seed = 3;
    auto a = fit_lstm_window_model(x, cfg);
    auto b = fit_lstm_window_model(x, cfg);
    REQUIRE(a.loss_history.size() == 5);
    CHECK(a.loss_history.back() < a.loss_history.front());
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.net.flat_parameters() == b.net.flat_parameters());
    cfg.seed = 4;
    CHECK(fit_lstm_window_model(x, cfg).net.flat_parameters() != a.net.flat_parameters());
}

TEST_CASE("LSTM learns a noiseless sine wave") {
    const auto x = sine(300, 25.0);
    TrainConfig cfg;  // 100 epochs, window 30
    auto m = fit_lstm_window_model(x, cfg);
    const auto pred = in_sample(m, x);
    const std::vector<double> actual(x.begin() + 30, x.end());
    const double rmse = metrics::root_mean_squared_error(actual, pred);
    MESSAGE("sine in-sample RMSE " << rmse);
    CHECK(rmse < 0.1);
}

TEST_CASE("recursive forecasting") {
    const auto x = sine(80, 16.0);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.window = 8;
    auto m = fit_lstm_window_model(x, cfg);
    const std::span<const double> seed(x.data() + x.size() - 8, 8);
    const auto f = predict_recursive(m, seed, 5);
    REQUIRE(f.size() == 5);
    CHECK(f[0] == m.predict_next(seed));
    std::vector<double> w(seed.begin() + 1, seed.end());
    w.push_back(f[0]);
    CHECK(f[1] == m.predict_next(w));
    CHECK_THROWS_AS(predict_recursive(m, std::span<const double>(x.data(), 7), 2), Error);
}

TEST_CASE("3D CNN fits and predicts") {
    const auto r = eqf::testing::white_noise(200, 8, 0.01);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.window = 27;
    auto m = fit_cnn3d(r, cfg, {3, 3, 3});
    CHECK(m.loss_history.size() == 3);
    const double p = m.predict_next(std::span(r).last(27));
    CHECK(std::isfinite(p));
    CHECK_THROWS_AS(make_cnn_network({1, 3, 3}, {}, 1), Error);
    // Inference is deterministic: dropout is off.
    CHECK(m.predict_next(std::span(r).last(27)) == p);
}

TEST_CASE("checkpoints round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "eqf_tests";
    std::filesystem::create_directories(dir);
    SUBCASE("lstm") {
        TrainConfig cfg;
        cfg.epochs = 2;
        cfg.window = 6;
        auto m = fit_lstm_window_model(sine(60, 12.0), cfg);
        write_checkpoint(dir / "lstm.ckpt", to_checkpoint(m));
        auto back = lstm_from_checkpoint(read_checkpoint(dir / "lstm.ckpt"));
        const auto w = sine(6, 7.0);
        CHECK(back.predict_next(w) == m.predict_next(w));
        CHECK(back.standardizer.mean == m.standardizer.mean);
    }
    SUBCASE("cnn") {
        const auto r = eqf::testing::white_noise(100, 2, 0.01);
        TrainConfig cfg;
        cfg.epochs = 1;
        cfg.window = 8;
        auto m = fit_cnn3d(r, cfg, {2, 2, 2});
        write_checkpoint(dir / "cnn.ckpt", to_checkpoint(m));
        auto back = cnn_from_checkpoint(read_checkpoint(dir / "cnn.ckpt"));
        CHECK(back.predict_next(std::span(r).last(8)) == m.predict_next(std::span(r).last(8)));
    }
    SUBCASE("corrupt file") {
        eqf::testing::temp_file("bad.ckpt", "NOTACKPT");
        CHECK_THROWS_AS(read_checkpoint(dir / "bad.ckpt"), Error);
        CHECK_THROWS_AS(read_checkpoint(dir / "missing.ckpt"), Error);
    }
}
