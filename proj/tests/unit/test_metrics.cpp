#include "eqf/error.hpp"
#include "eqf/metrics.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace eqf;
using namespace eqf::metrics;

TEST_CASE("perfect forecast") {
    const std::vector<double> y{3.0, 4.0, 2.5, 7.0};
    const auto t = error_metrics(y, y);
    CHECK(t.me == 0.0);
    CHECK(t.mae == 0.0);
    CHECK(t.rmse == 0.0);
    CHECK(t.mpe == 0.0);
    CHECK(t.mape == 0.0);
    CHECK(t.minmax == 0.0);
    CHECK(t.correlation == doctest::Approx(1.0));
    CHECK(t.n == 4);
}

TEST_CASE("hand arithmetic: y = [1, 1], forecast = [2, 2]") {
    const std::vector<double> y{1.0, 1.0}, f{2.0, 2.0};
    CHECK(mean_error(y, f) == 1.0);
    CHECK(mean_absolute_error(y, f) == 1.0);
    CHECK(root_mean_squared_error(y, f) == 1.0);
    CHECK(mean_percentage_error(y, f) == 1.0);
    CHECK(mean_absolute_percentage_error(y, f) == 1.0);
    CHECK(minmax_error(y, f) == 0.5);
    // Constant actuals have no correlation.
    CHECK_THROWS_AS(error_metrics(y, f), Error);
    CHECK(std::isnan(error_metrics_lenient(y, f, "price").correlation));
}

TEST_CASE("sign convention is forecast minus actual") {
    const std::vector<double> y{10.0, 20.0}, f{8.0, 18.0};
    CHECK(mean_error(y, f) == -2.0);
    CHECK(mean_percentage_error(y, f) == doctest::Approx(-0.15));
}

TEST_CASE("errors") {
    const std::vector<double> y{0.0, 1.0, 2.0}, f{1.0, 1.0, 1.0};
    try {
        mean_absolute_percentage_error(y, f);
        FAIL("expected ZeroActual");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ZeroActual);
    }
    CHECK_THROWS_AS(mean_error(y, std::vector<double>{1.0}), Error);
    const auto lenient = error_metrics_lenient(y, f, "return");
    CHECK(std::isnan(lenient.mape));
    CHECK(lenient.rmse == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK(lenient.target_kind == "return");
}

TEST_CASE("MAE <= RMSE and swap symmetry") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.5, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> y(3 + trial % 8), f(y.size());
        for (auto& v : y) v = u(rng);
        for (auto& v : f) v = u(rng);
        const auto a = error_metrics(y, f);
        const auto b = error_metrics(f, y);
        CHECK(a.mae <= a.rmse + 1e-15);
        CHECK(a.me == doctest::Approx(-b.me));
        CHECK(a.mae == doctest::Approx(b.mae));
        CHECK(a.rmse == doctest::Approx(b.rmse));
        CHECK(a.correlation == doctest::Approx(b.correlation));
        CHECK(a.minmax == doctest::Approx(b.minmax));
        CHECK(a.mape >= 0.0);
        CHECK(std::abs(a.correlation) <= 1.0);
    }
}

TEST_CASE("theil U2") {
    const std::vector<double> y{100.0, 101.0, 99.0, 102.0, 103.0};
    SUBCASE("naive forecast gives exactly 1") {
        const std::vector<double> naive{100.0, 101.0, 99.0, 102.0};
        const auto v = theil_u2(y, naive);
        CHECK(v.u2 == 1.0);
        CHECK(v.verdict == Verdict::Equal);
    }
    SUBCASE("perfect forecast gives 0") {
        const std::vector<double> perfect{101.0, 99.0, 102.0, 103.0};
        const auto v = theil_u2(y, perfect);
        CHECK(v.u2 == 0.0);
        CHECK(v.verdict == Verdict::Better);
    }
    SUBCASE("hand computed") {
        const std::vector<double> yy{10.0, 12.0, 11.0};
        const std::vector<double> f{11.0, 13.0};
        // numerator: ((11-12)/10)^2 + ((13-11)/12)^2; denominator: ((10-12)/10)^2 + ((12-11)/12)^2
        const double num = 0.01 + 4.0 / 144.0;
        const double den = 0.04 + 1.0 / 144.0;
        const auto v = theil_u2(yy, f);
        CHECK(v.u2 == doctest::Approx(std::sqrt(num / den)).epsilon(1e-15));
        CHECK(v.verdict == Verdict::Better);
    }
    SUBCASE("bracket rule") {
        CHECK(classify_u2(1.7) == Verdict::Worse);
        CHECK(classify_u2(1.0 + 1e-13) == Verdict::Equal);
        CHECK(classify_u2(1.0 - 1e-11) == Verdict::Better);
        CHECK(verdict_name(Verdict::Worse) == "worse");
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(theil_u2(y, y), Error);
        try {
            theil_u2(std::vector<double>{5.0, 5.0, 5.0}, std::vector<double>{5.0, 6.0});
            FAIL("expected ZeroDenominator");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::ZeroDenominator);
        }
    }
}

TEST_CASE("scale invariance") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(1.0, 100.0), c(0.01, 1000.0);
    std::vector<double> y(8), f(8), prev(9);
    for (auto& v : y) v = u(rng);
    for (auto& v : f) v = u(rng);
    prev[0] = u(rng);
    std::copy(y.begin(), y.end(), prev.begin() + 1);
    const auto base = error_metrics(y, f);
    const auto base_u2 = theil_u2(prev, f);
    for (int i = 0; i < 10; ++i) {
        const double k = c(rng);
        auto ys = y, fs = f, ps = prev;
        for (auto& v : ys) v *= k;
        for (auto& v : fs) v *= k;
        for (auto& v : ps) v *= k;
        const auto s = error_metrics(ys, fs);
        CHECK(s.mape == doctest::Approx(base.mape).epsilon(1e-12));
        CHECK(s.mpe == doctest::Approx(base.mpe).epsilon(1e-12));
        CHECK(s.correlation == doctest::Approx(base.correlation).epsilon(1e-12));
        CHECK(s.minmax == doctest::Approx(base.minmax).epsilon(1e-12));
        CHECK(s.me == doctest::Approx(k * base.me).epsilon(1e-12));
        CHECK(s.mae == doctest::Approx(k * base.mae).epsilon(1e-12));
        CHECK(s.rmse == doctest::Approx(k * base.rmse).epsilon(1e-12));
        CHECK(theil_u2(ps, fs).u2 == doctest::Approx(base_u2.u2).epsilon(1e-12));
    }
}
