#include "eqf/error.hpp"
#include "eqf/timeseries.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace eqf;
using eqf::testing::temp_file;

namespace {

Errc code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an eqf::Error");
    return Errc::IoError;
}

PriceSeries make_prices(std::vector<double> v) {
    PriceSeries p;
    for (std::size_t i = 0; i < v.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "2020-01-%02zu", i + 1);
        p.dates.emplace_back(buf);
    }
    p.values = std::move(v);
    return p;
}

}  // namespace

TEST_CASE("load_csv parses a three-row file") {
    const auto path = temp_file("three.csv", "date,adj_close\n2020-01-02,100.0\n2020-01-03,101.0\n2020-01-06,99.5\n");
    const auto p = load_csv(path, "adj_close");
    REQUIRE(p.size() == 3);
    CHECK(p.values[0] == 100.0);
    CHECK(p.values[2] == 99.5);
    CHECK(p.dates[1] == "2020-01-03");
}

TEST_CASE("load_csv re-sorts rows by date and finds columns anywhere in the header") {
    const auto path = temp_file("unsorted.csv", "open,adj_close,date\n1,3.0,2020-01-03\n1,1.0,2020-01-01\n1,2.0,2020-01-02\n");
    const auto p = load_csv(path, "adj_close");
    CHECK(p.values == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(p.dates.front() == "2020-01-01");
}

TEST_CASE("load_csv validation errors") {
    CHECK(code_of([] { load_csv(temp_file("neg.csv", "date,adj_close\n2020-01-01,3.0\n2020-01-02,-5.0\n"), "adj_close"); }) ==
          Errc::NonPositivePrice);
    CHECK(code_of([] { load_csv(temp_file("nocol.csv", "date,close\n2020-01-01,3.0\n"), "adj_close"); }) ==
          Errc::MissingColumn);
    CHECK(code_of([] { load_csv(temp_file("nodate.csv", "day,adj_close\n2020-01-01,3.0\n"), "adj_close"); }) ==
          Errc::MissingColumn);
    CHECK(code_of([] {
              load_csv(temp_file("dup.csv", "date,adj_close\n2020-01-01,3.0\n2020-01-01,4.0\n2020-01-02,5\n"), "adj_close");
          }) == Errc::DuplicateDate);
    CHECK(code_of([] { load_csv(temp_file("bad.csv", "date,adj_close\n2020-01-01,3.0\n2020-01-02,abc\n"), "adj_close"); }) ==
          Errc::UnparseableRow);
    CHECK(code_of([] { load_csv(temp_file("missing.csv", "date,adj_close\n2020-01-01,3.0\n2020-01-02,\n"), "adj_close"); }) ==
          Errc::UnparseableRow);
    CHECK(code_of([] { load_csv(temp_file("short.csv", "date,adj_close\n2020-01-01,3.0\n"), "adj_close"); }) ==
          Errc::SeriesTooShort);
    CHECK(code_of([] { load_csv("/nonexistent/file.csv", "adj_close"); }) == Errc::IoError);
}

TEST_CASE("UnparseableRow reports the line number") {
    try {
        load_csv(temp_file("line.csv", "date,adj_close\n2020-01-01,3.0\n2020-01-02,4.0\nnot-a-date,5.0\n"), "adj_close");
        FAIL("expected UnparseableRow");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnparseableRow);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("bundled sample has 2831 rows") {
    const auto p = load_csv(std::string(EQF_DATA_DIR) + "/sp500_sample.csv", "adj_close");
    CHECK(p.size() == 2831);
    p.validate();
}

TEST_CASE("log_returns") {
    SUBCASE("constant prices give zero returns") {
        const auto r = log_returns(make_prices({100, 100, 100}));
        CHECK(r.values == std::vector<double>{0.0, 0.0});
        CHECK(r.base_price == 100.0);
        CHECK(r.dates.front() == "2020-01-02");
    }
    SUBCASE("100 -> 110 is ln(1.1)") {
        const auto r = log_returns(make_prices({100, 110}));
        CHECK(r.values[0] == doctest::Approx(0.0953101798043248600).epsilon(1e-15));
    }
    SUBCASE("geometric sequence gives a constant series") {
        std::vector<double> v{3.0};
        for (int i = 0; i < 50; ++i) v.push_back(v.back() * 1.07);
        const auto r = log_returns(make_prices(v));
        for (double x : r.values) CHECK(x == doctest::Approx(std::log(1.07)).epsilon(1e-12));
    }
    SUBCASE("too short") {
        CHECK(code_of([] { log_returns(make_prices({1.0})); }) == Errc::SeriesTooShort);
    }
}

TEST_CASE("reconstruct_prices") {
    SUBCASE("zero returns") {
        ReturnSeries r{{"a", "b"}, {0.0, 0.0}, 50.0};
        CHECK(reconstruct_path(r.values, 50.0) == std::vector<double>{50.0, 50.0});
        const auto p = reconstruct_prices(r, 50.0, "z");
        CHECK(p.values == std::vector<double>{50.0, 50.0, 50.0});
        CHECK(p.dates == std::vector<Date>{"z", "a", "b"});
    }
    SUBCASE("forecast returns summing to 0.0517 grow the anchor by e^0.0517") {
        const std::vector<double> r{0.02, 0.0117, 0.02};
        const auto path = reconstruct_path(r, 200.0);
        CHECK(path.back() / 200.0 == doctest::Approx(1.0530597771877793).epsilon(1e-12));
    }
    SUBCASE("invalid anchor") {
        CHECK(code_of([] { reconstruct_path(std::vector<double>{0.1}, 0.0); }) == Errc::InvalidAnchor);
        CHECK(code_of([] { reconstruct_path(std::vector<double>{0.1}, -1.0); }) == Errc::InvalidAnchor);
    }
}

TEST_CASE("round trip property on random positive series") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> level(0.01, 1e5);
    std::normal_distribution<double> step(0.0, 0.05);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v{level(rng)};
        const int n = 2 + trial % 60;
        for (int i = 1; i < n; ++i) v.push_back(v.back() * std::exp(step(rng)));
        const auto p = make_prices(v);
        const auto back = reconstruct_prices(log_returns(p), p.values.front(), p.dates.front());
        REQUIRE(back.size() == p.size());
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(eqf::testing::rel_err(back.values[i], p.values[i]) < 1e-9);
        CHECK(back.dates == p.dates);
    }
}

TEST_CASE("split") {
    std::vector<double> v;
    for (int i = 1; i <= 10; ++i) v.push_back(i);
    const auto p = make_prices(v);
    SUBCASE("7:3 chronological slice, concatenation restores the series") {
        const auto [train, test] = split(p, {7, 3});
        CHECK(train.values == std::vector<double>{1, 2, 3, 4, 5, 6, 7});
        CHECK(test.values == std::vector<double>{8, 9, 10});
        auto joined = train.values;
        joined.insert(joined.end(), test.values.begin(), test.values.end());
        CHECK(joined == p.values);
        auto dates = train.dates;
        dates.insert(dates.end(), test.dates.begin(), test.dates.end());
        CHECK(dates == p.dates);
    }
    SUBCASE("2639:192 on the bundled sample length") {
        std::vector<double> big(2831, 1.0);
        PriceSeries q{std::vector<Date>(2831, "x"), big, ""};
        const auto [train, test] = split(q, {2639, 192});
        CHECK(train.size() == 2639);
        CHECK(test.size() == 192);
        CHECK(default_split(2831).train_len + default_split(2831).test_len == 2831);
    }
    SUBCASE("inconsistent spec") {
        const auto five = make_prices({1, 2, 3, 4, 5});
        CHECK(code_of([&] { split(five, {5, 1}); }) == Errc::LengthMismatch);
        CHECK(code_of([&] { split(five, {5, 0}); }) == Errc::LengthMismatch);
    }
    SUBCASE("return split carries the base price forward") {
        const auto r = log_returns(p);
        const auto [train, test] = split(r, {6, 3});
        CHECK(test.base_price == doctest::Approx(7.0).epsilon(1e-12));
    }
}

TEST_CASE("write_csv output reloads identically") {
    const auto p = make_prices({1.5, 2.25, 3.125, 100.0 / 3.0});
    const auto path = std::filesystem::temp_directory_path() / "eqf_tests" / "rt.csv";
    std::filesystem::create_directories(path.parent_path());
    write_csv(p, path, "adj_close");
    const auto q = load_csv(path, "adj_close");
    CHECK(q.values == p.values);
    CHECK(q.dates == p.dates);
}
