// Generates the bundled synthetic price samples: a GARCH(1,1) return series rescaled to a
// daily mean of 0.000461 and standard deviation of 0.010935, and a second instrument whose
// returns load on the first plus independent noise.
#include "eqf/garch.hpp"
#include "eqf/timeseries.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>

namespace {

std::vector<std::string> business_days(std::chrono::year_month_day start, std::size_t count) {
    using namespace std::chrono;
    std::vector<std::string> out;
    sys_days day{start};
    while (out.size() < count) {
        const weekday wd{day};
        if (wd != Saturday && wd != Sunday) {
            const year_month_day ymd{day};
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
            out.emplace_back(buf);
        }
        day += days{1};
    }
    return out;
}

eqf::PriceSeries to_prices(const std::vector<std::string>& dates, const std::vector<double>& returns, double start,
                           const std::string& label) {
    eqf::PriceSeries p;
    p.label = label;
    p.dates = dates;
    p.values.push_back(start);
    const auto path = eqf::reconstruct_path(returns, start);
    p.values.insert(p.values.end(), path.begin(), path.end());
    for (double& v : p.values) v = std::round(v * 1e4) / 1e4;
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path out_dir = argc > 1 ? argv[1] : "data";
    constexpr std::size_t kPrices = 2831;
    constexpr double kMean = 0.000461;
    constexpr double kStd = 0.010935;

    eqf::garch::GarchParams params;
    params.alpha = {0.10};
    params.beta = {0.85};
    params.omega = kStd * kStd * (1.0 - 0.95);
    params.mu = 0.0;
    auto r = eqf::garch::simulate_garch(params, {1, 1}, kPrices - 1, 20110121);

    const double n = static_cast<double>(r.size());
    const double m = std::accumulate(r.begin(), r.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : r) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / (n - 1.0));
    for (double& v : r) v = kMean + kStd * (v - m) / sd;

    std::mt19937_64 rng(1500);
    std::normal_distribution<double> noise(0.0, 0.0015);
    std::vector<double> r2(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) r2[i] = 0.0001 + 0.97 * r[i] + noise(rng);

    const auto dates = business_days(std::chrono::year{2011} / std::chrono::January / 21, kPrices);
    std::filesystem::create_directories(out_dir);
    eqf::write_csv(to_prices(dates, r, 1283.35, "sp500"), out_dir / "sp500_sample.csv", "adj_close");
    eqf::write_csv(to_prices(dates, r2, 71.20, "spdr1500"), out_dir / "spdr_sample.csv", "adj_close");
    std::printf("wrote %zu rows to %s\n", kPrices, out_dir.string().c_str());
    return 0;
}
