#include "eqf/stats.hpp"

#include "eqf/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace eqf::stats {

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

struct OlsResult {
    Eigen::VectorXd beta;
    double rss = 0.0;
    double se0 = 0.0;  // standard error of beta[0]
};

OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool need_se) {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) throw Error(Errc::SingularRegression, "rank-deficient ADF design");
    OlsResult out;
    out.beta = qr.solve(y);
    out.rss = (y - X * out.beta).squaredNorm();
    if (need_se) {
        const auto dof = static_cast<double>(X.rows() - X.cols());
        const double s2 = out.rss / dof;
        const Eigen::MatrixXd xtx_inv =
            (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
        out.se0 = std::sqrt(s2 * xtx_inv(0, 0));
    }
    return out;
}

// Columns: x_{t-1}, 1, dx_{t-1}..dx_{t-k}; rows t = start..n-1 of the differenced series.
void adf_design(std::span<const double> x, std::span<const double> dx, std::size_t k, std::size_t start,
                Eigen::MatrixXd& X, Eigen::VectorXd& y) {
    const auto rows = static_cast<Eigen::Index>(dx.size() - start);
    X.resize(rows, static_cast<Eigen::Index>(k + 2));
    y.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = start + static_cast<std::size_t>(r);
        y(r) = dx[t];
        X(r, 0) = x[t];  // dx[t] = x[t+1] - x[t], so x[t] is the lagged level
        X(r, 1) = 1.0;
        for (std::size_t i = 1; i <= k; ++i) X(r, static_cast<Eigen::Index>(i + 1)) = dx[t - i];
    }
}

}  // namespace

DescriptiveStats describe(std::span<const double> x) {
    if (x.size() < 2) throw Error(Errc::SeriesTooShort, "describe needs at least 2 values");
    DescriptiveStats s;
    const auto n = static_cast<double>(x.size());
    s.n = x.size();
    s.mean = mean_of(x);

    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    const std::size_t mid = sorted.size() / 2;
    s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    s.variance = m2 / (n - 1.0);
    s.std_dev = std::sqrt(s.variance);

    const double scale = std::max(std::abs(s.mean), std::abs(s.max - s.min));
    if (m2 <= (scale * scale) * n * 1e-28 || m2 == 0.0) {
        s.degenerate_variance = true;
        s.variance = 0.0;
        s.std_dev = 0.0;
        s.skewness = std::numeric_limits<double>::quiet_NaN();
        s.kurtosis = std::numeric_limits<double>::quiet_NaN();
        return s;
    }

    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double g1 = m3 / std::pow(m2, 1.5);
    const double g2 = m4 / (m2 * m2) - 3.0;
    s.skewness = n > 2 ? g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0) : std::numeric_limits<double>::quiet_NaN();
    s.kurtosis = n > 3 ? (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0)
                       : std::numeric_limits<double>::quiet_NaN();
    return s;
}

std::vector<CorrelogramPoint> acf(std::span<const double> x, std::size_t max_lag) {
    if (max_lag < 1 || 2 * max_lag >= x.size()) throw Error(Errc::LagTooLarge, std::to_string(max_lag));
    const double m = mean_of(x);
    double denom = 0.0;
    for (double v : x) denom += (v - m) * (v - m);
    if (denom <= 0.0) throw Error(Errc::DegenerateVariance, "acf of a constant series");

    const double band = 1.96 / std::sqrt(static_cast<double>(x.size()));
    std::vector<CorrelogramPoint> out;
    out.reserve(max_lag);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = 0; t + k < x.size(); ++t) num += (x[t] - m) * (x[t + k] - m);
        out.push_back({k, std::clamp(num / denom, -1.0, 1.0), band});
    }
    return out;
}

std::vector<CorrelogramPoint> pacf(std::span<const double> x, std::size_t max_lag) {
    const auto rho = acf(x, max_lag);
    std::vector<CorrelogramPoint> out;
    out.reserve(max_lag);

    // phi[k] holds the order-k AR coefficients phi_{k,1..k}.
    std::vector<double> phi(max_lag + 1, 0.0), prev(max_lag + 1, 0.0);
    double v = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = rho[k - 1].value;
        for (std::size_t j = 1; j < k; ++j) num -= prev[j] * rho[k - j - 1].value;
        if (!(v > 1e-14)) throw Error(Errc::SingularToeplitz, "lag " + std::to_string(k));
        const double phikk = num / v;
        phi[k] = phikk;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - phikk * prev[k - j];
        v *= (1.0 - phikk * phikk);
        prev = phi;
        out.push_back({k, std::clamp(phikk, -1.0, 1.0), rho[k - 1].confidence_band});
    }
    return out;
}

CriticalValues adf_critical_values(std::size_t nobs) {
    struct Row {
        double inv_n;
        CriticalValues cv;
    };
    // Dickey-Fuller tau_mu finite-sample table (constant, no trend).
    static constexpr std::array<Row, 6> table{{
        {1.0 / 25.0, {-3.75, -3.00, -2.63}},
        {1.0 / 50.0, {-3.58, -2.93, -2.60}},
        {1.0 / 100.0, {-3.51, -2.89, -2.58}},
        {1.0 / 250.0, {-3.46, -2.88, -2.57}},
        {1.0 / 500.0, {-3.44, -2.87, -2.57}},
        {0.0, {-3.43, -2.86, -2.57}},
    }};
    const double inv_n = nobs == 0 ? 1.0 : 1.0 / static_cast<double>(nobs);
    if (inv_n >= table.front().inv_n) return table.front().cv;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        const auto& hi = table[i];
        const auto& lo = table[i + 1];
        if (inv_n <= hi.inv_n && inv_n >= lo.inv_n) {
            const double w = (inv_n - lo.inv_n) / (hi.inv_n - lo.inv_n);
            return {lo.cv.pct1 + w * (hi.cv.pct1 - lo.cv.pct1), lo.cv.pct5 + w * (hi.cv.pct5 - lo.cv.pct5),
                    lo.cv.pct10 + w * (hi.cv.pct10 - lo.cv.pct10)};
        }
    }
    return table.back().cv;
}

std::size_t schwert_max_lag(std::size_t n) {
    return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

AdfResult adf_test(std::span<const double> x, std::size_t max_lag) {
    if (max_lag == 0) max_lag = schwert_max_lag(x.size());
    if (x.size() <= max_lag + 10) throw Error(Errc::SeriesTooShort, "ADF needs more than max_lag + 10 points");

    std::vector<double> dx(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) dx[i] = x[i + 1] - x[i];

    // Order search on the common sample starting at max_lag.
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::size_t best_k = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= max_lag; ++k) {
        adf_design(x, dx, k, max_lag, X, y);
        if (X.rows() <= X.cols()) break;
        const auto fit = ols(X, y, false);
        const auto nobs = static_cast<double>(X.rows());
        const double aic = nobs * std::log(fit.rss / nobs) + 2.0 * static_cast<double>(X.cols());
        if (aic < best_aic) {
            best_aic = aic;
            best_k = k;
        }
    }

    adf_design(x, dx, best_k, best_k, X, y);
    const auto fit = ols(X, y, true);
    if (!(fit.se0 > 0.0)) throw Error(Errc::SingularRegression, "zero standard error");

    AdfResult res;
    res.t_statistic = fit.beta(0) / fit.se0;
    res.lags_used = best_k;
    res.nobs = static_cast<std::size_t>(X.rows());
    res.critical_values = adf_critical_values(res.nobs);
    res.is_stationary = res.t_statistic < res.critical_values.pct5;
    return res;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(Errc::LengthMismatch, "pearson inputs differ in length");
    if (x.size() < 2) throw Error(Errc::SeriesTooShort, "pearson needs at least 2 points");
    const double mx = mean_of(x), my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw Error(Errc::DegenerateVariance, "pearson with constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace eqf::stats
