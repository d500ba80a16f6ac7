#include "eqf/var.hpp"

#include "eqf/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace eqf::var {

namespace {

std::size_t params_per_equation(std::size_t k, std::size_t p, bool intercept) {
    return k * p + (intercept ? 1 : 0);
}

}  // namespace

Eigen::MatrixXd stack_series(std::span<const std::vector<double>> series) {
    if (series.empty()) throw Error(Errc::LengthMismatch, "no series given");
    const auto t = series.front().size();
    Eigen::MatrixXd y(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(series.size()));
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (series[k].size() != t) throw Error(Errc::LengthMismatch, "VAR series differ in length");
        for (std::size_t i = 0; i < t; ++i)
            y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = series[k][i];
    }
    return y;
}

LagMatrices build_lag_matrix(const Eigen::MatrixXd& y, std::size_t order, bool include_intercept) {
    const auto T = static_cast<std::size_t>(y.rows());
    const auto K = static_cast<std::size_t>(y.cols());
    if (order < 1) throw Error(Errc::OrderTooLarge, "order must be >= 1");
    if (order >= T) throw Error(Errc::OrderTooLarge, "order " + std::to_string(order) + " >= length " +
                                                          std::to_string(T));
    const auto rows = static_cast<Eigen::Index>(T - order);
    const std::size_t off = include_intercept ? 1 : 0;
    LagMatrices out;
    out.Z.resize(rows, static_cast<Eigen::Index>(params_per_equation(K, order, include_intercept)));
    out.Y = y.bottomRows(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto t = static_cast<Eigen::Index>(order) + r;
        if (include_intercept) out.Z(r, 0) = 1.0;
        for (std::size_t lag = 1; lag <= order; ++lag) {
            const auto col = static_cast<Eigen::Index>(off + (lag - 1) * K);
            out.Z.block(r, col, 1, static_cast<Eigen::Index>(K)) = y.row(t - static_cast<Eigen::Index>(lag));
        }
    }
    return out;
}

VarFit fit_var_ols(const Eigen::MatrixXd& y, const VarSpec& spec) {
    const auto K = static_cast<std::size_t>(y.cols());
    if (K != spec.n_series) throw Error(Errc::LengthMismatch, "spec.n_series does not match the data");
    const auto lm = build_lag_matrix(y, spec.order, spec.include_intercept);
    const auto m = static_cast<std::size_t>(lm.Z.cols());
    if (static_cast<std::size_t>(lm.Z.rows()) <= m)
        throw Error(Errc::SingularDesign, "not enough observations for K*p + 1 regressors");

    VarFit fit;
    fit.order = spec.order;
    fit.n_series = K;
    fit.include_intercept = spec.include_intercept;
    fit.nobs = static_cast<std::size_t>(lm.Z.rows());
    const auto Ki = static_cast<Eigen::Index>(K);

    if (lm.Y.isZero(0.0) && y.isZero(0.0)) {
        fit.degenerate = true;
        fit.intercept = Eigen::VectorXd::Zero(Ki);
        fit.coef.assign(spec.order, Eigen::MatrixXd::Zero(Ki, Ki));
        fit.resid_cov = Eigen::MatrixXd::Zero(Ki, Ki);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        fit.criteria = {nan, nan, nan, nan, nan};
        return fit;
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(lm.Z);
    if (qr.rank() < lm.Z.cols()) throw Error(Errc::SingularDesign, "design matrix is rank deficient");
    const Eigen::MatrixXd B = qr.solve(lm.Y);  // m x K; column k is equation k
    const Eigen::MatrixXd E = lm.Y - lm.Z * B;

    const Eigen::Index off = spec.include_intercept ? 1 : 0;
    fit.intercept = spec.include_intercept ? Eigen::VectorXd(B.row(0).transpose()) : Eigen::VectorXd::Zero(Ki);
    fit.coef.resize(spec.order);
    for (std::size_t lag = 0; lag < spec.order; ++lag)
        fit.coef[lag] = B.block(off + static_cast<Eigen::Index>(lag) * Ki, 0, Ki, Ki).transpose();
    fit.resid_cov = (E.transpose() * E) / static_cast<double>(fit.nobs);
    fit.resid_cov = 0.5 * (fit.resid_cov + fit.resid_cov.transpose());

    const double det = fit.resid_cov.determinant();
    if (det > 0.0 && std::isfinite(det)) {
        fit.criteria = information_criteria(fit);
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        fit.criteria = {nan, nan, nan, nan, nan};
    }
    return fit;
}

InfoCriteria information_criteria(const VarFit& fit) {
    const double det = fit.resid_cov.determinant();
    if (!(det > 0.0) || !std::isfinite(det)) throw Error(Errc::SingularCovariance, "|Sigma| <= 0");
    const double T = static_cast<double>(fit.nobs);
    const double K = static_cast<double>(fit.n_series);
    const double m = static_cast<double>(params_per_equation(fit.n_series, fit.order, fit.include_intercept));
    const double ld = std::log(det);
    InfoCriteria c;
    c.aic = ld + 2.0 * m * K / T;
    c.bic = ld + m * K * std::log(T) / T;
    c.hqic = ld + 2.0 * m * K * std::log(std::log(T)) / T;
    c.fpe = det * std::pow((T + m) / (T - m), K);
    c.log_likelihood = -(T * K / 2.0) * std::log(2.0 * std::numbers::pi) - (T / 2.0) * ld - T * K / 2.0;
    return c;
}

OrderSelection select_order(const Eigen::MatrixXd& y, std::size_t max_p) {
    const auto T = static_cast<std::size_t>(y.rows());
    if (max_p < 1 || 3 * max_p >= T) throw Error(Errc::OrderTooLarge, "max_p must satisfy 1 <= max_p < T/3");
    OrderSelection sel;
    double best = std::numeric_limits<double>::infinity();
    const VarSpec base{static_cast<std::size_t>(y.cols()), 1, true};
    for (std::size_t p = 1; p <= max_p; ++p) {
        // Drop the first (max_p - p) rows so every order scores the same targets.
        const auto keep = static_cast<Eigen::Index>(T - (max_p - p));
        VarSpec spec = base;
        spec.order = p;
        const auto fit = fit_var_ols(y.bottomRows(keep), spec);
        sel.table.push_back({p, fit.criteria});
        if (std::isfinite(fit.criteria.aic) && fit.criteria.aic < best) {
            best = fit.criteria.aic;
            sel.chosen = p;
        }
    }
    if (sel.chosen == 0) sel.chosen = 1;
    return sel;
}

Eigen::VectorXd predict_next(const VarFit& fit, const Eigen::MatrixXd& recent) {
    const auto K = static_cast<Eigen::Index>(fit.n_series);
    if (recent.rows() != static_cast<Eigen::Index>(fit.order) || recent.cols() != K)
        throw Error(Errc::ShapeMismatch, "recent must be order x K");
    Eigen::VectorXd next = fit.intercept;
    for (std::size_t lag = 1; lag <= fit.order; ++lag)
        next += fit.coef[lag - 1] * recent.row(recent.rows() - static_cast<Eigen::Index>(lag)).transpose();
    return next;
}

Eigen::MatrixXd forecast_var(const VarFit& fit, const Eigen::MatrixXd& recent, std::size_t horizon) {
    if (horizon < 1) throw Error(Errc::InvalidHorizon, "horizon must be >= 1");
    const auto K = static_cast<Eigen::Index>(fit.n_series);
    const auto p = static_cast<Eigen::Index>(fit.order);
    Eigen::MatrixXd window = recent;
    Eigen::MatrixXd out(static_cast<Eigen::Index>(horizon), K);
    for (Eigen::Index h = 0; h < static_cast<Eigen::Index>(horizon); ++h) {
        const Eigen::VectorXd next = predict_next(fit, window);
        out.row(h) = next.transpose();
        if (p > 1) window.topRows(p - 1) = window.bottomRows(p - 1).eval();
        window.row(p - 1) = next.transpose();
    }
    return out;
}

nlohmann::json to_json(const VarFit& fit) {
    nlohmann::json coef = nlohmann::json::array();
    for (const auto& A : fit.coef) {
        nlohmann::json mat = nlohmann::json::array();
        for (Eigen::Index r = 0; r < A.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(A.cols()));
            for (Eigen::Index c = 0; c < A.cols(); ++c) row[static_cast<std::size_t>(c)] = A(r, c);
            mat.push_back(row);
        }
        coef.push_back(mat);
    }
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index r = 0; r < fit.resid_cov.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(fit.resid_cov.cols()));
        for (Eigen::Index c = 0; c < fit.resid_cov.cols(); ++c) row[static_cast<std::size_t>(c)] = fit.resid_cov(r, c);
        cov.push_back(row);
    }
    const auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {
        {"order", fit.order},
        {"n_series", fit.n_series},
        {"include_intercept", fit.include_intercept},
        {"nobs", fit.nobs},
        {"degenerate", fit.degenerate},
        {"intercept", std::vector<double>(fit.intercept.data(), fit.intercept.data() + fit.intercept.size())},
        {"coef", coef},
        {"resid_cov", cov},
        {"criteria",
         {{"aic", num(fit.criteria.aic)},
          {"bic", num(fit.criteria.bic)},
          {"hqic", num(fit.criteria.hqic)},
          {"fpe", num(fit.criteria.fpe)},
          {"log_likelihood", num(fit.criteria.log_likelihood)}}},
    };
}

VarFit fit_from_json(const nlohmann::json& j) {
    VarFit fit;
    fit.order = j.at("order").get<std::size_t>();
    fit.n_series = j.at("n_series").get<std::size_t>();
    fit.include_intercept = j.value("include_intercept", true);
    fit.nobs = j.at("nobs").get<std::size_t>();
    fit.degenerate = j.value("degenerate", false);
    const auto K = static_cast<Eigen::Index>(fit.n_series);
    const auto icpt = j.at("intercept").get<std::vector<double>>();
    if (icpt.size() != fit.n_series) throw Error(Errc::ShapeMismatch, "intercept size");
    fit.intercept = Eigen::Map<const Eigen::VectorXd>(icpt.data(), K);
    const auto& coef = j.at("coef");
    if (coef.size() != fit.order) throw Error(Errc::ShapeMismatch, "coef count");
    const auto read_mat = [K](const nlohmann::json& rows) {
        Eigen::MatrixXd A(K, K);
        if (static_cast<Eigen::Index>(rows.size()) != K) throw Error(Errc::ShapeMismatch, "matrix rows");
        for (Eigen::Index r = 0; r < K; ++r) {
            const auto row = rows[static_cast<std::size_t>(r)].get<std::vector<double>>();
            if (static_cast<Eigen::Index>(row.size()) != K) throw Error(Errc::ShapeMismatch, "matrix cols");
            for (Eigen::Index c = 0; c < K; ++c) A(r, c) = row[static_cast<std::size_t>(c)];
        }
        return A;
    };
    for (const auto& A : coef) fit.coef.push_back(read_mat(A));
    fit.resid_cov = read_mat(j.at("resid_cov"));
    const auto& c = j.at("criteria");
    const auto get = [&](const char* key) {
        return c.at(key).is_null() ? std::numeric_limits<double>::quiet_NaN() : c.at(key).get<double>();
    };
    fit.criteria = {get("aic"), get("bic"), get("hqic"), get("fpe"), get("log_likelihood")};
    return fit;
}

}  // namespace eqf::var
