#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace eqf::var {

struct VarSpec {
    std::size_t n_series = 1;
    std::size_t order = 1;
    bool include_intercept = true;
};

struct InfoCriteria {
    double aic = 0.0;
    double bic = 0.0;
    double hqic = 0.0;
    double fpe = 0.0;
    double log_likelihood = 0.0;
};

struct VarFit {
    std::size_t order = 0;
    std::size_t n_series = 0;
    bool include_intercept = true;
    Eigen::VectorXd intercept;          // K
    std::vector<Eigen::MatrixXd> coef;  // order matrices, each K x K; coef[i] multiplies y_{t-1-i}
    Eigen::MatrixXd resid_cov;          // ML covariance (divided by nobs)
    std::size_t nobs = 0;
    InfoCriteria criteria;
    // All-zero input: coefficients and intercept are zero and the criteria are NaN.
    bool degenerate = false;
};

// Columns of `y` are series, rows are time (oldest first).
Eigen::MatrixXd stack_series(std::span<const std::vector<double>> series);

struct LagMatrices {
    Eigen::MatrixXd Z;  // (T - p) x (K p + 1): [1, y_{t-1}', ..., y_{t-p}']
    Eigen::MatrixXd Y;  // (T - p) x K
};

LagMatrices build_lag_matrix(const Eigen::MatrixXd& y, std::size_t order, bool include_intercept = true);

VarFit fit_var_ols(const Eigen::MatrixXd& y, const VarSpec& spec);

// Criteria from the fit's resid_cov, nobs, order and K.
InfoCriteria information_criteria(const VarFit& fit);

struct OrderRow {
    std::size_t order = 0;
    InfoCriteria criteria;
};

struct OrderSelection {
    std::size_t chosen = 0;  // argmin AIC
    std::vector<OrderRow> table;
};

// Fits orders 1..max_p on the common sample that drops the first max_p observations.
OrderSelection select_order(const Eigen::MatrixXd& y, std::size_t max_p = 12);

// `recent` holds exactly `order` rows, oldest first. Returns horizon x K iterated forecasts.
Eigen::MatrixXd forecast_var(const VarFit& fit, const Eigen::MatrixXd& recent, std::size_t horizon);

// One-step prediction given the `order` most recent rows (oldest first).
Eigen::VectorXd predict_next(const VarFit& fit, const Eigen::MatrixXd& recent);

nlohmann::json to_json(const VarFit& fit);
VarFit fit_from_json(const nlohmann::json& j);

}  // namespace eqf::var
