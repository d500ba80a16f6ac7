#include "bfgs.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace eqf::detail {

BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, std::size_t max_iterations, double tol) {
    const auto n = static_cast<Eigen::Index>(x0.size());
    Eigen::Map<Eigen::VectorXd> xmap(x0.data(), n);
    Eigen::VectorXd x = xmap;
    std::vector<double> gbuf(x0.size());

    const auto eval = [&](const Eigen::VectorXd& at, Eigen::VectorXd& g) {
        const double v = f(std::span<const double>(at.data(), static_cast<std::size_t>(at.size())), &gbuf);
        g = Eigen::Map<const Eigen::VectorXd>(gbuf.data(), n);
        return v;
    };

    Eigen::VectorXd g(n), g_new(n);
    double fx = eval(x, g);
    BfgsResult res;
    if (!std::isfinite(fx)) {
        res.x = x0;
        res.f = fx;
        return res;
    }

    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    std::size_t small_steps = 0;
    std::size_t it = 0;
    for (; it < max_iterations; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + std::abs(fx))) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd d = -H * g;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            H.setIdentity();
            d = -g;
            slope = -g.squaredNorm();
        }

        double step = 1.0;
        Eigen::VectorXd x_new;
        double f_new = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * d;
            f_new = eval(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No further decrease representable along the descent direction.
            res.converged = small_steps > 0 || g.lpNorm<Eigen::Infinity>() <= 1e-5 * (1.0 + std::abs(fx));
            break;
        }

        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (it == 0) H *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
        }

        const double change = std::abs(fx - f_new);
        x = x_new;
        g = g_new;
        fx = f_new;
        small_steps = change <= tol * (1.0 + std::abs(fx)) ? small_steps + 1 : 0;
        if (small_steps >= 2) {
            res.converged = true;
            ++it;
            break;
        }
    }

    res.x.assign(x.data(), x.data() + n);
    res.f = fx;
    res.iterations = it;
    return res;
}

}  // namespace eqf::detail
