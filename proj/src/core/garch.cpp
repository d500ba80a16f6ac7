#include "eqf/garch.hpp"

#include "bfgs.hpp"
#include "eqf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace eqf::garch {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double demeaned_variance(std::span<const double> x, double mu) {
    double s = 0.0;
    for (double v : x) s += (v - mu) * (v - mu);
    return s / static_cast<double>(x.size());
}

void check_length(std::span<const double> x, const GarchSpec& spec) {
    if (x.size() <= spec.warmup())
        throw Error(Errc::SeriesTooShort, "GARCH needs more than max(p, q) observations");
}

void check_spec(const GarchSpec& spec) {
    if (spec.p < 1) throw Error(Errc::InvalidParams, "ARCH order p must be >= 1");
}

}  // namespace

double GarchParams::persistence() const noexcept {
    return std::accumulate(alpha.begin(), alpha.end(), 0.0) + std::accumulate(beta.begin(), beta.end(), 0.0);
}

double GarchParams::unconditional_variance() const noexcept { return omega / (1.0 - persistence()); }

void validate(const GarchParams& params, const GarchSpec& spec) {
    check_spec(spec);
    if (params.alpha.size() != spec.p || params.beta.size() != spec.q)
        throw Error(Errc::InvalidParams, "coefficient counts do not match (p, q)");
    if (!(params.omega > 0.0) || !std::isfinite(params.omega)) throw Error(Errc::InvalidParams, "omega must be > 0");
    for (double a : params.alpha)
        if (!(a >= 0.0) || !std::isfinite(a)) throw Error(Errc::InvalidParams, "alpha must be >= 0");
    for (double b : params.beta)
        if (!(b >= 0.0) || !std::isfinite(b)) throw Error(Errc::InvalidParams, "beta must be >= 0");
    if (!(params.persistence() < 1.0)) throw Error(Errc::InvalidParams, "sum(alpha) + sum(beta) must be < 1");
    if (!std::isfinite(params.mu)) throw Error(Errc::InvalidParams, "mu must be finite");
}

std::vector<double> conditional_variance_path(std::span<const double> x, const GarchParams& params,
                                              const GarchSpec& spec) {
    validate(params, spec);
    check_length(x, spec);
    const std::size_t m = spec.warmup();
    std::vector<double> h(x.size());
    const double init = demeaned_variance(x, params.mu);
    for (std::size_t t = 0; t < m; ++t) h[t] = init;
    for (std::size_t t = m; t < x.size(); ++t) {
        double v = params.omega;
        for (std::size_t i = 1; i <= spec.p; ++i) {
            const double e = x[t - i] - params.mu;
            v += params.alpha[i - 1] * e * e;
        }
        for (std::size_t j = 1; j <= spec.q; ++j) v += params.beta[j - 1] * h[t - j];
        h[t] = v;
    }
    return h;
}

double negative_log_likelihood(std::span<const double> x, const GarchParams& params, const GarchSpec& spec) {
    const auto h = conditional_variance_path(x, params, spec);
    double nll = 0.0;
    for (std::size_t t = spec.warmup(); t < x.size(); ++t) {
        const double e = x[t] - params.mu;
        nll += 0.5 * (kLog2Pi + std::log(h[t]) + e * e / h[t]);
    }
    if (!std::isfinite(nll)) throw Error(Errc::NonFiniteLikelihood, "NLL is not finite");
    return nll;
}

std::vector<double> to_unconstrained(const GarchParams& params, const GarchSpec& spec) {
    validate(params, spec);
    std::vector<double> z(spec.n_params());
    z[0] = std::log(params.omega);
    // w_k = c * e^{z_k} / (1 + sum e^{z}); the slack share is 1 - sum(w)/c.
    const double c = kMaxPersistence;
    const double slack = std::max(1.0 - params.persistence() / c, 1e-300);
    const auto logit = [&](double w) { return std::log(std::max(w, 1e-300) / c) - std::log(slack); };
    for (std::size_t i = 0; i < spec.p; ++i) z[1 + i] = logit(params.alpha[i]);
    for (std::size_t j = 0; j < spec.q; ++j) z[1 + spec.p + j] = logit(params.beta[j]);
    return z;
}

GarchParams from_unconstrained(std::span<const double> z, const GarchSpec& spec, double mu) {
    if (z.size() != spec.n_params()) throw Error(Errc::InvalidParams, "unconstrained vector has wrong size");
    GarchParams p;
    p.mu = mu;
    p.omega = std::exp(z[0]);
    // Softmax with the slack logit fixed at 0, shifted for overflow safety.
    double zmax = 0.0;
    for (std::size_t k = 1; k < z.size(); ++k) zmax = std::max(zmax, z[k]);
    double denom = std::exp(-zmax);
    for (std::size_t k = 1; k < z.size(); ++k) denom += std::exp(z[k] - zmax);
    const auto w = [&](std::size_t k) { return kMaxPersistence * std::exp(z[k] - zmax) / denom; };
    p.alpha.resize(spec.p);
    p.beta.resize(spec.q);
    for (std::size_t i = 0; i < spec.p; ++i) p.alpha[i] = w(1 + i);
    for (std::size_t j = 0; j < spec.q; ++j) p.beta[j] = w(1 + spec.p + j);
    return p;
}

double nll_unconstrained(std::span<const double> x, std::span<const double> z, const GarchSpec& spec, double mu,
                         std::vector<double>* grad) {
    check_spec(spec);
    check_length(x, spec);
    const GarchParams params = from_unconstrained(z, spec, mu);
    if (!(params.omega > 0.0) || !std::isfinite(params.omega)) return std::numeric_limits<double>::infinity();

    const std::size_t n = x.size();
    const std::size_t m = spec.warmup();
    const std::size_t k = spec.n_params();  // derivative slots: omega, alpha..., beta...
    const double init = demeaned_variance(x, mu);

    std::vector<double> h(n, init);
    // dh[t * k + s] = d h_t / d theta_s, zero during warm-up.
    std::vector<double> dh(grad ? n * k : 0, 0.0);
    std::vector<double> dtheta(k, 0.0);
    double nll = 0.0;

    for (std::size_t t = m; t < n; ++t) {
        double v = params.omega;
        for (std::size_t i = 1; i <= spec.p; ++i) {
            const double e = x[t - i] - mu;
            v += params.alpha[i - 1] * e * e;
        }
        for (std::size_t j = 1; j <= spec.q; ++j) v += params.beta[j - 1] * h[t - j];
        h[t] = v;

        const double e = x[t] - mu;
        nll += 0.5 * (kLog2Pi + std::log(v) + e * e / v);

        if (grad) {
            double* d = &dh[t * k];
            d[0] = 1.0;
            for (std::size_t i = 1; i <= spec.p; ++i) {
                const double el = x[t - i] - mu;
                d[i] = el * el;
            }
            for (std::size_t j = 1; j <= spec.q; ++j) d[spec.p + j] = h[t - j];
            for (std::size_t j = 1; j <= spec.q; ++j) {
                const double b = params.beta[j - 1];
                const double* prev = &dh[(t - j) * k];
                for (std::size_t s = 0; s < k; ++s) d[s] += b * prev[s];
            }
            const double dl_dh = 0.5 * (1.0 / v - e * e / (v * v));
            for (std::size_t s = 0; s < k; ++s) dtheta[s] += dl_dh * d[s];
        }
    }
    if (!std::isfinite(nll)) return std::numeric_limits<double>::infinity();

    if (grad) {
        grad->assign(k, 0.0);
        (*grad)[0] = dtheta[0] * params.omega;
        // d w_a / d z_b = w_a (delta_ab - w_b / c)
        std::vector<double> w(k - 1);
        for (std::size_t i = 0; i < spec.p; ++i) w[i] = params.alpha[i];
        for (std::size_t j = 0; j < spec.q; ++j) w[spec.p + j] = params.beta[j];
        double wdot = 0.0;
        for (std::size_t a = 0; a < w.size(); ++a) wdot += dtheta[1 + a] * w[a];
        for (std::size_t b = 0; b < w.size(); ++b)
            (*grad)[1 + b] = w[b] * (dtheta[1 + b] - wdot / kMaxPersistence);
    }
    return nll;
}

GarchFit fit_garch(std::span<const double> x, const GarchSpec& spec, const FitOptions& options) {
    check_spec(spec);
    const std::size_t min_obs = std::max<std::size_t>(spec.warmup() + 10, 3 * spec.n_params() + 10);
    if (x.size() < min_obs) throw Error(Errc::TooFewObservations, "GARCH fit needs at least " +
                                                                      std::to_string(min_obs) + " observations");

    const double mu = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double var = demeaned_variance(x, mu);
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    // Rounding in the mean leaves a tiny residual variance for constant inputs.
    if (!(var > 0.0) || std::sqrt(var) <= 1e-12 * peak) throw Error(Errc::DegenerateSeries, "zero-variance input");

    // Optimize on the unit-variance series; omega rescales by var and NLL shifts by n_eff*log(sd).
    const double sd = std::sqrt(var);
    std::vector<double> xs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] = (x[i] - mu) / sd;
    const double n_eff = static_cast<double>(x.size() - spec.warmup());

    const detail::Objective objective = [&](std::span<const double> z, std::vector<double>* g) {
        return nll_unconstrained(xs, z, spec, 0.0, g);
    };

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> jitter(0.5, 1.5);

    detail::BfgsResult best;
    best.f = std::numeric_limits<double>::infinity();
    std::size_t total_iterations = 0;
    const std::size_t starts = std::max<std::size_t>(options.starts, 1);
    for (std::size_t s = 0; s < starts; ++s) {
        // Method-of-moments style start: moderate ARCH mass, high GARCH persistence.
        double a_mass = spec.q > 0 ? 0.1 : 0.3;
        double b_mass = spec.q > 0 ? 0.8 : 0.0;
        if (s > 0) {
            a_mass *= jitter(rng);
            b_mass = std::min(b_mass * jitter(rng), 0.97 - a_mass);
            if (spec.q > 0) b_mass = std::max(b_mass, 0.05);
        }
        GarchParams start;
        start.alpha.assign(spec.p, a_mass / static_cast<double>(spec.p));
        start.beta.assign(spec.q, spec.q > 0 ? b_mass / static_cast<double>(spec.q) : 0.0);
        start.omega = 1.0 - start.persistence();

        auto res = detail::minimize_bfgs(objective, to_unconstrained(start, spec), options.max_iterations,
                                         options.tolerance);
        total_iterations += res.iterations;
        if (std::isfinite(res.f) && (res.f < best.f || (res.converged && !best.converged && res.f <= best.f + 1e-9)))
            best = std::move(res);
    }
    if (!std::isfinite(best.f)) throw Error(Errc::NoConvergence, std::to_string(total_iterations) + " iterations");

    GarchFit fit;
    fit.spec = spec;
    fit.params = from_unconstrained(best.x, spec, mu);
    fit.params.omega *= var;
    fit.converged = best.converged;
    fit.iterations = best.iterations;

    const auto h = conditional_variance_path(x, fit.params, spec);
    fit.sigma_path.resize(h.size());
    std::transform(h.begin(), h.end(), fit.sigma_path.begin(), [](double v) { return std::sqrt(v); });
    fit.log_likelihood = -(best.f + n_eff * std::log(sd));
    return fit;
}

std::vector<double> forecast_variance(const GarchFit& fit, std::span<const double> x, std::size_t horizon) {
    if (horizon < 1) throw Error(Errc::InvalidHorizon, "horizon must be >= 1");
    const auto& spec = fit.spec;
    const auto& prm = fit.params;
    const auto h_in = conditional_variance_path(x, prm, spec);
    const std::size_t n = x.size();

    // Extended arrays: index n.. are forecasts; squared shocks beyond the sample are E[e^2] = h.
    std::vector<double> h(h_in), e2(n);
    for (std::size_t t = 0; t < n; ++t) e2[t] = (x[t] - prm.mu) * (x[t] - prm.mu);
    h.resize(n + horizon);
    e2.resize(n + horizon);
    for (std::size_t t = n; t < n + horizon; ++t) {
        double v = prm.omega;
        for (std::size_t i = 1; i <= spec.p; ++i) v += prm.alpha[i - 1] * e2[t - i];
        for (std::size_t j = 1; j <= spec.q; ++j) v += prm.beta[j - 1] * h[t - j];
        h[t] = v;
        e2[t] = v;
    }
    return {h.begin() + static_cast<std::ptrdiff_t>(n), h.end()};
}

std::vector<double> forecast_volatility(const GarchFit& fit, std::span<const double> x, std::size_t horizon) {
    auto v = forecast_variance(fit, x, horizon);
    for (double& s : v) s = std::sqrt(s);
    return v;
}

std::vector<double> simulate_garch(const GarchParams& params, const GarchSpec& spec, std::size_t n,
                                   std::uint64_t seed) {
    validate(params, spec);
    if (n < 1) throw Error(Errc::InvalidParams, "n must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Presample lags sit at the unconditional variance.
    const std::size_t m = spec.warmup();
    const double uncond = params.unconditional_variance();
    std::vector<double> h(m + n, uncond), e2(m + n, uncond);
    std::vector<double> out(n);
    for (std::size_t t = m; t < m + n; ++t) {
        double v = params.omega;
        for (std::size_t i = 1; i <= spec.p; ++i) v += params.alpha[i - 1] * e2[t - i];
        for (std::size_t j = 1; j <= spec.q; ++j) v += params.beta[j - 1] * h[t - j];
        h[t] = v;
        const double e = normal(rng) * std::sqrt(v);
        e2[t] = e * e;
        out[t - m] = params.mu + e;
    }
    return out;
}

nlohmann::json to_json(const GarchFit& fit) {
    return {
        {"p", fit.spec.p},
        {"q", fit.spec.q},
        {"omega", fit.params.omega},
        {"alpha", fit.params.alpha},
        {"beta", fit.params.beta},
        {"mu", fit.params.mu},
        {"log_likelihood", fit.log_likelihood},
        {"converged", fit.converged},
        {"iterations", fit.iterations},
    };
}

GarchFit fit_from_json(const nlohmann::json& j) {
    GarchFit fit;
    fit.spec.p = j.at("p").get<std::size_t>();
    fit.spec.q = j.at("q").get<std::size_t>();
    fit.params.omega = j.at("omega").get<double>();
    fit.params.alpha = j.at("alpha").get<std::vector<double>>();
    fit.params.beta = j.at("beta").get<std::vector<double>>();
    fit.params.mu = j.at("mu").get<double>();
    fit.log_likelihood = j.at("log_likelihood").get<double>();
    fit.converged = j.at("converged").get<bool>();
    fit.iterations = j.at("iterations").get<std::size_t>();
    validate(fit.params, fit.spec);
    return fit;
}

}  // namespace eqf::garch
