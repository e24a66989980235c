#include "kucb/infogain.hpp"

#include <cmath>
#include <limits>

#include "kucb/bandit.hpp"
#include "kucb/errors.hpp"
#include "kucb/posterior.hpp"

namespace kucb {

InfoGainCurve greedy_infogain(const Kernel& kernel, const std::vector<Point>& grid, double rho,
                              int horizon, std::optional<double> user_eigenfunction_bound) {
    if (grid.empty()) throw ConfigError("infogain: empty candidate grid");
    if (horizon < 0) throw InputError("infogain: negative horizon");
    InfoGainCurve curve;
    curve.rho = rho;
    curve.gamma_hat.assign(horizon + 1, 0.0);
    curve.gamma_bound.assign(horizon + 1, std::numeric_limits<double>::quiet_NaN());
    curve.certified = kernel.eigendecay_certified() && kernel.eigendecay() &&
                      kernel.eigenfunction_bound().has_value();
    std::optional<double> bound_b = kernel.eigenfunction_bound();
    if (!bound_b) bound_b = user_eigenfunction_bound;  // uncertified bound curve
    const bool emit_bound = kernel.eigendecay().has_value() && bound_b.has_value();
    GridPosterior posterior(kernel, grid, rho, /*track_responses=*/false);
    for (int t = 1; t <= horizon; ++t) {
        posterior.observe(posterior.argmax_width(), 0.0);
        curve.gamma_hat[t] = 0.5 * posterior.state().logdet_gram();
        if (emit_bound) {
            const EigenDecay decay = *kernel.eigendecay();
            curve.gamma_bound[t] =
                vakili_bound(t, rho, decay.c, *bound_b, kernel.uniform_bound(), decay.beta);
        }
    }
    if (emit_bound) curve.gamma_bound[0] = 0.0;
    return curve;
}

double vakili_bound(double t, double rho, double c, double b, double l, double beta) {
    if (!(beta > 1.0)) throw ConfigError("eigendecay bound: beta must exceed 1");
    if (!(t >= 1.0) || !(rho > 0.0) || !(c > 0.0) || !(b > 0.0) || !(l > 0.0)) {
        throw ConfigError("eigendecay bound: parameters must be positive and t >= 1");
    }
    const double log_term = std::log1p(l * t / rho);
    if (!(log_term > 0.0)) throw NumericalError("eigendecay bound: vanishing log term");
    const double lead = std::pow(c * b * b * t / rho, 1.0 / beta);
    return (lead * std::pow(log_term, -1.0 / beta) + 1.0) * log_term;
}

double vakili_bound_exponential(double t, double rho, double c1, double c2, double b, double l,
                                double beta) {
    if (!(beta > 0.0)) throw ConfigError("eigendecay bound: beta must be positive");
    if (!(t >= 1.0) || !(rho > 0.0) || !(c1 > 0.0) || !(c2 > 0.0) || !(b > 0.0) || !(l > 0.0)) {
        throw ConfigError("eigendecay bound: parameters must be positive and t >= 1");
    }
    const double log_term = std::log1p(l * t / rho);
    double c_beta;
    if (beta == 1.0) {
        c_beta = std::log(c1 * b * b / (c2 * rho));
    } else {
        const double inner = 2.0 / c2 * (1.0 / beta - 1.0);
        if (!(inner > 0.0)) {
            throw NumericalError(
                "exponential eigendecay bound: constant undefined for beta > 1");
        }
        c_beta = std::log(2.0 * c1 * b * b / (rho * beta * c2)) +
                 (1.0 / beta - 1.0) * (std::log(inner) - 1.0);
    }
    const double lead = std::pow(2.0 / c2 * (std::log(t) + c_beta), 1.0 / beta);
    return (lead + 1.0) * log_term;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InputError("slope fit: need at least two matching samples");
    }
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw NumericalError("slope fit: degenerate abscissa");
    return (n * sxy - sx * sy) / denom;
}

ScheduleCheck schedule_consistency_check(double beta, const std::vector<double>& horizons) {
    if (!(beta > 1.0)) throw ConfigError("schedule check: beta must exceed 1");
    if (horizons.size() < 2) throw InputError("schedule check: need at least two horizons");
    ScheduleCheck report;
    report.beta = beta;
    report.target_exponent = regret_exponent(beta);
    report.horizons = horizons;
    std::vector<double> gamma_sqrt_t;
    std::vector<double> sqrt_rho_gamma_t;
    for (double horizon : horizons) {
        const double rho = rho_schedule(horizon, beta);
        report.rhos.push_back(rho);
        const double fixed_point = std::pow(horizon / rho, 1.0 / beta);
        report.max_fixed_point_error =
            std::max(report.max_fixed_point_error, std::abs(fixed_point - rho) / rho);
        const double gamma = vakili_bound(horizon, rho, 1.0, 1.0, 1.0, beta);
        gamma_sqrt_t.push_back(gamma * std::sqrt(horizon));
        sqrt_rho_gamma_t.push_back(std::sqrt(rho * gamma * horizon));
    }
    report.slope_gamma_sqrt_t = loglog_slope(horizons, gamma_sqrt_t);
    report.slope_sqrt_rho_gamma_t = loglog_slope(horizons, sqrt_rho_gamma_t);
    return report;
}

}  // namespace kucb
