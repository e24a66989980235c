#ifndef KUCB_INFOGAIN_HPP
#define KUCB_INFOGAIN_HPP

#include <optional>
#include <vector>

#include "kucb/kernels.hpp"

namespace kucb {

// Greedy lower estimates of the maximum information gain together with the
// closed-form eigendecay upper bound (when the kernel certifies constants).
struct InfoGainCurve {
    double rho = 1.0;
    std::vector<double> gamma_hat;    // index 0..T; greedy 1/2 log det trace
    std::vector<double> gamma_bound;  // same indexing; NaN when uncertified
    bool certified = false;
};

// Greedy design maximizing the log-det increment log(1 + width^2) per step.
// A certified lower estimate of gamma_t(rho); the exact sup over designs is
// combinatorial. Kernels without a certified eigenfunction bound (Matern)
// get bound curves only when a user-supplied B is passed, and the curve is
// marked uncertified.
InfoGainCurve greedy_infogain(const Kernel& kernel, const std::vector<Point>& grid, double rho,
                              int horizon, std::optional<double> user_eigenfunction_bound = {});

// Polynomial-eigendecay bound
// ((C B^2 t / rho)^{1/beta} log^{-1/beta}(1 + L t / rho) + 1) * log(1 + L t / rho).
double vakili_bound(double t, double rho, double c, double b, double l, double beta);

// Exponential-eigendecay branch, formula evaluator only: no kernel in this
// suite certifies (C1, C2, beta) constants.
double vakili_bound_exponential(double t, double rho, double c1, double c2, double b, double l,
                                double beta);

struct ScheduleCheck {
    double beta = 0.0;
    double target_exponent = 0.0;       // (3+beta)/(2+2*beta)
    double max_fixed_point_error = 0.0; // max relative |rho^{1+beta} - T| / T
    double slope_gamma_sqrt_t = 0.0;    // fit of log(gamma_bound * sqrt(T))
    double slope_sqrt_rho_gamma_t = 0.0;  // fit of log(sqrt(rho gamma_bound T))
    std::vector<double> horizons;
    std::vector<double> rhos;
};

// Verifies the fixed-point identity rho = (T/rho)^{1/beta} at
// rho = T^{1/(1+beta)} and fits log-log slopes of both regret-bound terms
// over the horizon range using the closed-form bound with C = B = L = 1.
ScheduleCheck schedule_consistency_check(double beta, const std::vector<double>& horizons);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kucb

#endif
