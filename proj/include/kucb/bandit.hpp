#ifndef KUCB_BANDIT_HPP
#define KUCB_BANDIT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kucb/confidence.hpp"
#include "kucb/kernels.hpp"
#include "kucb/posterior.hpp"
#include "kucb/rng.hpp"

namespace kucb {

// Target function f* = sum_i coeff_i k(., center_i).
struct TargetFunction {
    std::vector<Point> centers;
    Eigen::VectorXd coefficients;
    double value(const Kernel& kernel, const Point& x) const;
};

// Synthetic bandit environment over a finite candidate grid.
struct Environment {
    Kernel kernel = Kernel::squared_exponential(1.0);
    TargetFunction f_star;
    std::vector<Point> grid;
    double sigma = 0.0;
    NoiseKind noise = NoiseKind::kGaussian;
    std::uint64_t seed = 1;
    double norm_bound = 0.0;  // declared D >= ||f*||
    int x_star_index = 0;
    double f_max = 0.0;
    std::vector<double> f_values;  // f* over the grid

    // Validates ||f*|| <= D and locates the maximizer by scan.
    // norm_bound <= 0 means "use the exact RKHS norm".
    static Environment make(Kernel kernel, TargetFunction f_star, std::vector<Point> grid,
                            double sigma, NoiseKind noise, std::uint64_t seed,
                            double norm_bound = 0.0);
};

// Regularization schedule rho = c * T^{1/(1+beta)}.
double rho_schedule(double horizon, double beta, double scale = 1.0);
// Regret-rate exponent (3+beta)/(2+2*beta) under polynomial eigendecay.
double regret_exponent(double beta);
// Matern specialization (nu+2d)/(2nu+2d); equals
// regret_exponent(matern_eigendecay_beta(nu, d)).
double matern_regret_exponent(double nu, int d);

struct RegretRow {
    int t = 0;
    int x_index = 0;
    double y = 0.0;
    double instant = 0.0;     // r_t = f*(x*) - f*(X_t)
    double cumulative = 0.0;  // R_t
    double radius = 0.0;      // U_{t-1} used for the selection
    double width = 0.0;       // width_{t-1}(X_t)
    double logdet = 0.0;      // log det(I + rho^{-1} K_t) after the update
};

// One GP-UCB round: optimistic argmax (ties to the lowest grid index),
// environment feedback, posterior update.
RegretRow gp_ucb_step(GridPosterior& posterior, const RadiusSpec& spec, const Environment& env,
                      Rng& noise_rng, double cumulative_so_far);

struct EpisodeConfig {
    Environment env;
    double rho = 1.0;
    double delta = 0.05;
    int horizon = 0;
    bool audit_coverage = false;  // per-round ellipsoid membership (finite-rank kernels)
};

struct EpisodeResult {
    std::vector<RegretRow> rows;
    PotentialAudit audit{};
    double final_regret = 0.0;
    double final_radius = 0.0;  // U_T
    // Coverage audit (only when requested): whether f* stayed inside the
    // ellipsoid at every round, and the first violating round otherwise.
    std::optional<bool> covered;
    int first_violation = -1;
    std::vector<bool> covered_rounds;
};

EpisodeResult run_episode(const EpisodeConfig& config);

}  // namespace kucb

#endif
