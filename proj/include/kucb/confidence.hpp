#ifndef KUCB_CONFIDENCE_HPP
#define KUCB_CONFIDENCE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kucb/kernels.hpp"
#include "kucb/posterior.hpp"

namespace kucb {

// Confidence-radius rule. The Hilbert-space mixture rule shrinks with its
// regularization rho; the doubly-regularized comparison rule grows with its
// shift eta.
struct RadiusSpec {
    enum class Rule { kAbbasiHilbert, kChowdhury };
    Rule rule = Rule::kAbbasiHilbert;
    double rho = 1.0;  // used by kAbbasiHilbert
    double eta = 0.0;  // used by kChowdhury
    double sigma = 1.0;
    double delta = 0.05;
    double norm_bound = 1.0;  // D

    void validate() const;
};

// Noise-only part of the mixture radius:
// sigma * sqrt(2 * (logdet/2 + log(1/delta))).
double abbasi_noise_term(double logdet_gram, double sigma, double delta);

// Full radius U_t = noise term + sqrt(rho) * D, with
// logdet_gram = log det(I + rho^{-1} K_t).
double abbasi_radius(double logdet_gram, const RadiusSpec& spec);

// Noise term sigma * sqrt(2 * (logdet((1+eta)I + K)/2 + log(1/delta))) of the
// comparison rule. Returns the noise term only; no norm component.
double chowdhury_radius(const Eigen::MatrixXd& gram, const RadiusSpec& spec);

// || (rho id + V_t)^{-1/2} S_t ||_H computed in the Gram domain:
// sqrt(eps' (rho^{-1}K)(I + rho^{-1}K)^{-1} eps). Valid for singular K.
double selfnorm_stat_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& eps, double rho);

// || ((K + eta I)^{-1} + I)^{-1/2} eps ||_2. Requires K + eta I invertible.
double selfnorm_stat_chowdhury(const Eigen::MatrixXd& gram, const Eigen::VectorXd& eps,
                               double eta);

enum class NoiseKind { kGaussian, kRademacher };
// Predictable action rules: none of them peeks at the current round's noise.
enum class DesignRule { kFixedSweep, kUniformRandom, kWidthGreedy };

struct TrajectoryConfig {
    Kernel kernel = Kernel::squared_exponential(1.0);
    std::vector<Point> grid;
    double rho = 1.0;
    double sigma = 1.0;
    DesignRule design = DesignRule::kWidthGreedy;
    NoiseKind noise = NoiseKind::kGaussian;
    int horizon = 0;
    std::uint64_t seed = 1;
};

// One simulated path of the mixture process M_t together with the
// self-normalized statistic and log-determinant traces. Entry 0 is the
// boundary value (M_0 = 1). All arithmetic is in log space; M_t itself can
// overflow double range at large statistics.
struct MixtureTrajectory {
    std::vector<double> logdet;   // log det(I + rho^{-1} K_t)
    std::vector<double> stat;     // self-normalized statistic
    std::vector<double> log_m;    // log M_t = stat^2/(2 sigma^2) - logdet/2
    std::vector<int> action;      // grid index chosen at round t (index 1..T)
    std::vector<double> eps;      // realized noise (index 1..T)
    int horizon() const { return static_cast<int>(logdet.size()) - 1; }
    bool crosses(double delta) const;  // exists t with log M_t >= log(1/delta)
};

MixtureTrajectory mixture_trajectory(const TrajectoryConfig& config);

// The same path with statistics computed from features truncated to the
// first `projection_dim` basis coordinates. Requires a finite-rank kernel.
// Reuses the exact action / noise sequence of mixture_trajectory for the
// same seed.
MixtureTrajectory truncated_mixture(const TrajectoryConfig& config, int projection_dim);

// Membership check of f* in the ellipsoid
// || (rho I + E'E)^{1/2} (theta_t - theta*) || <= radius, evaluated in
// explicit feature coordinates. Requires a finite-rank kernel.
bool ellipsoid_contains(const PosteriorState& state, const std::vector<Point>& centers,
                        const Eigen::VectorXd& coefficients, double radius);

// Squared ellipsoid distance (theta_t - theta*)' (rho I + E'E) (theta_t - theta*).
double ellipsoid_distance_sq(const PosteriorState& state, const std::vector<Point>& centers,
                             const Eigen::VectorXd& coefficients);

}  // namespace kucb

#endif
