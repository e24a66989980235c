#ifndef KUCB_POSTERIOR_HPP
#define KUCB_POSTERIOR_HPP

#include <Eigen/Dense>
#include <vector>

#include "kucb/kernels.hpp"

namespace kucb {

// Incremental kernel ridge regression state. Maintains the lower Cholesky
// factor of (K_t + rho I), the dual coefficients alpha = (K_t + rho I)^{-1} Y,
// and the running log det(K_t + rho I) via rank-one bordering.
//
// Single writer; concurrent reads between updates are safe.
class PosteriorState {
public:
    PosteriorState(Kernel kernel, double rho, bool track_responses = true);

    void update(const Point& x, double y);
    // Same update with the kernel column k(x, X_1..X_t) and k(x,x) supplied
    // by the caller (grid engines cache these).
    void update_with_column(const Point& x, double y, const Eigen::VectorXd& kcol, double kxx);

    // Posterior mean k_t(x)' alpha; 0 when empty.
    double mean(const Point& x) const;
    // Self-normalized width sqrt((k(x,x) - k_t(x)'(K+rhoI)^{-1}k_t(x)) / rho).
    double width(const Point& x) const;
    double width_from_column(const Eigen::VectorXd& kcol, double kxx) const;

    int count() const { return t_; }
    double rho() const { return rho_; }
    const Kernel& kernel() const { return kernel_; }

    // log det(K_t + rho I_t).
    double logdet_regularized() const { return logdet_reg_; }
    // log det(I_t + rho^{-1} K_t); nonnegative and nondecreasing in t.
    double logdet_gram() const { return logdet_reg_ - t_ * std::log(rho_); }

    // Lower-triangular Cholesky factor of (K_t + rho I), t x t view.
    Eigen::Block<const Eigen::MatrixXd> chol() const { return storage_.topLeftCorner(t_, t_); }
    const Eigen::VectorXd& alpha() const;
    Eigen::VectorBlock<const Eigen::VectorXd> responses() const { return y_.head(t_); }
    const std::vector<Point>& points() const { return points_; }

    // Kernel column k(x, X_1..X_t).
    Eigen::VectorXd kvec(const Point& x) const;

private:
    void refresh_alpha();

    Kernel kernel_;
    double rho_;
    bool track_responses_;
    int t_ = 0;
    Eigen::MatrixXd storage_;  // capacity x capacity, lower triangle in use
    Eigen::VectorXd y_;
    Eigen::VectorXd alpha_;
    double logdet_reg_ = 0.0;
    std::vector<Point> points_;
};

// Elliptical potential audit: compares prod_s (1 + width_{s-1}(X_s)^2)
// against det(I + rho^{-1} K_t) recomputed from scratch, plus the width
// square sum that the potential argument bounds by 2 log det.
struct PotentialAudit {
    double product;      // may overflow to inf for very long traces
    double log_product;  // always finite
    double logdet;       // log det(I + rho^{-1} K_t), batch recompute
    double sum_sq;
};
PotentialAudit elliptical_potential_audit(const PosteriorState& state,
                                          const std::vector<double>& widths_at_selection);

// RKHS norm sqrt(coeff' K_z coeff) of f = sum_i coeff_i k(., z_i).
double rkhs_norm(const Kernel& kernel, const std::vector<Point>& centers,
                 const Eigen::VectorXd& coefficients);

// Posterior over a fixed finite candidate grid. Caches the grid Gram matrix
// and per-point solved columns so a full sweep of means and widths costs
// O(grid * t) per round instead of O(grid * t^2).
class GridPosterior {
public:
    GridPosterior(Kernel kernel, std::vector<Point> grid, double rho, bool track_responses = true);

    void observe(int grid_index, double y);

    double width_at(int grid_index) const;
    double width_sq_at(int grid_index) const;
    double mean_at(int grid_index) const;
    // Mean over the whole grid in one BLAS pass.
    Eigen::VectorXd means() const;

    int grid_size() const { return static_cast<int>(grid_.size()); }
    const std::vector<Point>& grid() const { return grid_; }
    const Eigen::MatrixXd& grid_gram() const { return grid_gram_; }
    const PosteriorState& state() const { return state_; }
    const std::vector<int>& selected() const { return selected_; }

    // Grid index with the largest width; ties broken by lowest index.
    int argmax_width() const;

private:
    PosteriorState state_;
    std::vector<Point> grid_;
    Eigen::MatrixXd grid_gram_;
    Eigen::MatrixXd solved_;    // grid x capacity; row i = L^{-1} k_t(g_i)
    Eigen::MatrixXd selected_gram_;  // grid x capacity; col s = grid_gram_.col(j_s)
    Eigen::VectorXd solved_sq_;      // row squared norms of solved_
    std::vector<int> selected_;
};

}  // namespace kucb

#endif
