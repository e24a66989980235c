#include "kucb/posterior.hpp"

#include <cmath>
#include <string>

#include "kucb/errors.hpp"

namespace kucb {

namespace {
constexpr int kInitialCapacity = 16;
constexpr double kWidthClamp = -1e-9;
}  // namespace

PosteriorState::PosteriorState(Kernel kernel, double rho, bool track_responses)
    : kernel_(std::move(kernel)), rho_(rho), track_responses_(track_responses) {
    if (!(rho > 0.0)) throw ConfigError("posterior: regularization rho must be positive");
    storage_ = Eigen::MatrixXd::Zero(kInitialCapacity, kInitialCapacity);
    y_ = Eigen::VectorXd::Zero(kInitialCapacity);
}

Eigen::VectorXd PosteriorState::kvec(const Point& x) const {
    Eigen::VectorXd col(t_);
    for (int s = 0; s < t_; ++s) col[s] = kernel_.eval(x, points_[s]);
    return col;
}

void PosteriorState::update(const Point& x, double y) {
    update_with_column(x, y, kvec(x), kernel_.eval(x, x));
}

void PosteriorState::update_with_column(const Point& x, double y, const Eigen::VectorXd& kcol,
                                        double kxx) {
    if (!std::isfinite(y)) throw InputError("posterior update: non-finite response");
    if (kcol.size() != t_) throw InputError("posterior update: kernel column has wrong length");
    if (t_ + 1 > storage_.rows()) {
        const int cap = static_cast<int>(storage_.rows()) * 2;
        Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(cap, cap);
        grown.topLeftCorner(t_, t_) = storage_.topLeftCorner(t_, t_);
        storage_.swap(grown);
        Eigen::VectorXd ygrown = Eigen::VectorXd::Zero(cap);
        ygrown.head(t_) = y_.head(t_);
        y_.swap(ygrown);
    }
    // Bordering step: solve L w = kcol, pivot^2 = k(x,x) + rho - |w|^2.
    Eigen::VectorXd w = kcol;
    if (t_ > 0) {
        storage_.topLeftCorner(t_, t_).triangularView<Eigen::Lower>().solveInPlace(w);
    }
    const double pivot_sq = kxx + rho_ - w.squaredNorm();
    if (!(pivot_sq > 0.0)) {
        throw NumericalError("posterior update: Cholesky pivot " + std::to_string(pivot_sq) +
                             " is not positive; rho too small for the conditioning of K");
    }
    storage_.row(t_).head(t_) = w.transpose();
    storage_(t_, t_) = std::sqrt(pivot_sq);
    y_[t_] = y;
    points_.push_back(x);
    logdet_reg_ += std::log(pivot_sq);
    ++t_;
    if (track_responses_) refresh_alpha();
}

void PosteriorState::refresh_alpha() {
    alpha_ = y_.head(t_);
    const auto L = storage_.topLeftCorner(t_, t_);
    L.triangularView<Eigen::Lower>().solveInPlace(alpha_);
    L.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha_);
}

const Eigen::VectorXd& PosteriorState::alpha() const {
    if (!track_responses_) {
        throw UnsupportedOperationError("posterior: response tracking disabled for this state");
    }
    return alpha_;
}

double PosteriorState::mean(const Point& x) const {
    if (t_ == 0) return 0.0;
    return kvec(x).dot(alpha());
}

double PosteriorState::width_from_column(const Eigen::VectorXd& kcol, double kxx) const {
    Eigen::VectorXd w = kcol;
    if (t_ > 0) {
        storage_.topLeftCorner(t_, t_).triangularView<Eigen::Lower>().solveInPlace(w);
    }
    const double radicand = (kxx - w.squaredNorm()) / rho_;
    if (radicand < kWidthClamp) {
        throw NumericalError("posterior width: radicand " + std::to_string(radicand) +
                             " below roundoff tolerance");
    }
    return std::sqrt(std::max(0.0, radicand));
}

double PosteriorState::width(const Point& x) const {
    return width_from_column(kvec(x), kernel_.eval(x, x));
}

PotentialAudit elliptical_potential_audit(const PosteriorState& state,
                                          const std::vector<double>& widths_at_selection) {
    if (static_cast<int>(widths_at_selection.size()) != state.count()) {
        throw InputError("potential audit: trace length does not match observation count");
    }
    PotentialAudit out{1.0, 0.0, 0.0, 0.0};
    for (double w : widths_at_selection) {
        out.product *= 1.0 + w * w;
        out.log_product += std::log1p(w * w);
        out.sum_sq += w * w;
    }
    // Independent route: batch factorization of I + rho^{-1} K_t.
    const Eigen::MatrixXd gram = state.kernel().gram(state.points());
    const int t = state.count();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(t, t) + gram / state.rho();
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("potential audit: batch factorization of I + K/rho failed");
    }
    double logdet = 0.0;
    for (int i = 0; i < t; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    out.logdet = logdet;
    return out;
}

double rkhs_norm(const Kernel& kernel, const std::vector<Point>& centers,
                 const Eigen::VectorXd& coefficients) {
    if (static_cast<Eigen::Index>(centers.size()) != coefficients.size()) {
        throw InputError("rkhs norm: centers and coefficients disagree in length");
    }
    if (centers.empty()) return 0.0;
    const Eigen::MatrixXd gram = kernel.gram(centers);
    const double sq = coefficients.dot(gram * coefficients);
    if (sq < -1e-9 * std::max(1.0, gram.trace())) {
        throw NumericalError("rkhs norm: quadratic form is negative beyond tolerance");
    }
    return std::sqrt(std::max(0.0, sq));
}

GridPosterior::GridPosterior(Kernel kernel, std::vector<Point> grid, double rho,
                             bool track_responses)
    : state_(std::move(kernel), rho, track_responses), grid_(std::move(grid)) {
    if (grid_.empty()) throw ConfigError("grid posterior: candidate grid is empty");
    const int n = grid_size();
    grid_gram_ = state_.kernel().gram(grid_);
    solved_.resize(n, kInitialCapacity);
    selected_gram_.resize(n, kInitialCapacity);
    solved_sq_ = Eigen::VectorXd::Zero(n);
}

void GridPosterior::observe(int grid_index, double y) {
    if (grid_index < 0 || grid_index >= grid_size()) {
        throw InputError("grid posterior: index out of range");
    }
    const int t = state_.count();
    if (t + 1 > solved_.cols()) {
        const int cap = static_cast<int>(solved_.cols()) * 2;
        Eigen::MatrixXd grown(grid_size(), cap);
        grown.leftCols(t) = solved_.leftCols(t);
        solved_.swap(grown);
        Eigen::MatrixXd sg(grid_size(), cap);
        sg.leftCols(t) = selected_gram_.leftCols(t);
        selected_gram_.swap(sg);
    }
    Eigen::VectorXd kcol(t);
    for (int s = 0; s < t; ++s) kcol[s] = grid_gram_(selected_[s], grid_index);
    state_.update_with_column(grid_[grid_index], y, kcol, grid_gram_(grid_index, grid_index));
    const double pivot = state_.chol()(t, t);
    const Eigen::VectorXd chol_row = state_.chol().row(t).head(t);
    // Extend every cached solve by one entry.
    const Eigen::VectorXd extension =
        (grid_gram_.col(grid_index) - solved_.leftCols(t) * chol_row) / pivot;
    solved_.col(t) = extension;
    solved_sq_ += extension.cwiseProduct(extension);
    selected_gram_.col(t) = grid_gram_.col(grid_index);
    selected_.push_back(grid_index);
}

double GridPosterior::width_sq_at(int grid_index) const {
    const double radicand =
        (grid_gram_(grid_index, grid_index) - solved_sq_[grid_index]) / state_.rho();
    if (radicand < -1e-9) {
        throw NumericalError("grid posterior width: radicand below roundoff tolerance");
    }
    return std::max(0.0, radicand);
}

double GridPosterior::width_at(int grid_index) const { return std::sqrt(width_sq_at(grid_index)); }

double GridPosterior::mean_at(int grid_index) const {
    const int t = state_.count();
    if (t == 0) return 0.0;
    return selected_gram_.row(grid_index).head(t).dot(state_.alpha());
}

Eigen::VectorXd GridPosterior::means() const {
    const int t = state_.count();
    if (t == 0) return Eigen::VectorXd::Zero(grid_size());
    return selected_gram_.leftCols(t) * state_.alpha();
}

int GridPosterior::argmax_width() const {
    int best = 0;
    double best_sq = width_sq_at(0);
    for (int i = 1; i < grid_size(); ++i) {
        const double sq = width_sq_at(i);
        if (sq > best_sq) {
            best = i;
            best_sq = sq;
        }
    }
    return best;
}

}  // namespace kucb
