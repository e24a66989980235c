#ifndef KUCB_KERNELS_HPP
#define KUCB_KERNELS_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "kucb/errors.hpp"

namespace kucb {

using Point = Eigen::VectorXd;

inline Point point1d(double x) {
    Point p(1);
    p[0] = x;
    return p;
}

struct EigenDecay {
    double c;     // mu_n <= c * n^{-beta}
    double beta;  // > 1
};

// Explicit finite-rank feature map: embed(x)[n] = sqrt(mu_{n+1}) * phi_{n+1}(x).
// Inner products of embeddings reproduce the kernel exactly at finite rank.
// Only synthetic Mercer kernels carry one.
class FeatureMap {
public:
    FeatureMap(int rank, int dim, double decay_c, double decay_beta);

    int rank() const { return rank_; }
    int dim() const { return dim_; }

    Eigen::VectorXd embed(const Point& x) const;

    // Raw eigenfunction phi_n and eigenvalue mu_n, 1-based index.
    double eigenfunction(int n, const Point& x) const;
    double eigenvalue(int n) const { return sqrt_mu_[n - 1] * sqrt_mu_[n - 1]; }

private:
    int rank_;
    int dim_;
    Eigen::VectorXd sqrt_mu_;
};

// Immutable kernel description. Value type; cheap to copy and safe to share
// across threads. All evaluation is pure.
class Kernel {
public:
    enum class Family { kSquaredExponential, kMatern, kMercerSynthetic };

    static Kernel squared_exponential(double bandwidth);
    // Half-integer nu in {1/2, 3/2, 5/2} uses exact closed forms. Other nu
    // values need allow_general_nu (modified-Bessel evaluation). `dim` only
    // feeds the eigendecay metadata.
    static Kernel matern(double nu, double bandwidth, bool allow_general_nu = false, int dim = 1);
    // k(x,y) = sum_{n<=rank} mu_n phi_n(x) phi_n(y), mu_n = C n^{-beta},
    // cosine eigenfunctions on [0,1]^dim (one active coordinate per index).
    static Kernel mercer_synthetic(int rank, double decay_c, double decay_beta, int dim = 1);

    Family family() const { return family_; }
    int dim_hint() const { return dim_; }  // only meaningful for MercerSynthetic

    double eval(const Point& x, const Point& y) const;
    double operator()(const Point& x, const Point& y) const { return eval(x, y); }

    Eigen::MatrixXd gram(const std::vector<Point>& points) const;

    // Uniform bound L with |k(x,y)| <= L.
    double uniform_bound() const { return uniform_bound_; }
    // Uniform eigenfunction bound B, when known.
    std::optional<double> eigenfunction_bound() const { return eigenfunction_bound_; }
    std::optional<EigenDecay> eigendecay() const { return eigendecay_; }
    // True when (C, beta, B, L) are exact rather than conventional defaults.
    bool eigendecay_certified() const { return certified_; }

    bool has_feature_map() const { return family_ == Family::kMercerSynthetic; }
    // Throws UnsupportedOperationError for kernels without explicit features.
    const FeatureMap& feature_map() const;

    double bandwidth() const { return bandwidth_; }
    double nu() const { return nu_; }
    int rank() const { return rank_; }

private:
    Kernel() = default;

    Family family_ = Family::kSquaredExponential;
    double bandwidth_ = 1.0;
    double nu_ = 0.0;
    bool general_nu_ = false;
    int rank_ = 0;
    int dim_ = 1;
    double uniform_bound_ = 1.0;
    std::optional<double> eigenfunction_bound_;
    std::optional<EigenDecay> eigendecay_;
    bool certified_ = false;
    std::optional<FeatureMap> features_;

    double radial(double distance) const;
};

// Eigendecay exponent (2*nu + d) / d of the Matern family in dimension d.
double matern_eigendecay_beta(double nu, int d);

}  // namespace kucb

#endif
