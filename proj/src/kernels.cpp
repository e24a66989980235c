#include "kucb/kernels.hpp"

#include <cmath>
#include <string>

namespace kucb {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool finite_point(const Point& p) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i])) return false;
    }
    return true;
}

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

FeatureMap::FeatureMap(int rank, int dim, double decay_c, double decay_beta)
    : rank_(rank), dim_(dim), sqrt_mu_(rank) {
    for (int n = 1; n <= rank; ++n) {
        sqrt_mu_[n - 1] = std::sqrt(decay_c * std::pow(static_cast<double>(n), -decay_beta));
    }
}

double FeatureMap::eigenfunction(int n, const Point& x) const {
    if (n == 1) return 1.0;
    // Index n >= 2 activates a single coordinate, cycling through dimensions,
    // so the uniform bound sqrt(2) is preserved in any dimension.
    const int coord = (n - 2) % dim_;
    const int freq = 1 + (n - 2) / dim_;  // cos(freq * pi * x_coord)
    return std::sqrt(2.0) * std::cos(static_cast<double>(freq) * kPi * x[coord]);
}

Eigen::VectorXd FeatureMap::embed(const Point& x) const {
    if (x.size() < dim_) throw InputError("feature map: point has fewer coordinates than kernel dimension");
    Eigen::VectorXd out(rank_);
    for (int n = 1; n <= rank_; ++n) out[n - 1] = sqrt_mu_[n - 1] * eigenfunction(n, x);
    return out;
}

Kernel Kernel::squared_exponential(double bandwidth) {
    if (!(bandwidth > 0.0)) throw ConfigError("squared-exponential kernel: bandwidth must be positive");
    Kernel k;
    k.family_ = Family::kSquaredExponential;
    k.bandwidth_ = bandwidth;
    k.uniform_bound_ = 1.0;
    return k;
}

Kernel Kernel::matern(double nu, double bandwidth, bool allow_general_nu, int dim) {
    if (!(bandwidth > 0.0)) throw ConfigError("matern kernel: bandwidth must be positive");
    if (!(nu >= 0.5)) throw ConfigError("matern kernel: nu must be >= 1/2");
    if (dim < 1) throw ConfigError("matern kernel: dimension must be >= 1");
    const bool half_integer = near(nu, 0.5) || near(nu, 1.5) || near(nu, 2.5);
    if (!half_integer && !allow_general_nu) {
        throw ConfigError("matern kernel: nu=" + std::to_string(nu) +
                          " has no closed form; enable general-nu (Bessel) support");
    }
    Kernel k;
    k.family_ = Family::kMatern;
    k.bandwidth_ = bandwidth;
    k.nu_ = nu;
    k.general_nu_ = !half_integer;
    k.dim_ = dim;
    k.uniform_bound_ = 1.0;
    // The decay exponent is known for any ambient dimension; the constant is
    // not available in closed form, so C defaults to 1 and stays uncertified.
    k.eigendecay_ = EigenDecay{1.0, matern_eigendecay_beta(nu, dim)};
    k.certified_ = false;
    return k;
}

Kernel Kernel::mercer_synthetic(int rank, double decay_c, double decay_beta, int dim) {
    if (rank < 1) throw ConfigError("mercer kernel: rank must be >= 1");
    if (!(decay_c > 0.0)) throw ConfigError("mercer kernel: decay constant must be positive");
    if (!(decay_beta > 1.0)) throw ConfigError("mercer kernel: decay exponent must be > 1");
    if (dim < 1) throw ConfigError("mercer kernel: dimension must be >= 1");
    Kernel k;
    k.family_ = Family::kMercerSynthetic;
    k.rank_ = rank;
    k.dim_ = dim;
    k.features_.emplace(rank, dim, decay_c, decay_beta);
    double bound = 0.0;
    for (int n = 1; n <= rank; ++n) bound += 2.0 * decay_c * std::pow(static_cast<double>(n), -decay_beta);
    k.uniform_bound_ = bound;
    k.eigenfunction_bound_ = std::sqrt(2.0);
    k.eigendecay_ = EigenDecay{decay_c, decay_beta};
    k.certified_ = true;
    return k;
}

const FeatureMap& Kernel::feature_map() const {
    if (!features_) throw UnsupportedOperationError("kernel has no explicit finite-rank feature map");
    return *features_;
}

double Kernel::radial(double distance) const {
    const double r = distance;
    switch (family_) {
        case Family::kSquaredExponential:
            return std::exp(-r * r / (2.0 * bandwidth_ * bandwidth_));
        case Family::kMatern: {
            const double z = std::sqrt(2.0 * nu_) * r / bandwidth_;
            if (z == 0.0) return 1.0;
            if (near(nu_, 0.5)) return std::exp(-z);
            if (near(nu_, 1.5)) return (1.0 + z) * std::exp(-z);
            if (near(nu_, 2.5)) return (1.0 + z + z * z / 3.0) * std::exp(-z);
            return std::pow(2.0, 1.0 - nu_) / std::tgamma(nu_) * std::pow(z, nu_) *
                   std::cyl_bessel_k(nu_, z);
        }
        case Family::kMercerSynthetic:
            break;
    }
    throw UnsupportedOperationError("radial form undefined for this kernel family");
}

double Kernel::eval(const Point& x, const Point& y) const {
    if (!finite_point(x) || !finite_point(y)) throw InputError("kernel eval: non-finite coordinates");
    if (x.size() != y.size()) throw InputError("kernel eval: dimension mismatch");
    if (family_ == Family::kMercerSynthetic) {
        const FeatureMap& fm = *features_;
        double acc = 0.0;
        for (int n = 1; n <= rank_; ++n) {
            acc += fm.eigenvalue(n) * fm.eigenfunction(n, x) * fm.eigenfunction(n, y);
        }
        return acc;
    }
    // Translation-invariant families: symmetric by construction since only
    // ||x - y|| enters.
    return radial((x - y).norm());
}

Eigen::MatrixXd Kernel::gram(const std::vector<Point>& points) const {
    const Eigen::Index t = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd out(t, t);
    for (Eigen::Index i = 0; i < t; ++i) {
        out(i, i) = eval(points[i], points[i]);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = eval(points[i], points[j]);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

double matern_eigendecay_beta(double nu, int d) {
    if (!(nu >= 0.5)) throw ConfigError("matern eigendecay: nu must be >= 1/2");
    if (d < 1) throw ConfigError("matern eigendecay: dimension must be >= 1");
    return (2.0 * nu + d) / static_cast<double>(d);
}

}  // namespace kucb
