#include "kucb/confidence.hpp"

#include <cmath>
#include <string>

#include "kucb/errors.hpp"
#include "kucb/rng.hpp"

namespace kucb {

void RadiusSpec::validate() const {
    if (!(sigma >= 0.0)) throw ConfigError("radius spec: sigma must be nonnegative");
    if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("radius spec: delta must lie in (0,1)");
    if (!(norm_bound >= 0.0)) throw ConfigError("radius spec: norm bound must be nonnegative");
    if (rule == Rule::kAbbasiHilbert && !(rho > 0.0)) {
        throw ConfigError("radius spec: rho must be positive");
    }
    if (rule == Rule::kChowdhury && !(eta >= 0.0)) {
        throw ConfigError("radius spec: eta must be nonnegative");
    }
}

double abbasi_noise_term(double logdet_gram, double sigma, double delta) {
    return sigma * std::sqrt(2.0 * (0.5 * logdet_gram + std::log(1.0 / delta)));
}

double abbasi_radius(double logdet_gram, const RadiusSpec& spec) {
    spec.validate();
    if (logdet_gram < 0.0) throw InputError("abbasi radius: negative log-determinant");
    return abbasi_noise_term(logdet_gram, spec.sigma, spec.delta) +
           std::sqrt(spec.rho) * spec.norm_bound;
}

double chowdhury_radius(const Eigen::MatrixXd& gram, const RadiusSpec& spec) {
    spec.validate();
    const Eigen::Index t = gram.rows();
    Eigen::MatrixXd shifted = gram;
    shifted.diagonal().array() += 1.0 + spec.eta;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (t > 0 && llt.info() != Eigen::Success) {
        throw NumericalError("chowdhury radius: factorization of (1+eta)I + K failed");
    }
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < t; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return spec.sigma * std::sqrt(2.0 * (0.5 * logdet + std::log(1.0 / spec.delta)));
}

double selfnorm_stat_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& eps, double rho) {
    if (gram.rows() != gram.cols() || gram.rows() != eps.size()) {
        throw InputError("selfnorm stat: dimension mismatch");
    }
    if (!(rho > 0.0)) throw ConfigError("selfnorm stat: rho must be positive");
    if (eps.size() == 0) return 0.0;
    // eps'(rho^{-1}K)(I + rho^{-1}K)^{-1} eps = |eps|^2 - rho * eps'(K + rho I)^{-1} eps,
    // which never inverts K alone.
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += rho;
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("selfnorm stat: factorization of K + rho I failed");
    }
    const Eigen::VectorXd half = llt.matrixL().solve(eps);
    const double sq = eps.squaredNorm() - rho * half.squaredNorm();
    if (sq < -1e-9) {
        throw NumericalError("selfnorm stat: quadratic form " + std::to_string(sq) +
                             " negative beyond tolerance");
    }
    return std::sqrt(std::max(0.0, sq));
}

double selfnorm_stat_chowdhury(const Eigen::MatrixXd& gram, const Eigen::VectorXd& eps,
                               double eta) {
    if (gram.rows() != gram.cols() || gram.rows() != eps.size()) {
        throw InputError("selfnorm stat: dimension mismatch");
    }
    if (!(eta >= 0.0)) throw ConfigError("selfnorm stat: eta must be nonnegative");
    if (eps.size() == 0) return 0.0;
    // The statistic is defined through (K + eta I)^{-1}; demand invertibility
    // before switching to the equivalent stable form
    // |eps|^2 - eps'((1+eta)I + K)^{-1} eps.
    Eigen::MatrixXd inner = gram;
    inner.diagonal().array() += eta;
    Eigen::LLT<Eigen::MatrixXd> inner_llt(inner);
    if (inner_llt.info() != Eigen::Success) {
        throw NumericalError("selfnorm stat: K + eta I is singular");
    }
    Eigen::MatrixXd outer = gram;
    outer.diagonal().array() += 1.0 + eta;
    Eigen::LLT<Eigen::MatrixXd> outer_llt(outer);
    if (outer_llt.info() != Eigen::Success) {
        throw NumericalError("selfnorm stat: factorization of (1+eta)I + K failed");
    }
    const Eigen::VectorXd half = outer_llt.matrixL().solve(eps);
    const double sq = eps.squaredNorm() - half.squaredNorm();
    if (sq < -1e-9) {
        throw NumericalError("selfnorm stat: quadratic form negative beyond tolerance");
    }
    return std::sqrt(std::max(0.0, sq));
}

bool MixtureTrajectory::crosses(double delta) const {
    const double threshold = std::log(1.0 / delta);
    for (double v : log_m) {
        if (v >= threshold) return true;
    }
    return false;
}

namespace {

struct SimulatedDesign {
    std::vector<int> action;  // grid indices, length T
    std::vector<double> eps;  // noise, length T
};

// Draws the (predictable) action sequence and the noise sequence. The two
// streams are independent; the design never sees the current round's noise.
SimulatedDesign simulate_design(const TrajectoryConfig& config) {
    if (config.horizon < 0) throw InputError("trajectory: negative horizon");
    if (config.grid.empty()) throw ConfigError("trajectory: empty candidate grid");
    if (!(config.sigma > 0.0)) throw ConfigError("trajectory: sigma must be positive");
    Rng noise_rng(child_seed(config.seed, 1));
    Rng design_rng(child_seed(config.seed, 2));
    GridPosterior grid_state(config.kernel, config.grid, config.rho, /*track_responses=*/false);
    SimulatedDesign out;
    out.action.reserve(config.horizon);
    out.eps.reserve(config.horizon);
    for (int t = 1; t <= config.horizon; ++t) {
        int index = 0;
        switch (config.design) {
            case DesignRule::kFixedSweep:
                index = (t - 1) % grid_state.grid_size();
                break;
            case DesignRule::kUniformRandom:
                index = static_cast<int>(design_rng.below(grid_state.grid_size()));
                break;
            case DesignRule::kWidthGreedy:
                index = grid_state.argmax_width();
                break;
        }
        const double eps = config.noise == NoiseKind::kGaussian
                               ? config.sigma * noise_rng.gaussian()
                               : config.sigma * noise_rng.rademacher();
        out.action.push_back(index);
        out.eps.push_back(eps);
        grid_state.observe(index, 0.0);
    }
    return out;
}

}  // namespace

MixtureTrajectory mixture_trajectory(const TrajectoryConfig& config) {
    const SimulatedDesign design = simulate_design(config);
    const int horizon = config.horizon;
    MixtureTrajectory out;
    out.logdet.assign(horizon + 1, 0.0);
    out.stat.assign(horizon + 1, 0.0);
    out.log_m.assign(horizon + 1, 0.0);
    out.action = design.action;
    out.eps = design.eps;

    GridPosterior grid_state(config.kernel, config.grid, config.rho, /*track_responses=*/false);
    // v = L^{-1} eps_{1:t}, extended one entry per round alongside the factor.
    Eigen::VectorXd v(horizon);
    double eps_sq = 0.0;
    const double sigma_sq = config.sigma * config.sigma;
    for (int t = 1; t <= horizon; ++t) {
        grid_state.observe(design.action[t - 1], 0.0);
        const auto chol = grid_state.state().chol();
        const double pivot = chol(t - 1, t - 1);
        double dot = 0.0;
        for (int s = 0; s < t - 1; ++s) dot += chol(t - 1, s) * v[s];
        v[t - 1] = (design.eps[t - 1] - dot) / pivot;
        eps_sq += design.eps[t - 1] * design.eps[t - 1];
        const double stat_sq =
            std::max(0.0, eps_sq - config.rho * v.head(t).squaredNorm());
        out.logdet[t] = grid_state.state().logdet_gram();
        out.stat[t] = std::sqrt(stat_sq);
        out.log_m[t] = stat_sq / (2.0 * sigma_sq) - 0.5 * out.logdet[t];
    }
    return out;
}

MixtureTrajectory truncated_mixture(const TrajectoryConfig& config, int projection_dim) {
    if (projection_dim < 1) throw InputError("truncated mixture: projection dimension must be >= 1");
    const FeatureMap& fm = config.kernel.feature_map();
    const int n = std::min(projection_dim, fm.rank());

    const SimulatedDesign design = simulate_design(config);
    const int horizon = config.horizon;
    MixtureTrajectory out;
    out.logdet.assign(horizon + 1, 0.0);
    out.stat.assign(horizon + 1, 0.0);
    out.log_m.assign(horizon + 1, 0.0);
    out.action = design.action;
    out.eps = design.eps;

    std::vector<Eigen::VectorXd> embedded(config.grid.size());
    for (std::size_t i = 0; i < config.grid.size(); ++i) {
        embedded[i] = fm.embed(config.grid[i]).head(n);
    }
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);  // projected covariance operator
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);     // projected noise-weighted sum
    const double sigma_sq = config.sigma * config.sigma;
    for (int t = 1; t <= horizon; ++t) {
        const Eigen::VectorXd& phi = embedded[design.action[t - 1]];
        v.noalias() += phi * phi.transpose();
        s.noalias() += design.eps[t - 1] * phi;
        Eigen::MatrixXd reg = v;
        reg.diagonal().array() += config.rho;
        Eigen::LLT<Eigen::MatrixXd> llt(reg);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("truncated mixture: factorization failed");
        }
        const Eigen::VectorXd half = llt.matrixL().solve(s);
        double logdet = 0.0;
        for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
        logdet -= n * std::log(config.rho);  // det(I + rho^{-1} pi V pi)
        const double stat_sq = half.squaredNorm();
        out.logdet[t] = logdet;
        out.stat[t] = std::sqrt(stat_sq);
        out.log_m[t] = stat_sq / (2.0 * sigma_sq) - 0.5 * logdet;
    }
    return out;
}

double ellipsoid_distance_sq(const PosteriorState& state, const std::vector<Point>& centers,
                             const Eigen::VectorXd& coefficients) {
    if (static_cast<Eigen::Index>(centers.size()) != coefficients.size()) {
        throw InputError("ellipsoid: centers and coefficients disagree in length");
    }
    const FeatureMap& fm = state.kernel().feature_map();
    const int r = fm.rank();
    const int t = state.count();
    Eigen::MatrixXd design(t, r);
    for (int s = 0; s < t; ++s) design.row(s) = fm.embed(state.points()[s]).transpose();
    Eigen::VectorXd theta_star = Eigen::VectorXd::Zero(r);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        theta_star += coefficients[static_cast<Eigen::Index>(i)] * fm.embed(centers[i]);
    }
    Eigen::MatrixXd w = design.transpose() * design;
    w.diagonal().array() += state.rho();
    Eigen::VectorXd theta;
    if (t == 0) {
        theta = Eigen::VectorXd::Zero(r);
    } else {
        theta = w.llt().solve(design.transpose() * Eigen::VectorXd(state.responses()));
    }
    const Eigen::VectorXd diff = theta - theta_star;
    return diff.dot(w * diff);
}

bool ellipsoid_contains(const PosteriorState& state, const std::vector<Point>& centers,
                        const Eigen::VectorXd& coefficients, double radius) {
    return ellipsoid_distance_sq(state, centers, coefficients) <= radius * radius;
}

}  // namespace kucb
