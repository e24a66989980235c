// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here; fixtures are deterministic.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "kucb/bandit.hpp"
#include "kucb/confidence.hpp"
#include "kucb/csv.hpp"
#include "kucb/experiments.hpp"
#include "kucb/infogain.hpp"
#include "kucb/parallel.hpp"
#include "kucb/rng.hpp"
#include "oracles.hpp"

using namespace kucb;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %02d %-34s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Point> unit_grid(int n) {
    std::vector<Point> g;
    for (int i = 0; i < n; ++i) g.push_back(point1d(n == 1 ? 0.0 : i / (n - 1.0)));
    return g;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Criteria 1 + 2: dual/primal statistic identity and Fredholm determinants
// on 500 random finite-rank instances.
void gram_feature_identities() {
    const auto start = std::chrono::steady_clock::now();
    const int instances = 500;
    const std::vector<double> rhos{0.5, 1.0, 4.0};
    std::vector<double> stat_err(instances), det_err(instances);
    parallel_for(instances, [&](std::size_t i) {
        Rng rng(child_seed(10, i));
        const int rank = 1 + static_cast<int>(rng.below(8));
        const double beta = 1.2 + 1.8 * rng.uniform01();
        const double c = 0.5 + 1.5 * rng.uniform01();
        const Kernel kernel = Kernel::mercer_synthetic(rank, c, beta);
        const int t = 1 + static_cast<int>(rng.below(30));
        const double rho = rhos[i % rhos.size()];
        std::vector<Point> pts(t);
        Eigen::VectorXd eps(t);
        Eigen::MatrixXd design(t, rank);
        for (int s = 0; s < t; ++s) {
            pts[s] = point1d(rng.uniform01());
            eps[s] = rng.gaussian();
            design.row(s) = kernel.feature_map().embed(pts[s]).transpose();
        }
        const Eigen::MatrixXd gram = kernel.gram(pts);
        const double dual = selfnorm_stat_gram(gram, eps, rho);
        const double primal = oracles::primal_stat(design, eps, rho);
        stat_err[i] = std::abs(dual - primal) / std::max(1e-30, std::abs(primal));
        const double logdet_t = oracles::logdet_eig(
            Eigen::MatrixXd(Eigen::MatrixXd::Identity(t, t) + gram / rho));
        const double logdet_r = oracles::logdet_eig(Eigen::MatrixXd(
            Eigen::MatrixXd::Identity(rank, rank) + design.transpose() * design / rho));
        det_err[i] = std::abs(logdet_t - logdet_r) / std::max(1.0, std::abs(logdet_t));
    });
    double max_stat = 0.0, max_det = 0.0;
    for (int i = 0; i < instances; ++i) {
        max_stat = std::max(max_stat, stat_err[i]);
        max_det = std::max(max_det, det_err[i]);
    }
    const double elapsed = seconds_since(start);
    report(1, "gram_feature_stat_identity", max_stat <= 1e-7 && elapsed < 5.0,
           fmt("max_rel=%.3g tol=1e-7 time=%.2fs", max_stat, elapsed));
    report(2, "fredholm_determinant_equality", max_det <= 1e-8,
           fmt("max_err=%.3g tol=1e-8", max_det));
}

// Criterion 3: elliptical potential identity and width-sum bound.
void elliptical_potential() {
    const auto start = std::chrono::steady_clock::now();
    const Kernel kernel = Kernel::mercer_synthetic(6, 1.0, 2.0);
    const auto grid = unit_grid(24);
    const double rho = 4.0;  // >= max(1, L), L ~ 2.98
    const int trajectories = 100, horizon = 100;
    std::vector<double> identity_err(trajectories), excess(trajectories);
    parallel_for(trajectories, [&](std::size_t i) {
        Rng rng(child_seed(13, i));
        GridPosterior posterior(kernel, grid, rho, /*track_responses=*/false);
        std::vector<double> widths;
        for (int t = 0; t < horizon; ++t) {
            const int index = static_cast<int>(rng.below(grid.size()));
            widths.push_back(posterior.width_at(index));
            posterior.observe(index, 0.0);
        }
        const PotentialAudit audit = elliptical_potential_audit(posterior.state(), widths);
        identity_err[i] = std::abs(audit.log_product - audit.logdet);
        excess[i] = audit.sum_sq - 2.0 * audit.logdet;
    });
    double max_err = 0.0, max_excess = -1e300;
    for (int i = 0; i < trajectories; ++i) {
        max_err = std::max(max_err, identity_err[i]);
        max_excess = std::max(max_excess, excess[i]);
    }
    const double elapsed = seconds_since(start);
    report(3, "elliptical_potential", max_err <= 1e-6 && max_excess <= 0.0 && elapsed < 30.0,
           fmt("identity=%.3g sum_excess=%.3g time=%.1fs", max_err, max_excess, elapsed));
}

// Criteria 4 + 5: time-uniform crossing rates and winsorized supermartingale
// means over the same 5000-trajectory batches.
void ville_and_decay() {
    const auto start = std::chrono::steady_clock::now();
    const int seeds = 5000, horizon = 200;
    const std::vector<double> deltas{0.01, 0.05, 0.1};
    TrajectoryConfig base;
    base.kernel = Kernel::mercer_synthetic(6, 1.0, 2.0);
    base.grid = unit_grid(24);
    base.rho = 8.0;
    base.sigma = 1.0;
    base.design = DesignRule::kWidthGreedy;
    base.horizon = horizon;

    bool coverage_ok = true, decay_ok = true;
    std::string coverage_detail, decay_detail;
    for (NoiseKind kind : {NoiseKind::kGaussian, NoiseKind::kRademacher}) {
        std::vector<std::vector<char>> crossed(seeds);
        std::vector<std::vector<double>> winsorized(seeds);
        parallel_for(seeds, [&](std::size_t i) {
            TrajectoryConfig config = base;
            config.noise = kind;
            config.seed = child_seed(2, i);
            const MixtureTrajectory traj = mixture_trajectory(config);
            std::vector<char> flags(deltas.size());
            for (std::size_t d = 0; d < deltas.size(); ++d) flags[d] = traj.crosses(deltas[d]);
            crossed[i] = std::move(flags);
            std::vector<double> w(horizon + 1);
            const double log_cap = std::log(1000.0);
            for (int t = 0; t <= horizon; ++t) w[t] = std::exp(std::min(traj.log_m[t], log_cap));
            winsorized[i] = std::move(w);
        });
        const char* kind_name = kind == NoiseKind::kGaussian ? "gauss" : "rade";
        for (std::size_t d = 0; d < deltas.size(); ++d) {
            int count = 0;
            for (int i = 0; i < seeds; ++i) count += crossed[i][d];
            const double rate = static_cast<double>(count) / seeds;
            const double bound =
                deltas[d] + 3.0 * std::sqrt(deltas[d] * (1.0 - deltas[d]) / seeds);
            if (rate > bound) coverage_ok = false;
            coverage_detail +=
                std::string(kind_name) + fmt(":%.2f=%.4f<=%.4f ", deltas[d], rate, bound);
        }
        double worst_mean = 0.0;
        for (int t = 0; t <= horizon; ++t) {
            double mean = 0.0;
            for (int i = 0; i < seeds; ++i) mean += winsorized[i][t];
            worst_mean = std::max(worst_mean, mean / seeds);
        }
        if (worst_mean > 1.05) decay_ok = false;
        decay_detail += fmt("max_mean=%.4f ", worst_mean);
    }
    const double elapsed = seconds_since(start);
    report(4, "ville_coverage", coverage_ok && elapsed < 300.0,
           coverage_detail + fmt("time=%.0fs", elapsed));
    report(5, "supermartingale_decay", decay_ok, decay_detail + "(limit 1.05)");
}

// Criterion 6: truncation convergence on rank-6 fixtures across 50 seeds.
void truncation_convergence() {
    const int seeds = 50, rank = 6;
    TrajectoryConfig base;
    base.kernel = Kernel::mercer_synthetic(rank, 1.0, 2.0);
    base.grid = unit_grid(16);
    base.rho = 1.0;
    base.sigma = 1.0;
    base.design = DesignRule::kWidthGreedy;
    base.horizon = 60;
    std::vector<std::vector<double>> gaps(seeds);
    parallel_for(seeds, [&](std::size_t i) {
        TrajectoryConfig config = base;
        config.seed = child_seed(909, i);
        const MixtureTrajectory full = mixture_trajectory(config);
        std::vector<double> g(rank);
        for (int n = 1; n <= rank; ++n) {
            g[n - 1] = std::abs(truncated_mixture(config, n).log_m.back() - full.log_m.back());
        }
        gaps[i] = std::move(g);
    });
    std::vector<double> mean_gap(rank, 0.0);
    double worst_terminal = 0.0;
    for (int i = 0; i < seeds; ++i) {
        for (int n = 0; n < rank; ++n) mean_gap[n] += gaps[i][n] / seeds;
        worst_terminal = std::max(worst_terminal, gaps[i][rank - 1]);
    }
    double worst_increase = -1e300;
    for (int n = 1; n < rank; ++n) {
        worst_increase = std::max(worst_increase, mean_gap[n] - mean_gap[n - 1]);
    }
    report(6, "truncation_convergence",
           worst_increase <= 1e-9 && worst_terminal <= 1e-9,
           fmt("mean-gap increase=%.3g terminal=%.3g tol=1e-9", worst_increase, worst_terminal));
}

EpisodeConfig coverage_episode(const Kernel& kernel, const std::vector<Point>& grid, double rho,
                               double sigma, double delta, int horizon, std::uint64_t seed) {
    TargetFunction f;
    f.centers = {grid[5], grid[12]};
    f.coefficients.resize(2);
    f.coefficients << 0.8, -0.5;
    EpisodeConfig config;
    config.env = Environment::make(kernel, f, grid, sigma, NoiseKind::kGaussian, seed);
    config.rho = rho;
    config.delta = delta;
    config.horizon = horizon;
    config.audit_coverage = true;
    return config;
}

// Criterion 7: confidence-set coverage along GP-UCB runs.
void ellipsoid_coverage() {
    const Kernel kernel = Kernel::mercer_synthetic(5, 1.0, 2.0);
    const auto grid = unit_grid(17);
    const int seeds = 1000;
    std::vector<char> violated(seeds);
    parallel_for(seeds, [&](std::size_t i) {
        const EpisodeConfig config =
            coverage_episode(kernel, grid, 2.0, 0.7, 0.05, 100, child_seed(4242, i));
        violated[i] = !*run_episode(config).covered;
    });
    int count = 0;
    for (int i = 0; i < seeds; ++i) count += violated[i];
    const double rate = static_cast<double>(count) / seeds;
    const double bound = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / seeds);
    report(7, "confidence_set_coverage", rate <= bound,
           fmt("violation_rate=%.4f bound=%.4f", rate, bound));
}

// Criterion 8: per-round optimism and the aggregate regret bound on covered
// runs with rho >= max(1, L).
void optimism_chain() {
    const Kernel kernel = Kernel::mercer_synthetic(5, 1.0, 2.0);
    const auto grid = unit_grid(17);
    const double rho = 3.0;  // L ~ 2.93
    const int seeds = 50, horizon = 100;
    bool per_round_ok = true, aggregate_ok = true;
    int covered = 0;
    double worst_slack = -1e300;
    for (int i = 0; i < seeds; ++i) {
        const EpisodeConfig config =
            coverage_episode(kernel, grid, rho, 0.5, 0.05, horizon, child_seed(606, i));
        const EpisodeResult result = run_episode(config);
        if (!*result.covered) continue;
        ++covered;
        for (const auto& row : result.rows) {
            const double slack = row.instant - 2.0 * row.radius * row.width;
            worst_slack = std::max(worst_slack, slack);
            if (slack > 1e-9) per_round_ok = false;
        }
        const double logdet = result.rows.back().logdet;
        if (result.final_regret >
            result.final_radius * std::sqrt(2.0 * horizon * logdet) + 1e-6) {
            aggregate_ok = false;
        }
    }
    report(8, "per_round_optimism_chain",
           per_round_ok && aggregate_ok && covered >= 45,
           fmt("covered=%g/50 worst_round_slack=%.3g", covered, worst_slack));
}

// Criterion 9: greedy information gain under the eigendecay bound plus the
// closed-form spot value.
void infogain_sandwich() {
    bool sandwich_ok = true;
    double worst_gap = -1e300;
    for (double beta : {1.5, 2.0, 3.0}) {
        const Kernel kernel = Kernel::mercer_synthetic(8, 1.0, beta);
        for (double rho : {1.0, rho_schedule(200, beta)}) {
            const InfoGainCurve curve = greedy_infogain(kernel, unit_grid(64), rho, 200);
            for (int t = 1; t <= 200; ++t) {
                worst_gap = std::max(worst_gap, curve.gamma_hat[t] - curve.gamma_bound[t]);
                if (curve.gamma_hat[t] > curve.gamma_bound[t]) sandwich_ok = false;
            }
        }
    }
    const double spot = vakili_bound(100, 1.0, 1.0, 1.0, 1.0, 2.0);
    const bool spot_ok = std::abs(spot - 26.098) <= 1e-3;
    report(9, "infogain_sandwich", sandwich_ok && spot_ok,
           fmt("worst_gap=%.3g spot=%.5f (26.098+-0.001)", worst_gap, spot));
}

// Criterion 10: schedule fixed-point algebra and bound scaling exponents.
void schedule_algebra() {
    bool ok = true;
    std::string detail;
    const std::vector<double> horizons{1e3, 3.162e3, 1e4, 3.162e4, 1e5, 3.162e5, 1e6};
    for (double beta : {2.0, 3.0}) {
        const ScheduleCheck check = schedule_consistency_check(beta, horizons);
        const double target = check.target_exponent;
        if (check.max_fixed_point_error > 1e-9) ok = false;
        if (std::abs(check.slope_sqrt_rho_gamma_t - target) > 0.1) ok = false;
        if (std::abs(check.slope_gamma_sqrt_t - target) > 0.1) ok = false;
        detail += fmt("b=%g slope=%.3f target=%.3f ", beta, check.slope_sqrt_rho_gamma_t, target);
    }
    report(10, "schedule_algebra", ok, detail + "(tol 0.1)");
}

// Criterion 11: radius monotonicity in rho / eta and the coincidence point.
void radius_monotonicity() {
    const Kernel kernel = Kernel::squared_exponential(0.35);
    const auto grid = unit_grid(25);
    std::vector<Point> pts;
    for (int s = 0; s < 12; ++s) pts.push_back(grid[(s * grid.size()) / 12]);
    Rng rng(child_seed(5, 0));
    Eigen::VectorXd eps(12);
    for (int s = 0; s < 12; ++s) eps[s] = rng.gaussian();
    const Eigen::MatrixXd gram = kernel.gram(pts);

    bool rho_mono = true, eta_mono = true;
    double coincidence = 0.0;
    for (int t = 1; t <= 12; ++t) {
        const Eigen::MatrixXd k_t = gram.topLeftCorner(t, t);
        const Eigen::VectorXd e_t = eps.head(t);
        double prev = 1e300;
        for (double rho : {1.0, 2.0, 4.0, 8.0}) {
            const double logdet = oracles::logdet_eig(
                Eigen::MatrixXd(Eigen::MatrixXd::Identity(t, t) + k_t / rho));
            const double radius = abbasi_noise_term(logdet, 1.0, 0.05);
            if (!(radius < prev)) rho_mono = false;
            prev = radius;
        }
        prev = -1e300;
        for (double eta : {1e-10, 0.5, 1.0}) {
            RadiusSpec spec;
            spec.rule = RadiusSpec::Rule::kChowdhury;
            spec.eta = eta;
            spec.sigma = 1.0;
            spec.delta = 0.05;
            const double radius = chowdhury_radius(k_t, spec);
            if (!(radius > prev)) eta_mono = false;
            prev = radius;
        }
        coincidence = std::max(coincidence,
                               std::abs(selfnorm_stat_gram(k_t, e_t, 1.0) -
                                        selfnorm_stat_chowdhury(k_t, e_t, 1e-10)));
    }
    report(11, "radius_monotonicity_coincidence",
           rho_mono && eta_mono && coincidence <= 1e-6,
           fmt("coincidence=%.3g tol=1e-6", coincidence));
}

// Criterion 12: regret sublinearity at desk scale with the tuned schedule.
void regret_sublinearity() {
    const auto start = std::chrono::steady_clock::now();
    const Kernel kernel = Kernel::mercer_synthetic(6, 1.0, 2.0);
    const auto grid = unit_grid(33);
    TargetFunction f;
    f.centers = {grid[8], grid[24]};
    f.coefficients.resize(2);
    f.coefficients << 1.0, 0.6;
    const std::vector<int> horizons{250, 500, 1000, 2000};
    const int seeds = 20;
    std::vector<double> horizons_d, medians;
    for (int horizon : horizons) {
        const double rho = rho_schedule(horizon, 2.0);
        std::vector<double> finals(seeds);
        parallel_for(seeds, [&](std::size_t i) {
            EpisodeConfig config;
            config.env = Environment::make(kernel, f, grid, 0.5, NoiseKind::kGaussian,
                                           child_seed(7, i));
            config.rho = rho;
            config.delta = 0.05;
            config.horizon = horizon;
            finals[i] = run_episode(config).final_regret;
        });
        horizons_d.push_back(horizon);
        medians.push_back(median_of(finals));
    }
    const double slope = loglog_slope(horizons_d, medians);
    bool ratio_decreasing = true;
    for (std::size_t i = 1; i < medians.size(); ++i) {
        if (!(medians[i] / horizons_d[i] < medians[i - 1] / horizons_d[i - 1])) {
            ratio_decreasing = false;
        }
    }
    const double elapsed = seconds_since(start);
    report(12, "regret_sublinearity",
           slope < 1.0 && ratio_decreasing && elapsed < 600.0,
           fmt("slope=%.3f medians_ratio_decreasing=%g time=%.0fs", slope,
               ratio_decreasing ? 1.0 : 0.0, elapsed));
}

// Criterion 13: byte-for-byte artifact reproducibility.
void determinism() {
    namespace fs = std::filesystem;
    const std::string base = "acceptance_out";
    fs::remove_all(base);
    auto ville = nlohmann::json::parse(R"({
      "kind": "ville_coverage",
      "kernel": {"family": "mercer", "rank": 4, "decay_c": 1.0, "decay_beta": 2.0},
      "grid": {"low": 0.0, "high": 1.0, "count": 10},
      "rho": {"policy": "fixed", "value": 4.0},
      "sigma": 1.0,
      "deltas": [0.05, 0.1],
      "noise": "both",
      "design": "width_greedy",
      "horizon": 40,
      "seeds": {"count": 200, "master": 2},
      "tolerances": {"slack_sigmas": 3.0}
    })");
    auto regret = nlohmann::json::parse(R"({
      "kind": "regret_scaling",
      "kernel": {"family": "mercer", "rank": 5, "decay_c": 1.0, "decay_beta": 2.0},
      "grid": {"low": 0.0, "high": 1.0, "count": 17},
      "rho": {"policy": "schedule", "beta": 2.0, "scale": 1.0},
      "sigma": 0.5,
      "delta": 0.05,
      "noise": "gaussian",
      "horizons": [40, 80],
      "seeds": {"count": 5, "master": 7},
      "target": {"center_indices": [4, 12], "coefficients": [1.0, 0.6]},
      "tolerances": {"max_slope": 1.0}
    })");
    bool ok = true;
    std::string detail;
    int artifact_count = 0;
    for (const auto& j : {ville, regret}) {
        const ExperimentConfig config = ExperimentConfig::from_json(j);
        const SuiteReport a = run_suite(config, base + "/a");
        run_suite(config, base + "/b");
        for (const auto& artifact : a.artifacts) {
            ++artifact_count;
            if (read_text_file(base + "/a/" + artifact) !=
                read_text_file(base + "/b/" + artifact)) {
                ok = false;
                detail += artifact + " differs; ";
            }
        }
    }
    report(13, "determinism", ok,
           detail.empty() ? fmt("%g artifacts byte-identical", artifact_count) : detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    gram_feature_identities();
    elliptical_potential();
    ville_and_decay();
    truncation_convergence();
    ellipsoid_coverage();
    optimism_chain();
    infogain_sandwich();
    schedule_algebra();
    radius_monotonicity();
    regret_sublinearity();
    determinism();
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "SUCCESS" : "FAILURE", failures);
    return failures == 0 ? 0 : 1;
}
