#include "kucb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "kucb/csv.hpp"
#include "kucb/errors.hpp"
#include "kucb/infogain.hpp"
#include "kucb/parallel.hpp"
#include "kucb/rng.hpp"

namespace kucb {

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "kucb 0.1.0";

double median_of(std::vector<double> values) {
    if (values.empty()) throw InputError("median of empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double binomial_bound(double delta, int n, double sigmas) {
    return delta + sigmas * std::sqrt(delta * (1.0 - delta) / static_cast<double>(n));
}

TrajectoryConfig trajectory_config(const ExperimentConfig& config, const Kernel& kernel,
                                   const std::vector<Point>& grid, double rho, NoiseKind noise,
                                   std::uint64_t seed) {
    TrajectoryConfig t;
    t.kernel = kernel;
    t.grid = grid;
    t.rho = rho;
    t.sigma = config.sigma;
    t.design = config.design;
    t.noise = noise;
    t.horizon = config.horizon;
    t.seed = seed;
    return t;
}

// Trajectory dump with both radius families alongside the statistic. The
// comparison radius needs log det((1+eta)I + K_t), maintained by a second
// incremental factorization at regularization 1 + eta.
void write_trajectory_csv(const std::string& path, const MixtureTrajectory& traj,
                          const Kernel& kernel, const std::vector<Point>& grid, double sigma,
                          double delta, double eta) {
    CsvTable table;
    table.header = {"t", "logdet", "stat", "logM", "radius_abbasi", "radius_chowdhury"};
    GridPosterior chow(kernel, grid, 1.0 + eta, /*track_responses=*/false);
    const int horizon = traj.horizon();
    for (int t = 0; t <= horizon; ++t) {
        if (t >= 1) chow.observe(traj.action[t - 1], 0.0);
        const double chow_logdet = chow.state().logdet_regularized();
        table.rows.push_back({format_double(t), format_double(traj.logdet[t]),
                              format_double(traj.stat[t]), format_double(traj.log_m[t]),
                              format_double(abbasi_noise_term(traj.logdet[t], sigma, delta)),
                              format_double(sigma * std::sqrt(2.0 * (0.5 * chow_logdet +
                                                                     std::log(1.0 / delta))))});
    }
    write_csv(path, table);
}

struct SuiteContext {
    const ExperimentConfig& config;
    std::string out_dir;
    SuiteReport report;

    std::string artifact_path(const std::string& name) {
        report.artifacts.push_back(name);
        return out_dir + "/" + name;
    }
    void criterion(const std::string& name, bool pass, double value, double threshold,
                   std::string detail = "") {
        report.criteria.push_back({name, pass, value, threshold, std::move(detail)});
    }
};

void run_ville_coverage(SuiteContext& ctx) {
    const ExperimentConfig& config = ctx.config;
    const Kernel kernel = config.kernel.build();
    const std::vector<Point> grid = config.grid.build();
    const double rho = config.rho.resolve(config.horizon);
    const double slack_sigmas = config.tolerance("slack_sigmas");
    const std::vector<NoiseKind> kinds =
        config.both_noise_kinds ? std::vector<NoiseKind>{NoiseKind::kGaussian, NoiseKind::kRademacher}
                                : std::vector<NoiseKind>{config.noise};

    CsvTable summary;
    summary.header = {"noise", "delta", "crossings", "trajectories", "rate", "bound"};
    for (NoiseKind kind : kinds) {
        const int n = config.seeds.count;
        std::vector<std::vector<char>> crossed(n);
        parallel_for(n, [&](std::size_t i) {
            const MixtureTrajectory traj = mixture_trajectory(trajectory_config(
                config, kernel, grid, rho, kind, child_seed(config.seeds.master, i)));
            std::vector<char> flags(config.deltas.size());
            for (std::size_t d = 0; d < config.deltas.size(); ++d) {
                flags[d] = traj.crosses(config.deltas[d]) ? 1 : 0;
            }
            crossed[i] = std::move(flags);
        });
        const std::string kind_name = kind == NoiseKind::kGaussian ? "gaussian" : "rademacher";
        for (std::size_t d = 0; d < config.deltas.size(); ++d) {
            int count = 0;
            for (int i = 0; i < n; ++i) count += crossed[i][d];
            const double rate = static_cast<double>(count) / n;
            const double bound = binomial_bound(config.deltas[d], n, slack_sigmas);
            ctx.criterion("crossing_rate_" + kind_name + "_delta_" + format_double(config.deltas[d]),
                          rate <= bound, rate, bound);
            summary.rows.push_back({kind_name, format_double(config.deltas[d]),
                                    format_double(count), format_double(n), format_double(rate),
                                    format_double(bound)});
        }
    }
    write_csv(ctx.artifact_path(config.output_prefix + "_coverage.csv"), summary);
    // One sample path for inspection.
    const MixtureTrajectory sample = mixture_trajectory(trajectory_config(
        config, kernel, grid, rho, kinds.front(), child_seed(config.seeds.master, 0)));
    write_trajectory_csv(ctx.artifact_path(config.output_prefix + "_trajectory.csv"), sample,
                         kernel, grid, config.sigma, config.delta, 0.0);
}

void run_supermartingale_decay(SuiteContext& ctx) {
    const ExperimentConfig& config = ctx.config;
    const Kernel kernel = config.kernel.build();
    const std::vector<Point> grid = config.grid.build();
    const double rho = config.rho.resolve(config.horizon);
    const double cap = config.tolerance("winsorize_cap");
    const double mean_limit = config.tolerance("mean_limit");
    const std::vector<NoiseKind> kinds =
        config.both_noise_kinds ? std::vector<NoiseKind>{NoiseKind::kGaussian, NoiseKind::kRademacher}
                                : std::vector<NoiseKind>{config.noise};

    CsvTable curve;
    curve.header = {"t"};
    std::vector<std::vector<double>> mean_by_kind;
    for (NoiseKind kind : kinds) {
        const int n = config.seeds.count;
        std::vector<std::vector<double>> winsorized(n);
        parallel_for(n, [&](std::size_t i) {
            const MixtureTrajectory traj = mixture_trajectory(trajectory_config(
                config, kernel, grid, rho, kind, child_seed(config.seeds.master, i)));
            std::vector<double> w(traj.log_m.size());
            const double log_cap = std::log(cap);
            for (std::size_t t = 0; t < traj.log_m.size(); ++t) {
                w[t] = std::exp(std::min(traj.log_m[t], log_cap));
            }
            winsorized[i] = std::move(w);
        });
        std::vector<double> mean(config.horizon + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int t = 0; t <= config.horizon; ++t) mean[t] += winsorized[i][t];
        }
        double worst = 0.0;
        for (int t = 0; t <= config.horizon; ++t) {
            mean[t] /= n;
            worst = std::max(worst, mean[t]);
        }
        const std::string kind_name = kind == NoiseKind::kGaussian ? "gaussian" : "rademacher";
        curve.header.push_back("mean_winsorized_" + kind_name);
        mean_by_kind.push_back(std::move(mean));
        ctx.criterion("winsorized_mean_max_" + kind_name, worst <= mean_limit, worst, mean_limit);
    }
    for (int t = 0; t <= config.horizon; ++t) {
        std::vector<std::string> row{format_double(t)};
        for (const auto& mean : mean_by_kind) row.push_back(format_double(mean[t]));
        curve.rows.push_back(std::move(row));
    }
    write_csv(ctx.artifact_path(config.output_prefix + "_decay.csv"), curve);
}

void run_gram_identity(SuiteContext& ctx) {
    const ExperimentConfig& config = ctx.config;
    const double stat_tol = config.tolerance("stat_rel_tol");
    const double logdet_tol = config.tolerance("logdet_tol");
    const int n = config.instances;
    std::vector<double> stat_err(n), det_err(n);
    parallel_for(n, [&](std::size_t i) {
        Rng rng(child_seed(config.seeds.master, i));
        const int rank = 1 + static_cast<int>(rng.below(config.max_rank));
        const double beta = 1.2 + 1.8 * rng.uniform01();
        const double c = 0.5 + 1.5 * rng.uniform01();
        const Kernel kernel = Kernel::mercer_synthetic(rank, c, beta);
        const int t = 1 + static_cast<int>(rng.below(config.max_t));
        const double rho = config.rho_values[i % config.rho_values.size()];
        std::vector<Point> points(t);
        Eigen::VectorXd eps(t);
        Eigen::MatrixXd design(t, rank);
        for (int s = 0; s < t; ++s) {
            points[s] = point1d(rng.uniform01());
            eps[s] = rng.gaussian();
            design.row(s) = kernel.feature_map().embed(points[s]).transpose();
        }
        const Eigen::MatrixXd gram = kernel.gram(points);
        const double stat_dual = selfnorm_stat_gram(gram, eps, rho);
        // Primal route: ||(rho I_r + E'E)^{-1/2} E' eps||.
        Eigen::MatrixXd w = design.transpose() * design;
        w.diagonal().array() += rho;
        Eigen::LLT<Eigen::MatrixXd> llt(w);
        const Eigen::VectorXd half = llt.matrixL().solve(design.transpose() * eps);
        const double stat_primal = half.norm();
        stat_err[i] = std::abs(stat_dual - stat_primal) / std::max(1e-30, std::abs(stat_primal));

        // Fredholm route: det(I_t + rho^{-1}K) vs det(I_r + rho^{-1}E'E).
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(t, t) + gram / rho;
        Eigen::MatrixXd b = Eigen::MatrixXd::Identity(rank, rank) +
                            (design.transpose() * design) / rho;
        const double logdet_t = std::log(a.llt().matrixL().determinant()) * 2.0;
        const double logdet_r = std::log(b.llt().matrixL().determinant()) * 2.0;
        det_err[i] = std::abs(logdet_t - logdet_r) / std::max(1.0, std::abs(logdet_t));
    });
    double max_stat = 0.0, max_det = 0.0;
    CsvTable table;
    table.header = {"instance", "stat_rel_err", "logdet_err"};
    for (int i = 0; i < n; ++i) {
        max_stat = std::max(max_stat, stat_err[i]);
        max_det = std::max(max_det, det_err[i]);
        table.rows.push_back(
            {format_double(i), format_double(stat_err[i]), format_double(det_err[i])});
    }
    ctx.criterion("gram_feature_stat_identity", max_stat <= stat_tol, max_stat, stat_tol);
    ctx.criterion("fredholm_determinant_identity", max_det <= logdet_tol, max_det, logdet_tol);
    write_csv(ctx.artifact_path(config.output_prefix + "_errors.csv"), table);
}

void run_truncation_convergence(SuiteContext& ctx) {
    const ExperimentConfig& config = ctx.config;
    const Kernel kernel = config.kernel.build();
    const std::vector<Point> grid = config.grid.build();
    const double rho = config.rho.resolve(config.horizon);
    const double slack = config.tolerance("monotone_slack");
    const double terminal_tol = config.tolerance("terminal_tol");
    const int rank = kernel.rank();
    std::vector<int> projections = config.projections;
    if (projections.empty()) {
        for (int p = 1; p <= rank; ++p) projections.push_back(p);
    }
    const int n = config.seeds.count;
    std::vector<std::vector<double>> gaps(n);
    parallel_for(n, [&](std::size_t i) {
        const TrajectoryConfig tc = trajectory_config(config, kernel, grid, rho, config.noise,
                                                      child_seed(config.seeds.master, i));
        const MixtureTrajectory full = mixture_trajectory(tc);
        const double full_logm = full.log_m.back();
        std::vector<double> g;
        g.reserve(projections.size());
        for (int p : projections) {
            const MixtureTrajectory truncated = truncated_mixture(tc, p);
            g.push_back(std::abs(truncated.log_m.back() - full_logm));
        }
        gaps[i] = std::move(g);
    });
    // Per path the gap is a difference of two monotone quantities and can
    // wiggle; the monotone statement holds for the seed-averaged curve.
    std::vector<double> mean_gap(projections.size(), 0.0);
    double worst_terminal = 0.0;
    CsvTable table;
    table.header = {"seed", "projection", "gap"};
    for (int i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < projections.size(); ++p) {
            mean_gap[p] += gaps[i][p] / n;
            table.rows.push_back({format_double(i), format_double(projections[p]),
                                  format_double(gaps[i][p])});
        }
        if (projections.back() >= rank) worst_terminal = std::max(worst_terminal, gaps[i].back());
    }
    double worst_monotone = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p + 1 < projections.size(); ++p) {
        worst_monotone = std::max(worst_monotone, mean_gap[p + 1] - mean_gap[p]);
    }
    ctx.criterion("mean_gap_nonincreasing_in_projection", worst_monotone <= slack, worst_monotone,
                  slack);
    ctx.criterion("gap_zero_at_full_rank", worst_terminal <= terminal_tol, worst_terminal,
                  terminal_tol);
    write_csv(ctx.artifact_path(config.output_prefix + "_gaps.csv"), table);
}

Environment build_environment(const ExperimentConfig& config, const Kernel& kernel,
                              const std::vector<Point>& grid, std::uint64_t seed) {
    TargetFunction f;
    f.coefficients.resize(static_cast<Eigen::Index>(config.target.coefficients.size()));
    for (std::size_t i = 0; i < config.target.coefficients.size(); ++i) {
        const int idx = config.target.center_indices[i];
        if (idx < 0 || idx >= static_cast<int>(grid.size())) {
            throw ConfigError("target: center index out of grid range");
        }
        f.centers.push_back(grid[idx]);
        f.coefficients[static_cast<Eigen::Index>(i)] = config.target.coefficients[i];
    }
    return Environment::make(kernel, std::move(f), grid, config.sigma, config.noise, seed,
                             config.target.norm_bound);
}

std::string format_point(const Point& p) {
    std::string out;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (i) out += ';';
        out += format_double(p[i]);
    }
    return out;
}

// Per-round record plus episode summary; the fixed schema other tools rely on.
void write_episode_artifacts(SuiteContext& ctx, const EpisodeConfig& episode_config,
                             const EpisodeResult& result) {
    CsvTable table;
    table.header = {"t", "x", "y", "r", "R", "U", "width", "logdet"};
    for (const auto& row : result.rows) {
        table.rows.push_back({format_double(row.t),
                              format_point(episode_config.env.grid[row.x_index]),
                              format_double(row.y), format_double(row.instant),
                              format_double(row.cumulative), format_double(row.radius),
                              format_double(row.width), format_double(row.logdet)});
    }
    write_csv(ctx.artifact_path("regret.csv"), table);
    json summary;
    summary["final_RT"] = result.final_regret;
    summary["final_radius"] = result.final_radius;
    summary["horizon"] = episode_config.horizon;
    summary["rho"] = episode_config.rho;
    if (result.covered.has_value()) {
        summary["covered"] = *result.covered;
        summary["first_violation"] = result.first_violation;
    }
    summary["audit"] = {{"log_product_minus_logdet", result.audit.log_product - result.audit.logdet},
                        {"sum_sq", result.audit.sum_sq},
                        {"logdet", result.audit.logdet}};
    write_text_file(ctx.out_dir + "/" + ctx.config.output_prefix + "_summary.json",
                    summary.dump(2) + "\n");
    ctx.report.artifacts.push_back(ctx.config.output_prefix + "_summary.json");
}

void run_regret_scaling(SuiteContext& ctx) {
    const ExperimentConfig& config = ctx.config;
    const Kernel kernel = config.kernel.build();
    const std::vector<Point> grid = config.grid.build();
    const double max_slope = config.tolerance("max_slope");

    std::vector<double> horizons_d;
    std::vector<double> medians;
    CsvTable table;
    table.header = {"T", "rho", "median_RT", "RT_over_T"};
    std::vector<std::vector<double>> regrets_by_horizon;
    for (int horizon : config.horizons) {
        const double rho = config.rho.resolve(horizon);
        const int n = config.seeds.count;
        std::vector<double> final_regret(n);
        parallel_for(n, [&](std::size_t i) {
            EpisodeConfig ec;
            ec.env = build_environment(config, kernel, grid, child_seed(config.seeds.master, i));
            ec.rho = rho;
            ec.delta = config.delta;
            ec.horizon = horizon;
            final_regret[i] = run_episode(ec).final_regret;
        });
        const double med = median_of(final_regret);
        horizons_d.push_back(horizon);
        medians.push_back(med);
        regrets_by_horizon.push_back(std::move(final_regret));
        table.rows.push_back({format_double(horizon), format_double(rho), format_double(med),
                              format_double(med / horizon)});
    }
    if (config.horizons.size() >= 2) {
        const double slope = loglog_slope(horizons_d, medians);
        ctx.criterion("regret_loglog_slope", slope < max_slope, slope, max_slope);
        bool ratio_decreasing = true;
        for (std::size_t i = 1; i < medians.size(); ++i) {
            if (!(medians[i] / horizons_d[i] < medians[i - 1] / horizons_d[i - 1])) {
                ratio_decreasing = false;
            }
        }
        ctx.criterion("average_regret_decreasing", ratio_decreasing, ratio_decreasing ? 1.0 : 0.0,
                      1.0);
    }

    // Full per-round record for the first seed at the largest horizon.
    {
        EpisodeConfig ec;
        ec.env = build_environment(config, kernel, grid, child_seed(config.seeds.master, 0));
        ec.rho = config.rho.resolve(config.horizons.back());
        ec.delta = config.delta;
        ec.horizon = config.horizons.back();
        ec.audit_coverage = kernel.has_feature_map();
        write_episode_artifacts(ctx, ec, run_episode(ec));
    }

    // Bootstrap CI over seeds for the fitted slope (reported, not asserted).
    Rng boot_rng(child_seed(config.seeds.master, 0xB007));
    std::vector<double> slopes;
    const int resamples = 200;
    for (int b = 0; b < resamples; ++b) {
        std::vector<double> boot_medians;
        for (const auto& sample : regrets_by_horizon) {
            std::vector<double> draw(sample.size());
            for (std::size_t i = 0; i < sample.size(); ++i) {
                draw[i] = sample[boot_rng.below(sample.size())];
            }
            boot_medians.push_back(median_of(draw));
        }
        slopes.push_back(loglog_slope(horizons_d, boot_medians));
    }
    std::sort(slopes.begin(), slopes.end());
    const double lo = slopes[static_cast<std::size_t>(0.025 * (resamples - 1))];
    const double hi = slopes[static_cast<std::size_t>(0.975 * (resamples - 1))];
    ctx.criterion("slope_bootstrap_ci", true, lo,  hi,
                  "95% bootstrap interval [" + format_double(lo) + ", " + format_double(hi) + "]");
    write_csv(ctx.artifact_path(config.output_prefix + "_medians.csv"), table);
}

void run_radius_compare(SuiteContext& ctx) {
    const ExperimentConfig& config = ctx.config;
    const Kernel kernel = config.kernel.build();
    const std::vector<Point> grid = config.grid.build();
    const double tol = config.tolerance("coincidence_tol");
    const int t_max = std::min<int>(config.fixture_points, static_cast<int>(grid.size()));
    if (t_max < 1) throw ConfigError("radius compare: fixture needs at least one point");

    // Distinct, evenly spread grid points keep the fixture Gram matrix PD.
    std::vector<Point> points;
    for (int s = 0; s < t_max; ++s) {
        points.push_back(grid[(s * grid.size()) / t_max]);
    }
    Rng rng(child_seed(config.seeds.master, 0));
    Eigen::VectorXd eps(t_max);
    for (int s = 0; s < t_max; ++s) eps[s] = config.sigma * rng.gaussian();
    const Eigen::MatrixXd gram = kernel.gram(points);

    CsvTable table;
    table.header = {"t"};
    for (double rho : config.rho_values) {
        table.header.push_back("stat_abbasi_rho" + format_double(rho));
        table.header.push_back("radius_abbasi_rho" + format_double(rho));
    }
    for (double eta : config.eta_values) {
        table.header.push_back("stat_chowdhury_eta" + format_double(eta));
        table.header.push_back("radius_chowdhury_eta" + format_double(eta));
    }

    bool abbasi_stat_mono = true, abbasi_radius_mono = true;
    bool chow_stat_mono = true, chow_radius_mono = true;
    double worst_coincidence = 0.0;
    const double coincidence_eta = *std::min_element(config.eta_values.begin(),
                                                     config.eta_values.end());
    for (int t = 1; t <= t_max; ++t) {
        const Eigen::MatrixXd k_t = gram.topLeftCorner(t, t);
        const Eigen::VectorXd e_t = eps.head(t);
        std::vector<std::string> row{format_double(t)};
        double prev_stat = 0.0, prev_radius = 0.0;
        for (std::size_t i = 0; i < config.rho_values.size(); ++i) {
            const double rho = config.rho_values[i];
            const double stat = selfnorm_stat_gram(k_t, e_t, rho);
            Eigen::MatrixXd m = Eigen::MatrixXd::Identity(t, t) + k_t / rho;
            const double logdet = 2.0 * std::log(m.llt().matrixL().determinant());
            const double radius = abbasi_noise_term(logdet, config.sigma, config.delta);
            if (i > 0 && !(stat <= prev_stat)) abbasi_stat_mono = false;
            if (i > 0 && !(radius < prev_radius)) abbasi_radius_mono = false;
            prev_stat = stat;
            prev_radius = radius;
            row.push_back(format_double(stat));
            row.push_back(format_double(radius));
        }
        for (std::size_t i = 0; i < config.eta_values.size(); ++i) {
            const double eta = config.eta_values[i];
            const double stat = selfnorm_stat_chowdhury(k_t, e_t, eta);
            RadiusSpec spec;
            spec.rule = RadiusSpec::Rule::kChowdhury;
            spec.eta = eta;
            spec.sigma = config.sigma;
            spec.delta = config.delta;
            const double radius = chowdhury_radius(k_t, spec);
            if (i > 0 && !(stat >= prev_stat)) chow_stat_mono = false;
            if (i > 0 && !(radius > prev_radius)) chow_radius_mono = false;
            prev_stat = stat;
            prev_radius = radius;
            row.push_back(format_double(stat));
            row.push_back(format_double(radius));
        }
        const double coincidence = std::abs(selfnorm_stat_gram(k_t, e_t, 1.0) -
                                            selfnorm_stat_chowdhury(k_t, e_t, coincidence_eta));
        worst_coincidence = std::max(worst_coincidence, coincidence);
        table.rows.push_back(std::move(row));
    }
    ctx.criterion("abbasi_stat_nonincreasing_in_rho", abbasi_stat_mono, abbasi_stat_mono ? 1 : 0, 1);
    ctx.criterion("abbasi_radius_decreasing_in_rho", abbasi_radius_mono,
                  abbasi_radius_mono ? 1 : 0, 1);
    ctx.criterion("chowdhury_stat_nondecreasing_in_eta", chow_stat_mono, chow_stat_mono ? 1 : 0, 1);
    ctx.criterion("chowdhury_radius_increasing_in_eta", chow_radius_mono,
                  chow_radius_mono ? 1 : 0, 1);
    ctx.criterion("rho1_eta0_coincidence", worst_coincidence <= tol, worst_coincidence, tol);
    write_csv(ctx.artifact_path(config.output_prefix + "_table.csv"), table);
}

void run_infogain_sandwich(SuiteContext& ctx) {
    const ExperimentConfig& config = ctx.config;
    const std::vector<Point> grid = config.grid.build();
    const double margin = config.tolerance("margin");
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (double beta : config.betas) {
        const Kernel kernel =
            Kernel::mercer_synthetic(config.kernel.rank, config.kernel.decay_c, beta,
                                     config.kernel.dim);
        std::vector<double> rhos = config.rho_values;
        if (config.include_schedule_rho) rhos.push_back(rho_schedule(config.horizon, beta));
        for (double rho : rhos) {
            const InfoGainCurve curve = greedy_infogain(kernel, grid, rho, config.horizon);
            CsvTable table;
            table.header = {"t", "gamma_hat", "gamma_bound"};
            for (int t = 0; t <= config.horizon; ++t) {
                table.rows.push_back({format_double(t), format_double(curve.gamma_hat[t]),
                                      format_double(curve.gamma_bound[t])});
                if (t >= 1) {
                    worst_gap = std::max(worst_gap, curve.gamma_hat[t] - curve.gamma_bound[t]);
                }
            }
            write_csv(ctx.artifact_path(config.output_prefix + "_beta" + format_double(beta) +
                                        "_rho" + format_double(rho) + ".csv"),
                      table);
        }
    }
    ctx.criterion("greedy_below_eigendecay_bound", worst_gap <= margin, worst_gap, margin);
}

void run_potential_audit(SuiteContext& ctx) {
    const ExperimentConfig& config = ctx.config;
    const Kernel kernel = config.kernel.build();
    const std::vector<Point> grid = config.grid.build();
    const double rho = config.rho.resolve(config.horizon);
    const double identity_tol = config.tolerance("identity_tol");
    const int n = config.seeds.count;
    std::vector<double> identity_err(n);
    std::vector<double> sum_excess(n);
    const bool sum_bound_applies = rho >= std::max(1.0, kernel.uniform_bound());
    parallel_for(n, [&](std::size_t i) {
        Rng design_rng(child_seed(config.seeds.master, i));
        GridPosterior posterior(kernel, grid, rho, /*track_responses=*/false);
        std::vector<double> widths;
        widths.reserve(config.horizon);
        for (int t = 0; t < config.horizon; ++t) {
            int index = 0;
            switch (config.design) {
                case DesignRule::kFixedSweep:
                    index = t % posterior.grid_size();
                    break;
                case DesignRule::kUniformRandom:
                    index = static_cast<int>(design_rng.below(posterior.grid_size()));
                    break;
                case DesignRule::kWidthGreedy:
                    index = posterior.argmax_width();
                    break;
            }
            widths.push_back(posterior.width_at(index));
            posterior.observe(index, 0.0);
        }
        const PotentialAudit audit = elliptical_potential_audit(posterior.state(), widths);
        identity_err[i] = std::abs(audit.log_product - audit.logdet) /
                          std::max(1.0, std::abs(audit.logdet));
        sum_excess[i] = audit.sum_sq - 2.0 * audit.logdet;
    });
    double max_err = 0.0;
    double max_excess = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        max_err = std::max(max_err, identity_err[i]);
        max_excess = std::max(max_excess, sum_excess[i]);
    }
    ctx.criterion("product_logdet_identity", max_err <= identity_tol, max_err, identity_tol);
    if (sum_bound_applies) {
        ctx.criterion("width_sum_below_twice_logdet", max_excess <= 1e-12, max_excess, 0.0);
    } else {
        ctx.criterion("width_sum_below_twice_logdet", true, max_excess, 0.0,
                      "not applicable: rho < max(1, L)");
    }
    CsvTable table;
    table.header = {"trajectory", "identity_rel_err", "sum_sq_minus_2logdet"};
    for (int i = 0; i < n; ++i) {
        table.rows.push_back({format_double(i), format_double(identity_err[i]),
                              format_double(sum_excess[i])});
    }
    write_csv(ctx.artifact_path(config.output_prefix + "_audit.csv"), table);
}

}  // namespace

json SuiteReport::to_json() const {
    json j;
    j["suite"] = suite_kind_name(kind);
    j["pass"] = pass;
    json criteria_json = json::array();
    for (const auto& c : criteria) {
        json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["value"] = c.value;
        cj["threshold"] = c.threshold;
        if (!c.detail.empty()) cj["detail"] = c.detail;
        criteria_json.push_back(cj);
    }
    j["criteria"] = criteria_json;
    j["artifacts"] = artifacts;
    j["provenance"] = {{"config_hash", config_hash}, {"version", kToolVersion}};
    return j;
}

SuiteReport run_suite(const ExperimentConfig& config, const std::string& output_dir) {
    std::filesystem::create_directories(output_dir);
    SuiteContext ctx{config, output_dir, {}};
    ctx.report.kind = config.kind;
    ctx.report.config_hash = kucb::config_hash(config);
    switch (config.kind) {
        case SuiteKind::kVilleCoverage: run_ville_coverage(ctx); break;
        case SuiteKind::kSupermartingaleDecay: run_supermartingale_decay(ctx); break;
        case SuiteKind::kGramIdentity: run_gram_identity(ctx); break;
        case SuiteKind::kTruncationConvergence: run_truncation_convergence(ctx); break;
        case SuiteKind::kRegretScaling: run_regret_scaling(ctx); break;
        case SuiteKind::kRadiusCompare: run_radius_compare(ctx); break;
        case SuiteKind::kInfogainSandwich: run_infogain_sandwich(ctx); break;
        case SuiteKind::kPotentialAudit: run_potential_audit(ctx); break;
    }
    ctx.report.pass = true;
    for (const auto& c : ctx.report.criteria) ctx.report.pass = ctx.report.pass && c.pass;
    const std::string report_path = output_dir + "/" + config.output_prefix + "_report.json";
    write_text_file(report_path, ctx.report.to_json().dump(2) + "\n");
    ctx.report.artifacts.push_back(config.output_prefix + "_report.json");
    return ctx.report;
}

}  // namespace kucb
