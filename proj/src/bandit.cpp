#include "kucb/bandit.hpp"

#include <cmath>
#include <string>

#include "kucb/errors.hpp"

namespace kucb {

double TargetFunction::value(const Kernel& kernel, const Point& x) const {
    if (static_cast<Eigen::Index>(centers.size()) != coefficients.size()) {
        throw InputError("target function: centers and coefficients disagree in length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        acc += coefficients[static_cast<Eigen::Index>(i)] * kernel.eval(x, centers[i]);
    }
    return acc;
}

Environment Environment::make(Kernel kernel, TargetFunction f_star, std::vector<Point> grid,
                              double sigma, NoiseKind noise, std::uint64_t seed,
                              double norm_bound) {
    if (grid.empty()) throw ConfigError("environment: candidate grid is empty");
    if (!(sigma >= 0.0)) throw ConfigError("environment: sigma must be nonnegative");
    Environment env;
    env.kernel = std::move(kernel);
    env.f_star = std::move(f_star);
    env.grid = std::move(grid);
    env.sigma = sigma;
    env.noise = noise;
    env.seed = seed;
    const double norm = rkhs_norm(env.kernel, env.f_star.centers, env.f_star.coefficients);
    env.norm_bound = norm_bound > 0.0 ? norm_bound : norm;
    if (norm > env.norm_bound * (1.0 + 1e-12)) {
        throw ConfigError("environment: declared norm bound " + std::to_string(env.norm_bound) +
                          " is below the actual RKHS norm " + std::to_string(norm));
    }
    env.f_values.resize(env.grid.size());
    env.x_star_index = 0;
    for (std::size_t i = 0; i < env.grid.size(); ++i) {
        env.f_values[i] = env.f_star.value(env.kernel, env.grid[i]);
        if (env.f_values[i] > env.f_values[env.x_star_index]) {
            env.x_star_index = static_cast<int>(i);
        }
    }
    env.f_max = env.f_values[env.x_star_index];
    return env;
}

double rho_schedule(double horizon, double beta, double scale) {
    if (!(horizon >= 1.0)) throw ConfigError("rho schedule: horizon must be >= 1");
    if (!(beta > 1.0)) throw ConfigError("rho schedule: eigendecay exponent must exceed 1");
    if (!(scale > 0.0)) throw ConfigError("rho schedule: scale must be positive");
    return scale * std::pow(horizon, 1.0 / (1.0 + beta));
}

double regret_exponent(double beta) {
    if (!(beta > 1.0)) throw ConfigError("regret exponent: eigendecay exponent must exceed 1");
    return (3.0 + beta) / (2.0 + 2.0 * beta);
}

double matern_regret_exponent(double nu, int d) {
    if (!(nu >= 0.5)) throw ConfigError("matern regret exponent: nu must be >= 1/2");
    if (d < 1) throw ConfigError("matern regret exponent: dimension must be >= 1");
    return (nu + 2.0 * d) / (2.0 * nu + 2.0 * d);
}

RegretRow gp_ucb_step(GridPosterior& posterior, const RadiusSpec& spec, const Environment& env,
                      Rng& noise_rng, double cumulative_so_far) {
    const double radius = abbasi_radius(posterior.state().logdet_gram(), spec);
    const Eigen::VectorXd means = posterior.means();
    int best = 0;
    double best_ucb = means[0] + radius * posterior.width_at(0);
    for (int i = 1; i < posterior.grid_size(); ++i) {
        const double ucb = means[i] + radius * posterior.width_at(i);
        if (ucb > best_ucb) {
            best = i;
            best_ucb = ucb;
        }
    }
    RegretRow row;
    row.t = posterior.state().count() + 1;
    row.x_index = best;
    row.radius = radius;
    row.width = posterior.width_at(best);
    const double noise = env.sigma == 0.0 ? 0.0
                         : env.noise == NoiseKind::kGaussian
                             ? env.sigma * noise_rng.gaussian()
                             : env.sigma * noise_rng.rademacher();
    row.y = env.f_values[best] + noise;
    row.instant = env.f_max - env.f_values[best];
    row.cumulative = cumulative_so_far + row.instant;
    posterior.observe(best, row.y);
    row.logdet = posterior.state().logdet_gram();
    return row;
}

EpisodeResult run_episode(const EpisodeConfig& config) {
    if (config.horizon < 0) throw InputError("episode: negative horizon");
    RadiusSpec spec;
    spec.rule = RadiusSpec::Rule::kAbbasiHilbert;
    spec.rho = config.rho;
    spec.sigma = config.env.sigma;
    spec.delta = config.delta;
    spec.norm_bound = config.env.norm_bound;
    spec.validate();

    GridPosterior posterior(config.env.kernel, config.env.grid, config.rho);
    Rng noise_rng(child_seed(config.env.seed, 3));
    EpisodeResult result;
    result.rows.reserve(config.horizon);
    std::vector<double> widths;
    widths.reserve(config.horizon);
    const bool audit = config.audit_coverage && config.env.kernel.has_feature_map();
    if (audit) {
        result.covered = true;
        result.covered_rounds.reserve(config.horizon);
    }
    double cumulative = 0.0;
    for (int t = 1; t <= config.horizon; ++t) {
        RegretRow row = gp_ucb_step(posterior, spec, config.env, noise_rng, cumulative);
        cumulative = row.cumulative;
        widths.push_back(row.width);
        if (audit) {
            const double radius_t = abbasi_radius(posterior.state().logdet_gram(), spec);
            const bool inside = ellipsoid_contains(posterior.state(), config.env.f_star.centers,
                                                   config.env.f_star.coefficients, radius_t);
            result.covered_rounds.push_back(inside);
            if (!inside && result.first_violation < 0) {
                result.covered = false;
                result.first_violation = t;
            }
        }
        result.rows.push_back(std::move(row));
    }
    result.audit = elliptical_potential_audit(posterior.state(), widths);
    result.final_regret = cumulative;
    result.final_radius = abbasi_radius(posterior.state().logdet_gram(), spec);
    return result;
}

}  // namespace kucb
