#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kucb/bandit.hpp"
#include "kucb/rng.hpp"

using namespace kucb;

namespace {

std::vector<Point> unit_grid(int n) {
    std::vector<Point> g;
    for (int i = 0; i < n; ++i) g.push_back(point1d(n == 1 ? 0.0 : i / (n - 1.0)));
    return g;
}

TargetFunction single_bump(const Point& center, double coeff) {
    TargetFunction f;
    f.centers.push_back(center);
    f.coefficients.resize(1);
    f.coefficients[0] = coeff;
    return f;
}

}  // namespace

TEST_CASE("rho schedule") {
    CHECK(rho_schedule(1024, 2.0) == doctest::Approx(10.0794).epsilon(1e-5));
    CHECK(rho_schedule(1024, 2.0) == doctest::Approx(std::pow(1024.0, 1.0 / 3.0)).epsilon(1e-12));
    CHECK(rho_schedule(1, 3.5, 2.5) == doctest::Approx(2.5));
    CHECK(rho_schedule(4096, 3.0) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK_THROWS_AS(rho_schedule(100, 1.0), ConfigError);
    CHECK_THROWS_AS(rho_schedule(100, 2.0, 0.0), ConfigError);
}

TEST_CASE("regret exponents") {
    CHECK(regret_exponent(2.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(regret_exponent(2.0) == doctest::Approx(0.83333).epsilon(1e-5));
    CHECK(matern_regret_exponent(0.5, 1) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(regret_exponent(1e6) == doctest::Approx(0.5).epsilon(1e-5));
    for (double nu : {0.5, 1.5, 2.5, 3.7}) {
        for (int d : {1, 2, 5}) {
            CHECK(matern_regret_exponent(nu, d) ==
                  doctest::Approx(regret_exponent(matern_eigendecay_beta(nu, d))).epsilon(1e-15));
        }
    }
    CHECK_THROWS_AS(regret_exponent(0.9), ConfigError);
}

TEST_CASE("environment validates the declared norm bound") {
    const Kernel kernel = Kernel::squared_exponential(0.5);
    const auto grid = unit_grid(9);
    CHECK_THROWS_AS(
        Environment::make(kernel, single_bump(grid[4], 1.0), grid, 0.0, NoiseKind::kGaussian, 1,
                          /*norm_bound=*/0.5),
        ConfigError);
    const Environment env = Environment::make(kernel, single_bump(grid[4], 1.0), grid, 0.0,
                                              NoiseKind::kGaussian, 1);
    CHECK(env.norm_bound == doctest::Approx(1.0));  // k(z,z) = 1
    CHECK(env.x_star_index == 4);
    CHECK(env.f_max == doctest::Approx(1.0));
    CHECK_THROWS_AS(
        Environment::make(kernel, single_bump(grid[4], 1.0), {}, 0.0, NoiseKind::kGaussian, 1),
        ConfigError);
}

TEST_CASE("first round breaks ties at the lowest grid index") {
    const Kernel kernel = Kernel::squared_exponential(0.5);
    const auto grid = unit_grid(7);
    const Environment env =
        Environment::make(kernel, single_bump(grid[3], 1.0), grid, 0.0, NoiseKind::kGaussian, 1);
    EpisodeConfig config{env, 1.0, 0.05, 1, false};
    const EpisodeResult result = run_episode(config);
    CHECK(result.rows[0].x_index == 0);
}

TEST_CASE("single-point grid accrues zero regret") {
    const Kernel kernel = Kernel::squared_exponential(0.5);
    const auto grid = unit_grid(1);
    const Environment env =
        Environment::make(kernel, single_bump(grid[0], 0.7), grid, 0.3, NoiseKind::kGaussian, 5);
    EpisodeConfig config{env, 1.0, 0.05, 20, false};
    const EpisodeResult result = run_episode(config);
    for (const auto& row : result.rows) {
        CHECK(row.x_index == 0);
        CHECK(row.instant == doctest::Approx(0.0));
    }
    CHECK(result.final_regret == doctest::Approx(0.0));
}

TEST_CASE("noiseless episode locks onto the maximizer") {
    const Kernel kernel = Kernel::squared_exponential(0.3);
    const auto grid = unit_grid(5);
    const Environment env =
        Environment::make(kernel, single_bump(grid[3], 1.0), grid, 0.0, NoiseKind::kGaussian, 3);
    EpisodeConfig config{env, 0.25, 0.05, 60, false};
    const EpisodeResult result = run_episode(config);
    // This fixture locks from round 31; round 40 leaves margin.
    for (int t = 40; t < 60; ++t) {
        CHECK(result.rows[t].x_index == 3);
        CHECK(result.rows[t].instant == doctest::Approx(0.0));
    }
    // Prefix-minimum of instantaneous regret never increases.
    double prefix_min = std::numeric_limits<double>::infinity();
    double prev_prefix = prefix_min;
    for (const auto& row : result.rows) {
        prefix_min = std::min(prefix_min, row.instant);
        CHECK(prefix_min <= prev_prefix);
        prev_prefix = prefix_min;
    }
}

TEST_CASE("regret record accounting invariants") {
    const Kernel kernel = Kernel::mercer_synthetic(5, 1.0, 2.0);
    const auto grid = unit_grid(15);
    TargetFunction f;
    f.centers = {grid[3], grid[11]};
    f.coefficients.resize(2);
    f.coefficients << 0.9, -0.4;
    const Environment env = Environment::make(kernel, f, grid, 0.4, NoiseKind::kGaussian, 11);
    EpisodeConfig config{env, 1.5, 0.05, 60, false};
    const EpisodeResult result = run_episode(config);
    double cumulative = 0.0;
    double prev_logdet = 0.0;
    for (std::size_t t = 0; t < result.rows.size(); ++t) {
        const RegretRow& row = result.rows[t];
        CHECK(row.t == static_cast<int>(t) + 1);
        CHECK(row.instant >= 0.0);
        cumulative += row.instant;
        CHECK(row.cumulative == doctest::Approx(cumulative).epsilon(1e-15));
        CHECK(row.logdet >= prev_logdet - 1e-12);
        prev_logdet = row.logdet;
    }
    CHECK(result.final_regret == doctest::Approx(cumulative));
    // The potential audit identity holds along the episode.
    CHECK(std::abs(result.audit.log_product - result.audit.logdet) <=
          1e-6 * std::max(1.0, result.audit.logdet));
}

TEST_CASE("determinism: identical config and seed reproduce the record") {
    const Kernel kernel = Kernel::mercer_synthetic(4, 1.0, 2.0);
    const auto grid = unit_grid(11);
    TargetFunction f = single_bump(grid[7], 0.8);
    const Environment env = Environment::make(kernel, f, grid, 0.5, NoiseKind::kRademacher, 99);
    EpisodeConfig config{env, 2.0, 0.1, 50, true};
    const EpisodeResult a = run_episode(config);
    const EpisodeResult b = run_episode(config);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].x_index == b.rows[i].x_index);
        CHECK(a.rows[i].y == b.rows[i].y);  // bitwise equality expected
        CHECK(a.rows[i].cumulative == b.rows[i].cumulative);
    }
}

TEST_CASE("optimism chain on covered rounds") {
    const Kernel kernel = Kernel::mercer_synthetic(5, 1.0, 2.0);
    const double rho = std::max(1.0, kernel.uniform_bound());
    const auto grid = unit_grid(13);
    TargetFunction f;
    f.centers = {grid[2], grid[9]};
    f.coefficients.resize(2);
    f.coefficients << 0.7, 0.5;
    int covered_runs = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Environment env =
            Environment::make(kernel, f, grid, 0.5, NoiseKind::kGaussian, child_seed(606, seed));
        EpisodeConfig config{env, rho, 0.05, 80, true};
        const EpisodeResult result = run_episode(config);
        REQUIRE(result.covered.has_value());
        if (!*result.covered) continue;
        ++covered_runs;
        for (const auto& row : result.rows) {
            CHECK(row.instant <= 2.0 * row.radius * row.width + 1e-9);
        }
        const double logdet_T = result.rows.back().logdet;
        CHECK(result.final_regret <=
              result.final_radius * std::sqrt(2.0 * 80.0 * logdet_T) + 1e-6);
    }
    CHECK(covered_runs >= 8);  // delta = 0.05: violations should be rare
}
