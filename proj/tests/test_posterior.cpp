#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kucb/posterior.hpp"
#include "kucb/rng.hpp"
#include "oracles.hpp"

using namespace kucb;

TEST_CASE("first update produces the 1x1 factor and alpha") {
    PosteriorState state(Kernel::squared_exponential(1.0), 1.0);
    CHECK(state.logdet_gram() == doctest::Approx(0.0));
    state.update(point1d(0.25), 2.0);
    CHECK(state.chol()(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(state.alpha()[0] == doctest::Approx(1.0));
}

TEST_CASE("duplicate points keep the factorization alive") {
    PosteriorState state(Kernel::squared_exponential(1.0), 1.0);
    state.update(point1d(0.5), 1.0);
    state.update(point1d(0.5), -1.0);
    // K + I = [[2,1],[1,2]], det 3.
    CHECK(state.logdet_regularized() == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    const Eigen::MatrixXd reconstructed = state.chol() * state.chol().transpose();
    CHECK(reconstructed(0, 0) == doctest::Approx(2.0));
    CHECK(reconstructed(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("mean closed forms at one observation") {
    PosteriorState state(Kernel::squared_exponential(1.0), 1.0);
    CHECK(state.mean(point1d(0.1)) == doctest::Approx(0.0));
    state.update(point1d(0.1), 2.0);
    CHECK(state.mean(point1d(0.1)) == doctest::Approx(1.0));

    PosteriorState heavy(Kernel::squared_exponential(1.0), 4.0);
    heavy.update(point1d(0.1), 2.0);
    CHECK(heavy.mean(point1d(0.1)) == doctest::Approx(0.4));
}

TEST_CASE("width closed forms") {
    PosteriorState state(Kernel::squared_exponential(1.0), 1.0);
    CHECK(state.width(point1d(0.7)) == doctest::Approx(1.0));
    state.update(point1d(0.7), 0.3);
    CHECK(state.width(point1d(0.7)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(state.width(point1d(0.7)) == doctest::Approx(0.707107).epsilon(1e-5));

    PosteriorState two(Kernel::squared_exponential(1.0), 2.0);
    two.update(point1d(0.7), 0.3);
    CHECK(two.width(point1d(0.7)) == doctest::Approx(0.57735).epsilon(1e-5));
}

TEST_CASE("cholesky breakdown raises a numerical error") {
    PosteriorState state(Kernel::squared_exponential(1.0), 0.5);
    state.update(point1d(0.0), 1.0);
    Eigen::VectorXd bogus(1);
    bogus[0] = 2.0;  // not a valid kernel column; forces a negative pivot
    CHECK_THROWS_AS(state.update_with_column(point1d(0.9), 0.0, bogus, 1.0), NumericalError);
}

TEST_CASE("invariants along random mercer trajectories") {
    Rng rng(123);
    const Kernel kernel = Kernel::mercer_synthetic(5, 1.0, 2.0);
    const FeatureMap& fm = kernel.feature_map();
    const double rho = 1.5;
    PosteriorState state(kernel, rho);
    std::vector<Point> pts;
    Eigen::VectorXd ys(40);
    Eigen::MatrixXd design(40, fm.rank());
    std::vector<Point> probes;
    for (int i = 0; i < 15; ++i) probes.push_back(point1d(rng.uniform01()));
    std::vector<double> prev_widths(probes.size(), std::numeric_limits<double>::infinity());
    for (int t = 0; t < 40; ++t) {
        const Point x = point1d(rng.uniform01());
        const double y = rng.gaussian();
        pts.push_back(x);
        ys[t] = y;
        design.row(t) = fm.embed(x).transpose();
        state.update(x, y);

        // Factor reconstructs K + rho I.
        const Eigen::MatrixXd target =
            kernel.gram(pts) + rho * Eigen::MatrixXd::Identity(t + 1, t + 1);
        const Eigen::MatrixXd recon = state.chol() * state.chol().transpose();
        CHECK((recon - target).norm() <= 1e-8 * target.norm());

        // alpha solves the regularized system.
        const Eigen::VectorXd residual = target * state.alpha() - ys.head(t + 1);
        CHECK(residual.norm() <= 1e-8 * std::max(1.0, ys.head(t + 1).norm()));

        // Fredholm equality between the t x t and rank x rank determinants.
        const Eigen::MatrixXd et = design.topRows(t + 1);
        const Eigen::MatrixXd small = Eigen::MatrixXd::Identity(fm.rank(), fm.rank()) +
                                      et.transpose() * et / rho;
        CHECK(state.logdet_gram() == doctest::Approx(oracles::logdet_eig(small)).epsilon(1e-8));
        CHECK(state.logdet_gram() >= -1e-12);

        // Primal-dual equality for mean and width, and width monotonicity.
        const Eigen::VectorXd theta = oracles::primal_theta(et, ys.head(t + 1), rho);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const Eigen::VectorXd phi = fm.embed(probes[p]);
            CHECK(state.mean(probes[p]) == doctest::Approx(phi.dot(theta)).epsilon(1e-7));
            const double w = state.width(probes[p]);
            CHECK(w == doctest::Approx(oracles::primal_width(et, phi, rho)).epsilon(1e-7));
            CHECK(w <= prev_widths[p] + 1e-12);
            prev_widths[p] = w;
        }
    }

    // Incremental state equals a batch rebuild.
    PosteriorState batch(kernel, rho);
    for (int t = 0; t < 40; ++t) batch.update(pts[t], ys[t]);
    CHECK((batch.alpha() - state.alpha()).norm() <= 1e-8);
    CHECK(batch.logdet_regularized() ==
          doctest::Approx(state.logdet_regularized()).epsilon(1e-8));
}

TEST_CASE("logdet is nondecreasing in t") {
    Rng rng(9);
    PosteriorState state(Kernel::matern(1.5, 0.4), 0.7);
    double prev = state.logdet_gram();
    for (int t = 0; t < 30; ++t) {
        state.update(point1d(rng.uniform01()), rng.gaussian());
        CHECK(state.logdet_gram() >= prev - 1e-12);
        prev = state.logdet_gram();
    }
}

TEST_CASE("potential audit identity at a single step") {
    PosteriorState state(Kernel::squared_exponential(1.0), 2.0);
    const double w0 = state.width(point1d(0.4));
    state.update(point1d(0.4), 1.0);
    const PotentialAudit audit = elliptical_potential_audit(state, {w0});
    CHECK(audit.product == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(audit.logdet == doctest::Approx(std::log(1.5)).epsilon(1e-12));
    CHECK(audit.log_product == doctest::Approx(audit.logdet).epsilon(1e-12));
}

TEST_CASE("potential audit boundary and error cases") {
    PosteriorState state(Kernel::squared_exponential(1.0), 1.0);
    const PotentialAudit audit = elliptical_potential_audit(state, {});
    CHECK(audit.product == doctest::Approx(1.0));
    CHECK(audit.logdet == doctest::Approx(0.0));
    CHECK(audit.sum_sq == doctest::Approx(0.0));
    CHECK_THROWS_AS(elliptical_potential_audit(state, {0.5}), InputError);
}

TEST_CASE("potential sum bound under large regularization") {
    const Kernel kernel = Kernel::mercer_synthetic(4, 1.0, 2.0);
    const double rho = std::max(1.0, kernel.uniform_bound());
    Rng rng(17);
    PosteriorState state(kernel, rho);
    std::vector<double> widths;
    for (int t = 0; t < 50; ++t) {
        const Point x = point1d(rng.uniform01());
        widths.push_back(state.width(x));
        state.update(x, rng.gaussian());
    }
    const PotentialAudit audit = elliptical_potential_audit(state, widths);
    CHECK(std::abs(audit.log_product - audit.logdet) <= 1e-6 * std::max(1.0, audit.logdet));
    CHECK(audit.sum_sq <= 2.0 * audit.logdet + 1e-12);
}

TEST_CASE("rkhs norm closed forms") {
    const Kernel k = Kernel::squared_exponential(1.0);
    CHECK(rkhs_norm(k, {point1d(0.3)}, Eigen::VectorXd::Ones(1)) == doctest::Approx(1.0));
    CHECK(rkhs_norm(k, {point1d(0.3)}, Eigen::VectorXd::Zero(1)) == doctest::Approx(0.0));
    // Two unit-diagonal centers with cross kernel 1/2: |f|^2 = 2 + 2*0.5 = 3.
    const double d = std::sqrt(2.0 * std::log(2.0));
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
    CHECK(rkhs_norm(k, {point1d(0.0), point1d(d)}, ones) ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
    CHECK(rkhs_norm(k, {point1d(0.0), point1d(d)}, ones) ==
          doctest::Approx(1.73205).epsilon(1e-5));
}

TEST_CASE("grid posterior matches the direct state") {
    Rng rng(77);
    const Kernel kernel = Kernel::mercer_synthetic(6, 1.0, 2.0);
    std::vector<Point> grid;
    for (int i = 0; i < 17; ++i) grid.push_back(point1d(i / 16.0));
    GridPosterior fast(kernel, grid, 2.0);
    PosteriorState slow(kernel, 2.0);
    for (int t = 0; t < 25; ++t) {
        const int idx = static_cast<int>(rng.below(grid.size()));
        const double y = rng.gaussian();
        fast.observe(idx, y);
        slow.update(grid[idx], y);
        for (int i = 0; i < fast.grid_size(); ++i) {
            CHECK(fast.width_at(i) == doctest::Approx(slow.width(grid[i])).epsilon(1e-9));
            CHECK(fast.mean_at(i) == doctest::Approx(slow.mean(grid[i])).epsilon(1e-9));
        }
        CHECK(fast.means()[3] == doctest::Approx(slow.mean(grid[3])).epsilon(1e-9));
    }
    CHECK(fast.state().logdet_gram() == doctest::Approx(slow.logdet_gram()).epsilon(1e-10));
}

TEST_CASE("grid posterior argmax breaks ties at the lowest index") {
    const Kernel kernel = Kernel::squared_exponential(1.0);
    std::vector<Point> grid{point1d(0.0), point1d(0.5), point1d(1.0)};
    GridPosterior posterior(kernel, grid, 1.0);
    // Translation-invariant kernel: all widths equal at t = 0.
    CHECK(posterior.argmax_width() == 0);
}
