#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "benign/errors.hpp"
#include "benign/rng.hpp"
#include "benign/sphere.hpp"

using namespace benign;
using benign::sphere::sample_sphere;

TEST_CASE("sampled rows lie on the unit sphere") {
    for (int d : {2, 3, 7, 11}) {
        const auto X = sample_sphere(d, 500, 42);
        CHECK(X.n() == 500);
        CHECK(X.d() == d);
        const double worst = (X.matrix().rowwise().norm().array() - 1.0).abs().maxCoeff();
        CHECK(worst <= 1e-12);
    }
    const auto one = sample_sphere(3, 1, 9);
    CHECK(std::abs(one.row(0).norm() - 1.0) <= 1e-12);
}

TEST_CASE("sampling is a pure function of the seed") {
    const auto a = sample_sphere(5, 64, 1234);
    const auto b = sample_sphere(5, 64, 1234);
    const auto c = sample_sphere(5, 64, 1235);
    CHECK(a.matrix() == b.matrix());
    CHECK(a.matrix() != c.matrix());
}

TEST_CASE("sampler rejects degenerate shapes") {
    CHECK_THROWS_AS(sample_sphere(1, 10, 0), InvalidArgument);
    CHECK_THROWS_AS(sample_sphere(3, 0, 0), InvalidArgument);
}

TEST_CASE("UnitMatrix validates row norms") {
    Eigen::MatrixXd rows(2, 3);
    rows << 1, 0, 0, 0, 0.6, 0.8;
    CHECK_NOTHROW(sphere::UnitMatrix::from_rows(rows));
    rows(1, 2) = 0.9;
    CHECK_THROWS_AS(sphere::UnitMatrix::from_rows(rows), InvalidArgument);
    const auto fixed = sphere::UnitMatrix::normalized(rows);
    CHECK(std::abs(fixed.row(1).norm() - 1.0) <= 1e-15);
    CHECK_THROWS_AS(sphere::UnitMatrix::from_rows(Eigen::MatrixXd(0, 3)), InvalidArgument);
    CHECK_THROWS_AS(sphere::UnitMatrix::from_rows(Eigen::MatrixXd::Ones(2, 1)), InvalidArgument);
}

TEST_CASE("moments of the uniform distribution") {
    const int d = 3;
    const std::size_t n = 100'000;
    const auto X = sample_sphere(d, n, 7);
    const Eigen::RowVectorXd mean = X.matrix().colwise().mean();
    CHECK(mean.cwiseAbs().maxCoeff() <= 0.01);

    // Paired rows give independent (x, x'); E[(x . x')^2] = 1/d.
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        const double t = X.matrix().row(i).dot(X.matrix().row(i + 1));
        acc += t * t;
    }
    CHECK(std::abs(acc / (n / 2) - 1.0 / d) <= 0.01);
}

TEST_CASE("scaled empirical covariance approaches the identity") {
    for (int d : {3, 6}) {
        const std::size_t samples = 40'000;
        const auto X = sample_sphere(d, samples, 99);
        const Eigen::MatrixXd cov = X.matrix().transpose() * X.matrix() / static_cast<double>(samples);
        const double dev = (d * cov - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
        CHECK(dev <= 5.0 / std::sqrt(static_cast<double>(samples)));
    }
}

TEST_CASE("mc_expectation basics") {
    CHECK(sphere::mc_expectation([](const Eigen::VectorXd&) { return 1.0; }, 3, 1000, 0) == 1.0);
    const double odd = sphere::mc_expectation([](const Eigen::VectorXd& x) { return x[0]; }, 3, 200'000, 1);
    CHECK(std::abs(odd) <= 0.01);
    CHECK_THROWS_AS(sphere::mc_expectation([](const Eigen::VectorXd&) { return 1.0; }, 3, 0, 0), InvalidArgument);
}

TEST_CASE("mc_expectation of x1^2 against a spherical grid quadrature") {
    // Midpoint rule in (θ, φ) with the sin θ area element, normalized by 4π.
    const int nt = 400;
    const int np = 400;
    double grid = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double theta = (i + 0.5) * std::numbers::pi / nt;
        for (int j = 0; j < np; ++j) {
            const double phi = (j + 0.5) * 2.0 * std::numbers::pi / np;
            const double x1 = std::sin(theta) * std::cos(phi);
            grid += x1 * x1 * std::sin(theta);
        }
    }
    grid *= (std::numbers::pi / nt) * (2.0 * std::numbers::pi / np) / (4.0 * std::numbers::pi);
    CHECK(std::abs(grid - 1.0 / 3.0) <= 1e-4);

    const double mc = sphere::mc_expectation([](const Eigen::VectorXd& x) { return x[0] * x[0]; }, 3, 200'000, 5);
    CHECK(std::abs(mc - grid) <= 0.01);
}

TEST_CASE("mc_expectation reports the first non-finite sample") {
    std::size_t calls = 0;
    try {
        sphere::mc_expectation(
            [&](const Eigen::VectorXd&) {
                return ++calls == 17 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
            },
            3, 100, 0);
        FAIL("expected NonFiniteValue");
    } catch (const NonFiniteValue& e) {
        CHECK(e.index() == 16);
        CHECK(e.code() == ExitCode::numeric_error);
    }
}

TEST_CASE("mc_expectation uses the sample_sphere stream") {
    const auto X = sample_sphere(4, 50, 2024);
    std::vector<Eigen::VectorXd> seen;
    sphere::mc_expectation(
        [&](const Eigen::VectorXd& x) {
            seen.push_back(x);
            return 0.0;
        },
        4, 50, 2024);
    REQUIRE(seen.size() == 50);
    for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == X.row(static_cast<Eigen::Index>(i)));
}

TEST_CASE("seed derivation separates tags and indices") {
    CHECK(derive_seed(1, "data", {0, 0}) == derive_seed(1, "data", {0, 0}));
    CHECK(derive_seed(1, "data", {0, 0}) != derive_seed(1, "init", {0, 0}));
    CHECK(derive_seed(1, "data", {0, 1}) != derive_seed(1, "data", {1, 0}));
    CHECK(derive_seed(1, "data", {0, 0}) != derive_seed(2, "data", {0, 0}));
}
