#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "benign/datasets.hpp"
#include "benign/errors.hpp"
#include "benign/excess_risk.hpp"
#include "benign/krr.hpp"
#include "benign/ntk.hpp"
#include "benign/sphere.hpp"
#include "oracles.hpp"

using namespace benign;
using namespace benign::krr;

namespace {

Eigen::VectorXd gaussian_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (auto& x : v) x = normal(gen);
    return v;
}

/// Regularized empirical risk of the dual expansion α: (1/n)‖Hα - y‖² + γ αᵀHα.
double regularized_objective(const Eigen::MatrixXd& H, const Eigen::VectorXd& alpha, const Eigen::VectorXd& y,
                             double gamma) {
    const double n = static_cast<double>(y.size());
    return (H * alpha - y).squaredNorm() / n + gamma * alpha.dot(H * alpha);
}

}  // namespace

TEST_CASE("single-point fit") {
    const auto X = sphere::sample_sphere(3, 1, 4);
    const auto model = krr_fit(X, Eigen::VectorXd::Ones(1), 0.5);
    CHECK(model.dual_coeffs[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(krr_predict(model, X)[0] == doctest::Approx(0.5).epsilon(1e-14));
    const auto antipode = sphere::UnitMatrix::from_rows(-X.matrix());
    CHECK(std::abs(krr_predict(model, antipode)[0]) <= 1e-16);
    const auto [lhs, rhs] = residual_identity(model, Eigen::VectorXd::Ones(1));
    CHECK(lhs == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rhs == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("two orthogonal points") {
    Eigen::MatrixXd rows(2, 3);
    rows << 1, 0, 0, 0, 1, 0;
    const auto X = sphere::UnitMatrix::from_rows(rows);
    const auto model = krr_fit(X, Eigen::VectorXd::Ones(2), 0.25);
    CHECK(model.dual_coeffs.isApprox(Eigen::VectorXd::Ones(2), 1e-14));
    CHECK(krr_predict(model, X).isApprox(Eigen::VectorXd::Constant(2, 0.5), 1e-14));
}

TEST_CASE("zero targets give the zero predictor") {
    const auto X = sphere::sample_sphere(4, 20, 1);
    const auto model = krr_fit(X, Eigen::VectorXd::Zero(20), 0.1);
    CHECK(model.dual_coeffs.isZero());
    CHECK(krr_predict(model, sphere::sample_sphere(4, 5, 2)).isZero());
    const auto [lhs, rhs] = residual_identity(model, Eigen::VectorXd::Zero(20));
    CHECK(lhs == 0.0);
    CHECK(rhs == 0.0);
}

TEST_CASE("fit rejects bad inputs") {
    const auto X = sphere::sample_sphere(3, 4, 1);
    CHECK_THROWS_AS(krr_fit(X, Eigen::VectorXd::Ones(4), 0.0), InvalidArgument);
    CHECK_THROWS_AS(krr_fit(X, Eigen::VectorXd::Ones(3), 0.1), InvalidArgument);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
    y[2] = std::nan("");
    CHECK_THROWS_AS(krr_fit(X, y, 0.1), InvalidArgument);
}

TEST_CASE("dual coefficients solve the regularized system and minimize the objective") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Eigen::Index n = 40 + 20 * static_cast<Eigen::Index>(seed);
        const auto X = sphere::sample_sphere(3, static_cast<std::size_t>(n), 100 + seed);
        const Eigen::VectorXd y = gaussian_vector(n, 200 + seed);
        const double gamma = 1e-3 * std::pow(10.0, static_cast<double>(seed) - 1.0);
        const auto model = krr_fit(X, y, gamma);
        const Eigen::MatrixXd H = ntk::gram_analytic(X).values;
        const Eigen::VectorXd& alpha = model.dual_coeffs;
        const double residual = ((H + n * gamma * Eigen::MatrixXd::Identity(n, n)) * alpha - y).norm();
        CHECK(residual <= 1e-8 * y.norm());

        // Training predictions equal Hα.
        CHECK((krr_predict(model, X) - H * alpha).cwiseAbs().maxCoeff() <= 1e-10);

        // Any perturbation of α raises the regularized empirical risk.
        const double best = regularized_objective(H, alpha, y, gamma);
        for (std::uint64_t k = 0; k < 10; ++k) {
            const Eigen::VectorXd step = 1e-3 * gaussian_vector(n, 300 + 10 * seed + k);
            CHECK(regularized_objective(H, alpha + step, y, gamma) >= best);
            CHECK(regularized_objective(H, alpha - step, y, gamma) >= best);
        }
    }
}

TEST_CASE("prediction is the kernel expansion") {
    const auto X = sphere::sample_sphere(5, 30, 8);
    const auto model = krr_fit(X, gaussian_vector(30, 9), 0.01);
    const auto Z = sphere::sample_sphere(5, 10, 10);
    const Eigen::VectorXd p = krr_predict(model, Z);
    for (Eigen::Index j = 0; j < Z.n(); ++j) {
        double expected = 0.0;
        for (Eigen::Index i = 0; i < X.n(); ++i) {
            const double angle = std::acos(std::clamp(X.row(i).dot(Z.row(j)), -1.0, 1.0));
            expected += model.dual_coeffs[i] * oracle::kappa_of_angle(angle);
        }
        CHECK(p[j] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("empirical risk") {
    CHECK(empirical_risk(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3)) == 0.0);
    CHECK(empirical_risk(Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Ones(1)) == 0.25);
    Eigen::VectorXd p(2), t(2);
    p << 0, 1;
    t << 1, 0;
    CHECK(empirical_risk(p, t) == 1.0);
    CHECK_THROWS_AS(empirical_risk(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)), InvalidArgument);
}

TEST_CASE("residual identity on random instances") {
    std::uint64_t seed = 0;
    for (Eigen::Index n : {2, 10, 50, 200, 500}) {
        for (double gamma : {1e-6, 1e-3, 0.1, 10.0}) {
            ++seed;
            const auto X = sphere::sample_sphere(3 + static_cast<int>(seed % 4), static_cast<std::size_t>(n), seed);
            const Eigen::VectorXd y = gaussian_vector(n, 1000 + seed);
            const auto [lhs, rhs] = residual_identity(krr_fit(X, y, gamma), y);
            CAPTURE(n);
            CAPTURE(gamma);
            CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(lhs, 1e-12));
        }
    }
}

TEST_CASE("empirical risk bound with the measured minimum eigenvalue") {
    std::uint64_t seed = 50;
    for (Eigen::Index n : {20, 100, 300}) {
        for (double gamma : {1e-5, 1e-3, 1e-1}) {
            ++seed;
            const auto X = sphere::sample_sphere(4, static_cast<std::size_t>(n), seed);
            const auto H = ntk::gram_analytic(X);
            const Eigen::VectorXd y = gaussian_vector(n, seed + 7);
            const auto model = krr_fit(X, H, y, gamma);
            const double risk = empirical_risk(krr_predict(model, X), y);
            const double lambda = std::max(0.0, ntk::min_eigenvalue(H));
            const double nd = static_cast<double>(n);
            const double bound = gamma * gamma / nd * y.squaredNorm() / std::pow(gamma + lambda / nd, 2);
            CHECK(risk <= bound * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("empirical risk is nondecreasing in gamma") {
    const auto data = datasets::make_synthetic(3, 150, 0.3, 12);
    const auto X = sphere::UnitMatrix::from_rows(data.features);
    const auto H = ntk::gram_analytic(X);
    double previous = -1.0;
    for (double gamma = 1e-8; gamma <= 1e3; gamma *= 3.0) {
        const auto model = krr_fit(X, H, data.targets_noisy, gamma);
        const double risk = empirical_risk(krr_predict(model, X), data.targets_noisy);
        CHECK(risk >= previous - 1e-14);
        previous = risk;
    }
}

TEST_CASE("vanishing regularization interpolates") {
    const auto X = sphere::sample_sphere(5, 40, 3);
    REQUIRE(ntk::min_eigenvalue(ntk::gram_analytic(X)) > 1e-4);
    const Eigen::VectorXd y = gaussian_vector(40, 4);
    const auto model = krr_fit(X, y, 1e-10);
    CHECK(empirical_risk(krr_predict(model, X), y) <= 1e-10);
}

TEST_CASE("assumption clauses") {
    AssumptionParams p;
    p.eps = 0.04;
    p.delta = 0.01;
    p.gamma = 1e12;
    p.d = 10;
    p.n = 1e6;
    p.f_eps_norm = 1.0;
    auto r = check_assumption_krr(p);
    CHECK_FALSE(r.shrinkage.holds);
    CHECK_FALSE(r.clause_i());

    p.gamma = 1e-3;
    r = check_assumption_krr(p);
    CHECK(r.shrinkage.lhs == doctest::Approx(1.0 / 441.0).epsilon(1e-12));
    CHECK(r.shrinkage.holds);
    CHECK(r.dimension_vs_delta.lhs == doctest::Approx(std::exp(-10.0)));
    CHECK(r.dimension_vs_delta.holds);

    p.n = 10;
    p.gamma = 0.1;
    p.delta = 0.1;
    r = check_assumption_krr(p);
    const double need = 16.0 * 121.0 * std::log(40.0) / (0.01 * 0.04);
    CHECK(need == doctest::Approx(1.7855e7).epsilon(1e-3));
    CHECK(r.estimation.rhs == doctest::Approx(need).epsilon(1e-12));
    CHECK_FALSE(r.clause_iii());
    CHECK_FALSE(r.all());

    // Each verdict agrees with its evaluated sides.
    for (const auto* q : {&r.dimension_vs_delta, &r.samples_vs_dimension, &r.shrinkage, &r.approximation,
                          &r.estimation}) {
        CHECK(q->holds == (q == &r.samples_vs_dimension || q == &r.estimation ? q->lhs >= q->rhs : q->lhs <= q->rhs));
    }

    std::ostringstream text;
    print_report(text, r);
    CHECK(text.str().find("FAIL") != std::string::npos);
}

TEST_CASE("complexity sweep") {
    const auto data = datasets::make_synthetic(3, 80, 0.2, 31);
    experiments::EvalConfig eval;
    eval.dim = 3;
    eval.mc_samples = 2000;
    const std::vector<double> gammas{1e12, 1.0, 1e-2, 1e-2, 1e-4};
    const auto records = krr_complexity_sweep(data, gammas, eval, 99);
    REQUIRE(records.size() == gammas.size());
    CHECK(records[0].empirical_risk == doctest::Approx(data.targets_noisy.squaredNorm() / 80.0).epsilon(1e-9));
    CHECK(records[2].empirical_risk == records[3].empirical_risk);
    CHECK(records[2].excess_risk == records[3].excess_risk);
    for (std::size_t k = 1; k < records.size(); ++k) CHECK(records[k].empirical_risk <= records[k - 1].empirical_risk);

    // Excess risk recomputed from the fitted model on the estimator's points.
    const auto X = sphere::UnitMatrix::from_rows(data.features);
    const auto model = krr_fit(X, data.targets_noisy, 1e-4);
    const experiments::ExcessRiskEstimator est(datasets::DatasetKind::synthetic, eval, 99);
    const Eigen::VectorXd pred = krr_predict(model, sphere::UnitMatrix::from_rows(est.points()));
    const double excess = (pred - est.points().col(2)).squaredNorm() / static_cast<double>(pred.size());
    CHECK(records[4].excess_risk == doctest::Approx(excess).epsilon(1e-10));
    CHECK(records[4].lambda_min == doctest::Approx(ntk::min_eigenvalue(ntk::gram_analytic(X))).epsilon(1e-10));

    std::ostringstream csv;
    write_sweep_csv(csv, records);
    CHECK(csv.str().rfind("gamma,n,empirical_risk,excess_risk,lambda_min\n", 0) == 0);

    CHECK_THROWS_AS(krr_complexity_sweep(data, {1.0, -1.0}, eval, 1), InvalidArgument);
}

TEST_CASE("sweep on n=500 stays under the measured-eigenvalue bound") {
    const auto data = datasets::make_synthetic(3, 500, 0.1, 2024);
    experiments::EvalConfig eval;
    eval.mc_samples = 1000;
    const double gamma = 1e-4;
    const auto rec = krr_complexity_sweep(data, {gamma}, eval, 5).front();
    const double shrink = std::pow(gamma / (gamma + rec.lambda_min / 500.0), 2);
    CHECK(rec.empirical_risk <= shrink * data.targets_noisy.squaredNorm() / 500.0);
}
