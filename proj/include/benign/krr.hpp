#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "benign/datasets.hpp"
#include "benign/excess_risk.hpp"
#include "benign/ntk.hpp"
#include "benign/sphere.hpp"

namespace benign::krr {

/// Regularized empirical risk minimizer f(x) = Σ_i α_i κ(x_i, x), where
/// (H + nγI) α = y.
struct KrrModel {
    double gamma = 0.0;
    sphere::UnitMatrix train_inputs;
    Eigen::VectorXd dual_coeffs;
    /// Diagonal jitter added after a failed Cholesky (0 when none was needed).
    double jitter = 0.0;
};

KrrModel krr_fit(const sphere::UnitMatrix& X, const Eigen::VectorXd& y, double gamma);
/// Same as above with a precomputed analytical Gram of X.
KrrModel krr_fit(const sphere::UnitMatrix& X, const ntk::GramMatrix& H, const Eigen::VectorXd& y, double gamma);

Eigen::VectorXd krr_predict(const KrrModel& model, const sphere::UnitMatrix& X_eval);

/// Mean squared residual (1/n) Σ (p_i - t_i)².
double empirical_risk(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

/// lhs: empirical risk of the fitted model on (X, y).
/// rhs: (γ²/n) ‖(H/n + γI)^{-1} y‖², computed by an independent LDLᵀ solve.
std::pair<double, double> residual_identity(const KrrModel& model, const Eigen::VectorXd& y);

struct Inequality {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

struct AssumptionParams {
    double eps = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double d = 0.0;
    double n = 0.0;
    double f_eps_norm = 0.0;
    double C = 1.0;
};

/// Clause-by-clause evaluation of the KRR benign-overfitting conditions.
struct AssumptionReport {
    Inequality dimension_vs_delta;   // e^{-d} <= δ/4
    Inequality samples_vs_dimension; // √n - C√d >= (2/√5)√n
    Inequality shrinkage;            // (γ / (γ + 1/(5d)))² <= ε
    Inequality approximation;        // γ ‖f_ε‖²_H <= ε/8
    Inequality estimation;           // n >= 16 (1 + 1/γ)² log(4/δ) / (γ² ε)

    bool clause_i() const noexcept {
        return dimension_vs_delta.holds && samples_vs_dimension.holds && shrinkage.holds;
    }
    bool clause_ii() const noexcept { return approximation.holds; }
    bool clause_iii() const noexcept { return estimation.holds; }
    bool all() const noexcept { return clause_i() && clause_ii() && clause_iii(); }
};

AssumptionReport check_assumption_krr(const AssumptionParams& p);
void print_report(std::ostream& out, const AssumptionReport& report);

struct SweepRecord {
    double gamma = 0.0;
    Eigen::Index n = 0;
    double empirical_risk = 0.0;
    double excess_risk = 0.0;
    double lambda_min = 0.0;
};

/// Fits one model per γ on the noisy targets and scores it. The Gram and its
/// minimum eigenvalue are computed once per sweep.
std::vector<SweepRecord> krr_complexity_sweep(const datasets::LabeledDataset& dataset,
                                              const std::vector<double>& gammas,
                                              const experiments::EvalConfig& eval, std::uint64_t eval_seed);

/// CSV `gamma,n,empirical_risk,excess_risk,lambda_min`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

}  // namespace benign::krr
