#pragma once

/**
 * @file relu_net.hpp
 * @brief Two-layer ReLU network f_W(x) = (1/√m) Σ_j a_j max(0, w_j·x) with
 *        fixed output signs, trained by full-batch gradient descent on the
 *        mean squared error.
 */

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "benign/datasets.hpp"
#include "benign/excess_risk.hpp"
#include "benign/risk_curve.hpp"

namespace benign::relu_net {

struct TwoLayerNet {
    Eigen::MatrixXd hidden;     // m x d, rows are neurons
    Eigen::VectorXd out_signs;  // length m, entries ±1, never trained

    Eigen::Index width() const noexcept { return hidden.rows(); }
    Eigen::Index dim() const noexcept { return hidden.cols(); }
};

/// Hidden weights at iteration 0.
class InitSnapshot {
public:
    explicit InitSnapshot(Eigen::MatrixXd hidden) : hidden_(std::move(hidden)) {}
    const Eigen::MatrixXd& hidden() const noexcept { return hidden_; }

private:
    Eigen::MatrixXd hidden_;
};

struct Initialized {
    TwoLayerNet net;
    InitSnapshot snapshot;
};

/// Neurons j and j + m/2 share Gaussian weights and carry opposite output
/// signs, so the network output is exactly zero at initialization.
Initialized init_antisymmetric(Eigen::Index m, Eigen::Index d, std::uint64_t seed);

Eigen::VectorXd forward(const TwoLayerNet& net, const Eigen::MatrixXd& X);

/// Gradient of (1/n)‖y - f_W(X)‖² with respect to W, using φ'(0) = 0.
Eigen::MatrixXd grad_empirical(const TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// W <- W - lr ∇_W R. Output signs are untouched.
void gd_step(TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lr);

struct Drift {
    double max_row_drift = 0.0;
    double radius = 0.0;  // 32 √(d/m)
};

Drift weight_drift(const TwoLayerNet& net, const InitSnapshot& snapshot);

/// Iterations at which a training run records risks.
class LogSchedule {
public:
    /// 0, 1, ..., 10, then each point is floor(previous * ratio) (at least previous + 1).
    static LogSchedule geometric(double ratio = 1.25);
    /// 0, k, 2k, ...
    static LogSchedule every(std::size_t k);
    /// Parses "geometric", "geometric:<ratio>" or "every:<k>".
    static LogSchedule parse(const std::string& text);

    /// Sorted logged iterations in [0, iters]; always contains 0 and iters.
    std::vector<std::size_t> points(std::size_t iters) const;
    std::string describe() const;

private:
    LogSchedule(bool geometric, double ratio, std::size_t step) : geometric_(geometric), ratio_(ratio), step_(step) {}
    bool geometric_;
    double ratio_;
    std::size_t step_;
};

struct TrainConfig {
    double lr = 0.1;
    std::size_t iters = 1000;
    LogSchedule schedule = LogSchedule::geometric();
    experiments::EvalConfig eval;
    bool diagnostics = false;
    /// Gram eigen-solves are skipped above this training size.
    Eigen::Index diagnostics_max_n = 2000;
    double divergence_threshold = 1e6;
};

struct DiagnosticsRow {
    std::size_t iteration = 0;
    double min_eig_empirical_gram = std::numeric_limits<double>::quiet_NaN();
    double max_drift = 0.0;
    double drift_radius = 0.0;
};

struct DiagnosticsTrace {
    std::vector<DiagnosticsRow> rows;
    bool eigen_skipped = false;
};

struct TrainResult {
    experiments::RiskCurve curve;
    DiagnosticsTrace diagnostics;
};

/// Full-batch gradient descent on the noisy targets. `net` is updated in place.
/// Throws DivergenceError when the empirical risk exceeds the guard.
TrainResult train(TwoLayerNet& net, const InitSnapshot& snapshot, const datasets::LabeledDataset& dataset,
                  const TrainConfig& cfg, std::uint64_t eval_seed);

/// CSV `iteration,min_eig_empirical_gram,max_drift,drift_radius`; skipped eigenvalues are written as `nan`.
void write_diagnostics_csv(std::ostream& out, const DiagnosticsTrace& trace);

}  // namespace benign::relu_net
