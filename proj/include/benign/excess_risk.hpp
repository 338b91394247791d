#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "benign/datasets.hpp"

namespace benign::experiments {

/// Maps an n x d input batch to n predictions.
using BatchPredictor = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

struct EvalConfig {
    /// Fresh uniform points per synthetic evaluation.
    std::size_t mc_samples = 20'000;
    /// Input dimension of the synthetic target f*(x) = x_d.
    int dim = 3;
    /// Held-out split with clean targets (required for real datasets).
    std::shared_ptr<const datasets::LabeledDataset> test;
};

/// Estimates R(f) - R(f*) = ‖f - f*‖².
///
/// Synthetic data: Monte-Carlo mean of (f(x) - x_d)² over a fixed set of
/// uniform points drawn once from `seed`, so successive evaluations along a
/// curve share the same points. Real data: mean squared error against the
/// clean targets of the held-out split. That quantity includes the data's
/// intrinsic noise and is a proxy, not a true excess risk.
class ExcessRiskEstimator {
public:
    ExcessRiskEstimator(datasets::DatasetKind kind, const EvalConfig& cfg, std::uint64_t seed);

    double operator()(const BatchPredictor& predictor) const;

    const Eigen::MatrixXd& points() const noexcept { return points_; }
    const Eigen::VectorXd& targets() const noexcept { return targets_; }

private:
    Eigen::MatrixXd points_;
    Eigen::VectorXd targets_;
};

double excess_risk_estimate(const BatchPredictor& predictor, datasets::DatasetKind kind, const EvalConfig& cfg,
                            std::uint64_t seed);

}  // namespace benign::experiments
