#include "benign/excess_risk.hpp"

#include <cmath>

#include "benign/errors.hpp"
#include "benign/rng.hpp"
#include "benign/sphere.hpp"

namespace benign::experiments {

ExcessRiskEstimator::ExcessRiskEstimator(datasets::DatasetKind kind, const EvalConfig& cfg, std::uint64_t seed) {
    if (kind == datasets::DatasetKind::synthetic) {
        if (cfg.mc_samples == 0) throw InvalidArgument("synthetic excess risk needs mc_samples >= 1");
        points_ = sphere::sample_sphere(cfg.dim, cfg.mc_samples, derive_seed(seed, "excess-mc")).matrix();
        targets_ = points_.col(cfg.dim - 1);
        return;
    }
    if (!cfg.test || cfg.test->n() == 0) {
        throw InvalidArgument("excess risk on real data needs a nonempty held-out test split");
    }
    if (!cfg.test->targets_clean) throw InvalidArgument("test split lacks clean targets");
    points_ = cfg.test->features;
    targets_ = *cfg.test->targets_clean;
}

double ExcessRiskEstimator::operator()(const BatchPredictor& predictor) const {
    const Eigen::VectorXd pred = predictor(points_);
    if (pred.size() != targets_.size()) throw InvalidArgument("predictor returned the wrong number of values");
    const double mse = (pred - targets_).squaredNorm() / static_cast<double>(targets_.size());
    if (!std::isfinite(mse)) throw NumericError("excess risk is not finite");
    return mse;
}

double excess_risk_estimate(const BatchPredictor& predictor, datasets::DatasetKind kind, const EvalConfig& cfg,
                            std::uint64_t seed) {
    return ExcessRiskEstimator(kind, cfg, seed)(predictor);
}

}  // namespace benign::experiments
