#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "benign/rng.hpp"

namespace benign::sphere {

/// Row-wise collection of points on S^{d-1}. Construction validates every row.
class UnitMatrix {
public:
    /// Wraps `rows` after checking n >= 1, d >= 2 and |‖row‖ - 1| <= tol.
    static UnitMatrix from_rows(Eigen::MatrixXd rows, double tol = 1e-9);

    /// Normalizes each row of `rows` (rows must be nonzero).
    static UnitMatrix normalized(Eigen::MatrixXd rows);

    const Eigen::MatrixXd& matrix() const noexcept { return rows_; }
    Eigen::Index n() const noexcept { return rows_.rows(); }
    Eigen::Index d() const noexcept { return rows_.cols(); }
    Eigen::VectorXd row(Eigen::Index i) const { return rows_.row(i).transpose(); }

private:
    explicit UnitMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {}
    Eigen::MatrixXd rows_;
};

/// Streams i.i.d. uniform points on S^{d-1} by normalizing Gaussian vectors.
class SphereSampler {
public:
    SphereSampler(int d, std::uint64_t seed);

    void next(Eigen::Ref<Eigen::VectorXd> out);
    Eigen::VectorXd next();

    int dim() const noexcept { return d_; }

private:
    int d_;
    SplitMix64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// n points i.i.d. uniform on S^{d-1}; deterministic in `seed`.
UnitMatrix sample_sphere(int d, std::size_t n, std::uint64_t seed);

using SphereFunction = std::function<double(const Eigen::VectorXd&)>;

/// Plain Monte-Carlo mean of f over `samples` fresh uniform points.
/// The points are exactly the rows sample_sphere(d, samples, seed) would return.
double mc_expectation(const SphereFunction& f, int d, std::size_t samples, std::uint64_t seed);

}  // namespace benign::sphere
