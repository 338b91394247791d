#include "benign/sphere.hpp"

#include <cmath>
#include <string>

#include "benign/errors.hpp"

namespace benign::sphere {

namespace {

void check_shape(Eigen::Index n, Eigen::Index d) {
    if (d < 2) throw InvalidArgument("sphere dimension must be >= 2, got " + std::to_string(d));
    if (n < 1) throw InvalidArgument("point count must be >= 1");
}

}  // namespace

UnitMatrix UnitMatrix::from_rows(Eigen::MatrixXd rows, double tol) {
    check_shape(rows.rows(), rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const double norm = rows.row(i).norm();
        if (!(std::abs(norm - 1.0) <= tol)) {
            throw InvalidArgument("row " + std::to_string(i) + " has norm " + std::to_string(norm) +
                                  ", expected a unit vector");
        }
    }
    return UnitMatrix(std::move(rows));
}

UnitMatrix UnitMatrix::normalized(Eigen::MatrixXd rows) {
    check_shape(rows.rows(), rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const double norm = rows.row(i).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw InvalidArgument("row " + std::to_string(i) + " cannot be normalized");
        }
        rows.row(i) /= norm;
    }
    return UnitMatrix(std::move(rows));
}

SphereSampler::SphereSampler(int d, std::uint64_t seed) : d_(d), engine_(seed) {
    if (d < 2) throw InvalidArgument("sphere dimension must be >= 2, got " + std::to_string(d));
}

void SphereSampler::next(Eigen::Ref<Eigen::VectorXd> out) {
    double norm2 = 0.0;
    // A zero Gaussian vector has probability zero but would poison the stream.
    do {
        for (int k = 0; k < d_; ++k) out[k] = normal_(engine_);
        norm2 = out.squaredNorm();
    } while (norm2 == 0.0);
    out /= std::sqrt(norm2);
}

Eigen::VectorXd SphereSampler::next() {
    Eigen::VectorXd v(d_);
    next(v);
    return v;
}

UnitMatrix sample_sphere(int d, std::size_t n, std::uint64_t seed) {
    check_shape(static_cast<Eigen::Index>(n), d);
    SphereSampler sampler(d, seed);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(n), d);
    Eigen::VectorXd point(d);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        sampler.next(point);
        rows.row(i) = point.transpose();
    }
    return UnitMatrix::from_rows(std::move(rows), 1e-12);
}

double mc_expectation(const SphereFunction& f, int d, std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw InvalidArgument("mc_expectation needs at least one sample");
    SphereSampler sampler(d, seed);
    Eigen::VectorXd point(d);
    double sum = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        sampler.next(point);
        const double v = f(point);
        if (!std::isfinite(v)) throw NonFiniteValue("mc_expectation", i);
        sum += v;
    }
    return sum / static_cast<double>(samples);
}

}  // namespace benign::sphere
