#pragma once

/**
 * @file ntk.hpp
 * @brief Arc-cosine neural tangent kernel on the sphere.
 *
 * The kernel is κ(x, x') = t (1/2 - arccos(t) / 2π) with t = x·x'. Its integral
 * operator H f(x) = E_{x'}[f(x') κ(x', x)] under the uniform measure on
 * S^{d-1} is diagonalized by spherical harmonics; the eigenvalue for order h
 * is available in closed form for h <= 2 and odd h, and as a convergent Beta
 * series for even h >= 4.
 */

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "benign/sphere.hpp"

namespace benign::ntk {

/// Highest Legendre order the explicit sum is trusted for.
inline constexpr int kMaxLegendreOrder = 60;
/// Default relative truncation tolerance for the even-order eigenvalue series.
inline constexpr double kDefaultSeriesTol = 1e-12;
/// Term cap for the even-order eigenvalue series.
inline constexpr std::size_t kSeriesTermCap = 2'000'000;

/// κ as a function of the inner product, t clamped to [-1, 1].
double kernel_of_dot(double t) noexcept;

/// κ(x, x') for unit vectors; throws InvalidArgument if either norm is off by more than 1e-9.
double ntk_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& xp);

/// Truncated power series of κ(t) keeping summands r = 1..terms of the Beta tail.
double ntk_taylor(double t, std::size_t terms);

enum class GramSource { analytical, empirical };

struct GramMatrix {
    Eigen::MatrixXd values;
    GramSource source = GramSource::analytical;

    Eigen::Index size() const noexcept { return values.rows(); }
};

/// Analytical Gram H_ij = κ(x_i, x_j).
GramMatrix gram_analytic(const sphere::UnitMatrix& X);

/// Cross-kernel K_ij = κ(a_i, b_j) between two point sets of equal dimension.
Eigen::MatrixXd kernel_matrix(const sphere::UnitMatrix& A, const sphere::UnitMatrix& B);

/// m-neuron empirical NTK Gram (1/m) (X Xᵀ) ⊙ (1{X Wᵀ > 0} 1{W Xᵀ > 0}).
/// X rows are used as given (need not be unit norm).
GramMatrix gram_empirical(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X);

/// Legendre polynomial P_h(d; z) of order h in d dimensions, normalized so P_h(d; 1) = 1.
double legendre(int d, int h, double z);

/// Dimension N(d, h) of the order-h spherical harmonics on S^{d-1}.
std::uint64_t harmonic_multiplicity(int d, int h);

/// Eigenvalue μ_h / |S^{d-1}| of the kernel operator for harmonic order h.
/// Throws ConvergenceError when the even-order series needs more than max_terms terms.
double eigenvalue(int d, int h, double tol = kDefaultSeriesTol, std::size_t max_terms = kSeriesTermCap);

struct SpectrumEntry {
    int order = 0;
    double eigenvalue = 0.0;
    std::uint64_t multiplicity = 0;
};

/// Entries for h = 0..max_h.
std::vector<SpectrumEntry> spectrum(int d, int max_h, double tol = kDefaultSeriesTol);

/// CSV with header `h,eigenvalue,multiplicity`.
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumEntry>& entries);

/// Monte-Carlo estimate of (H f)(x).
double operator_apply_mc(const Eigen::VectorXd& x, const sphere::SphereFunction& f,
                         std::size_t samples, std::uint64_t seed);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& G);
inline double min_eigenvalue(const GramMatrix& G) { return min_eigenvalue(G.values); }

/// Spectral norm of a symmetric matrix (largest absolute eigenvalue).
double spectral_norm_symmetric(const Eigen::MatrixXd& M);

}  // namespace benign::ntk
