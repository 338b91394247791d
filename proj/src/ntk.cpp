#include "benign/ntk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "benign/errors.hpp"

namespace benign::ntk {

namespace {

constexpr double kPi = std::numbers::pi;

double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

/// log(k!!) with the conventions 0!! = (-1)!! = 1.
double log_double_factorial(int k) {
    double s = 0.0;
    for (int j = k; j > 1; j -= 2) s += std::log(static_cast<double>(j));
    return s;
}

void check_unit(const Eigen::VectorXd& v, const char* name) {
    const double norm = v.norm();
    if (!(std::abs(norm - 1.0) <= 1e-9)) {
        throw InvalidArgument(std::string(name) + " is not a unit vector (norm " +
                              std::to_string(norm) + ")");
    }
}

/// κ evaluated through the angle between two unit vectors. The half-chord
/// form keeps the angle accurate when the points nearly coincide or are
/// nearly antipodal, where arccos of the dot product loses half its digits.
template <typename A, typename B>
double kernel_of_points(const A& x, const B& xp) {
    const double t = x.dot(xp);
    double theta;
    if (t >= 0.0) {
        const double chord = (x - xp).norm();
        theta = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
    } else {
        const double chord = (x + xp).norm();
        theta = kPi - 2.0 * std::asin(std::min(1.0, 0.5 * chord));
    }
    const double tc = std::clamp(t, -1.0, 1.0);
    return tc * (0.5 - theta / (2.0 * kPi));
}

/// Nodes and weights of the 20-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre20 {
    double x[20];
    double w[20];
    GaussLegendre20() {
        constexpr int n = 20;
        for (int i = 0; i < n; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = 0.0;
                for (int k = 1; k <= n; ++k) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
                }
                dp = n * (z * p0 - p1) / (z * z - 1.0);
                const double step = p0 / dp;
                z -= step;
                if (std::abs(step) < 1e-16) break;
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

/// log Γ(z + a) - log Γ(z + b). For large z the lgamma values themselves carry
/// an absolute error near ulp(z log z), so the difference is taken from the
/// asymptotic expansion (a - b) log z + Σ (-1)^n (B_n(a) - B_n(b)) / (n (n-1) z^{n-1}).
double log_gamma_ratio(double z, double a, double b) {
    const double shift = std::max(std::abs(a), std::abs(b)) + 1.0;
    if (z < std::max(1e4, 100.0 * shift)) return log_gamma(z + a) - log_gamma(z + b);
    static constexpr double bernoulli[13] = {1.0,          -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0,
                                             1.0 / 42.0,   0.0,  -1.0 / 30.0, 0.0, 5.0 / 66.0, 0.0,
                                             -691.0 / 2730.0};
    const auto bernoulli_poly = [](int n, double x) {
        double sum = 0.0;
        double binom = 1.0;
        for (int k = 0; k <= n; ++k) {
            sum += binom * bernoulli[k] * std::pow(x, n - k);
            binom = binom * (n - k) / (k + 1);
        }
        return sum;
    };
    double out = (a - b) * std::log(z);
    double zpow = z;
    for (int n = 2; n <= 12; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        out += sign * (bernoulli_poly(n, a) - bernoulli_poly(n, b)) / (n * (n - 1.0) * zpow);
        zpow *= z;
    }
    return out;
}

/// Term r of the even-order series, continued to real r >= h/2 - 1.
class EvenOrderTerm {
public:
    EvenOrderTerm(int d, int h) : h_(h), a_(0.5 * (d - 1)) {
        log_prefactor_ = std::log(static_cast<double>(h)) + log_beta(h, a_) - (h + 1) * std::log(2.0) -
                         std::log(kPi) - log_beta(a_, 0.5) - log_gamma(h + 1.0);
    }

    double operator()(double r) const {
        // C(2r+2, h) h! as a falling factorial keeps full precision for large r.
        double log_falling = 0.0;
        for (int k = 0; k < h_; ++k) log_falling += std::log(2.0 * r + 2.0 - k);
        // B(1/2, r) and B(r + 3/2 - h/2, h + a) through Gamma ratios in r.
        const double log_beta_half = log_gamma(0.5) + log_gamma_ratio(r, 0.0, 0.5);
        const double log_beta_tail = log_gamma(h_ + a_) + log_gamma_ratio(r, 1.5 - 0.5 * h_, 1.5 + 0.5 * h_ + a_);
        const double log_term = log_falling - log_beta_half - std::log(r) - std::log1p(2.0 * r) + log_beta_tail;
        return std::exp(log_prefactor_ + log_term);
    }

private:
    int h_;
    double a_;
    double log_prefactor_;
};

/// Sum of the terms with index > N by Euler-Maclaurin:
/// integral of T over [N, inf) - T(N)/2 - T'(N)/12 + T'''(N)/720. The integral
/// runs over x = N e^u, where the power-law decay becomes exponential.
double even_order_tail(const EvenOrderTerm& T, double N) {
    static const GaussLegendre20 gl;
    double integral = 0.0;
    // Beyond x = 1e30 N the remaining mass is below 1e-40 of the integral.
    for (double u0 = 0.0; u0 < 70.0; u0 += 0.5) {
        double piece = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double u = u0 + 0.25 * (gl.x[i] + 1.0);
            const double x = N * std::exp(u);
            piece += gl.w[i] * T(x) * x;
        }
        piece *= 0.25;
        integral += piece;
        if (piece < 1e-18 * integral) break;
    }
    const double s = std::max(0.5, N / 64.0);
    const double fp = T(N + s);
    const double fm = T(N - s);
    const double fpp = T(N + 2.0 * s);
    const double fmm = T(N - 2.0 * s);
    const double d1 = (fp - fm) / (2.0 * s);
    const double d3 = (fpp - 2.0 * fp + 2.0 * fm - fmm) / (2.0 * s * s * s);
    return integral - 0.5 * T(N) - d1 / 12.0 + d3 / 720.0;
}

/// Sums terms directly up to N, adds the Euler-Maclaurin tail, and doubles
/// N until two successive estimates agree to within tol.
double even_order_series(int d, int h, double tol, std::size_t max_terms) {
    const EvenOrderTerm T(d, h);
    const long r0 = h / 2 - 1;
    long N = r0 + std::max<long>(64, 2L * h * h);
    double partial = 0.0;
    long next = r0;
    const auto extend = [&](long upto) {
        for (; next <= upto; ++next) partial += T(static_cast<double>(next));
    };
    extend(N);
    double previous = partial + even_order_tail(T, static_cast<double>(N));
    while (static_cast<std::size_t>(next - r0) < max_terms) {
        N *= 2;
        extend(N);
        const double estimate = partial + even_order_tail(T, static_cast<double>(N));
        if (std::abs(estimate - previous) <= tol * estimate) return estimate;
        previous = estimate;
    }
    throw ConvergenceError("eigenvalue series for d=" + std::to_string(d) + ", h=" + std::to_string(h) +
                               " did not reach tolerance",
                           partial, static_cast<std::size_t>(next - r0));
}

}  // namespace

double kernel_of_dot(double t) noexcept {
    const double tc = std::clamp(t, -1.0, 1.0);
    return tc * (0.5 - std::acos(tc) / (2.0 * kPi));
}

double ntk_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) {
    if (x.size() != xp.size()) throw InvalidArgument("ntk_eval: dimension mismatch");
    check_unit(x, "x");
    check_unit(xp, "x'");
    return kernel_of_points(x, xp);
}

double ntk_taylor(double t, std::size_t terms) {
    if (!(std::abs(t) <= 1.0)) throw InvalidArgument("ntk_taylor: |t| must be <= 1");
    double value = t / 4.0 + t * t / (2.0 * kPi);
    double tail = 0.0;
    const double t2 = t * t;
    double power = t2 * t2;  // t^{2r+2} at r = 1
    for (std::size_t r = 1; r <= terms; ++r) {
        const double rd = static_cast<double>(r);
        tail += power * std::exp(-log_beta(0.5, rd)) / (rd * (1.0 + 2.0 * rd));
        power *= t2;
    }
    return value + tail / (2.0 * kPi);
}

GramMatrix gram_analytic(const sphere::UnitMatrix& X) {
    const auto& P = X.matrix();
    const Eigen::Index n = P.rows();
    Eigen::MatrixXd H(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        H(j, j) = 0.5;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double k = kernel_of_points(P.row(i), P.row(j));
            H(i, j) = k;
            H(j, i) = k;
        }
    }
    return {std::move(H), GramSource::analytical};
}

Eigen::MatrixXd kernel_matrix(const sphere::UnitMatrix& A, const sphere::UnitMatrix& B) {
    if (A.d() != B.d()) throw InvalidArgument("kernel_matrix: dimension mismatch");
    const auto& PA = A.matrix();
    const auto& PB = B.matrix();
    Eigen::MatrixXd K(PA.rows(), PB.rows());
    for (Eigen::Index j = 0; j < PB.rows(); ++j) {
        for (Eigen::Index i = 0; i < PA.rows(); ++i) K(i, j) = kernel_of_points(PA.row(i), PB.row(j));
    }
    return K;
}

GramMatrix gram_empirical(const Eigen::MatrixXd& W, const Eigen::MatrixXd& X) {
    if (W.rows() < 1) throw InvalidArgument("gram_empirical: need at least one neuron");
    if (W.cols() != X.cols()) {
        throw InvalidArgument("gram_empirical: weight dimension " + std::to_string(W.cols()) +
                              " != input dimension " + std::to_string(X.cols()));
    }
    const Eigen::MatrixXd active = ((X * W.transpose()).array() > 0.0).cast<double>().matrix();
    Eigen::MatrixXd H = (X * X.transpose()).cwiseProduct(active * active.transpose());
    H /= static_cast<double>(W.rows());
    return {std::move(H), GramSource::empirical};
}

double legendre(int d, int h, double z) {
    if (d < 2) throw InvalidArgument("legendre: d must be >= 2");
    if (h < 0) throw InvalidArgument("legendre: order must be nonnegative");
    if (h > kMaxLegendreOrder) {
        throw UnsupportedOrder("legendre order " + std::to_string(h) + " exceeds " +
                               std::to_string(kMaxLegendreOrder));
    }
    if (!(std::abs(z) <= 1.0)) throw InvalidArgument("legendre: |z| must be <= 1");
    const double a = 0.5 * (d - 1);
    const double log_lead = log_gamma(h + 1.0) + log_gamma(a);
    const double one_minus_z2 = 1.0 - z * z;
    double sum = 0.0;
    for (int r = 0; r <= h / 2; ++r) {
        const double log_coef = log_lead - r * std::log(4.0) - log_gamma(r + 1.0) -
                                log_gamma(h - 2.0 * r + 1.0) - log_gamma(r + a);
        const double sign = (r % 2 == 0) ? 1.0 : -1.0;
        sum += sign * std::exp(log_coef) * std::pow(one_minus_z2, r) * std::pow(z, h - 2 * r);
    }
    return sum;
}

std::uint64_t harmonic_multiplicity(int d, int h) {
    if (d < 2) throw InvalidArgument("multiplicity: d must be >= 2");
    if (h < 0) throw InvalidArgument("multiplicity: order must be nonnegative");
    if (h == 0) return 1;
    if (h == 1) return static_cast<std::uint64_t>(d);
    if (d == 2) return 2;
    // N = (2h + d - 2) / (d - 2) * C(h + d - 3, h); the product is divisible by d - 2.
    const std::uint64_t top = static_cast<std::uint64_t>(h + d - 3);
    const std::uint64_t k = std::min<std::uint64_t>(static_cast<std::uint64_t>(h), top - h);
    std::uint64_t binom = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        std::uint64_t next = 0;
        if (__builtin_mul_overflow(binom, top - k + i, &next)) {
            throw InvalidArgument("multiplicity overflows 64 bits");
        }
        binom = next / i;
    }
    std::uint64_t scaled = 0;
    if (__builtin_mul_overflow(binom, static_cast<std::uint64_t>(2 * h + d - 2), &scaled)) {
        throw InvalidArgument("multiplicity overflows 64 bits");
    }
    return scaled / static_cast<std::uint64_t>(d - 2);
}

double eigenvalue(int d, int h, double tol, std::size_t max_terms) {
    if (d < 2) throw InvalidArgument("eigenvalue: d must be >= 2");
    if (h < 0) throw InvalidArgument("eigenvalue: order must be nonnegative");
    if (!(tol > 0.0)) throw InvalidArgument("eigenvalue: tol must be positive");
    if (h == 0) {
        const double log_ratio = log_double_factorial(d - 2) - log_double_factorial(d - 1);
        const double denom = (d % 2 == 0) ? kPi : 2.0;
        const double root = std::exp(log_ratio) / denom;
        return root * root;
    }
    if (h == 1) return 1.0 / (4.0 * d);
    if (h % 2 == 1) return 0.0;
    const double a = 0.5 * (d - 1);
    if (h == 2) {
        const double scale = std::exp(log_beta(a, 2.0) - log_beta(a, 0.5)) / (8.0 * kPi);
        return scale * (std::exp(log_beta(0.5 * d, 0.5)) + std::exp(log_beta(0.5 * d + 1.0, 0.5)));
    }
    return even_order_series(d, h, tol, max_terms);
}

std::vector<SpectrumEntry> spectrum(int d, int max_h, double tol) {
    if (max_h < 1) throw InvalidArgument("spectrum: max_h must be >= 1");
    std::vector<SpectrumEntry> out;
    out.reserve(static_cast<std::size_t>(max_h) + 1);
    for (int h = 0; h <= max_h; ++h) {
        out.push_back({h, eigenvalue(d, h, tol), harmonic_multiplicity(d, h)});
    }
    return out;
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumEntry>& entries) {
    out << "h,eigenvalue,multiplicity\n";
    const auto old_precision = out.precision(17);
    for (const auto& e : entries) out << e.order << ',' << e.eigenvalue << ',' << e.multiplicity << '\n';
    out.precision(old_precision);
}

double operator_apply_mc(const Eigen::VectorXd& x, const sphere::SphereFunction& f, std::size_t samples,
                         std::uint64_t seed) {
    check_unit(x, "evaluation point");
    return sphere::mc_expectation(
        [&](const Eigen::VectorXd& xp) {
            const double fv = f(xp);
            if (fv == 0.0) return 0.0;
            return fv * kernel_of_points(xp, x);
        },
        static_cast<int>(x.size()), samples, seed);
}

double min_eigenvalue(const Eigen::MatrixXd& G) {
    if (G.rows() == 0 || G.rows() != G.cols()) throw InvalidArgument("min_eigenvalue: need a square nonempty matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(G, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("symmetric eigen-solve failed");
    return solver.eigenvalues().minCoeff();
}

double spectral_norm_symmetric(const Eigen::MatrixXd& M) {
    if (M.rows() == 0 || M.rows() != M.cols()) throw InvalidArgument("spectral_norm: need a square nonempty matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("symmetric eigen-solve failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace benign::ntk
