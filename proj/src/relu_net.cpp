#include "benign/relu_net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "benign/errors.hpp"
#include "benign/ntk.hpp"
#include "benign/rng.hpp"

namespace benign::relu_net {

namespace {

void check_inputs(const TwoLayerNet& net, const Eigen::MatrixXd& X) {
    if (X.cols() != net.dim()) {
        throw InvalidArgument("input dimension " + std::to_string(X.cols()) + " != network dimension " +
                              std::to_string(net.dim()));
    }
}

void check_targets(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (y.size() != X.rows()) {
        throw InvalidArgument("target length " + std::to_string(y.size()) + " != sample count " +
                              std::to_string(X.rows()));
    }
    if (X.rows() == 0) throw InvalidArgument("empty training sample");
}

/// Hand-blocked forward and gradient passes. The hidden layer is column-major,
/// so coordinate k of every neuron is one contiguous run.
class Kernels {
public:
    /// Samples are processed in chunks that stay in L1; neurons run in the
    /// outer loop so the per-sample updates vectorize.
    void forward(const TwoLayerNet& net, const Eigen::MatrixXd& X, Eigen::VectorXd& f) {
        const Eigen::Index m = net.width();
        const Eigen::Index n = X.rows();
        const Eigen::Index d = X.cols();
        f.setZero(n);
        w_.resize(d);
        double z[kSampleBlock];
        for (Eigen::Index i0 = 0; i0 < n; i0 += kSampleBlock) {
            const Eigen::Index b = std::min(kSampleBlock, n - i0);
            double* out = f.data() + i0;
            for (Eigen::Index j = 0; j < m; ++j) {
                for (Eigen::Index k = 0; k < d; ++k) w_[k] = net.hidden(j, k);
                for (Eigen::Index i = 0; i < b; ++i) z[i] = 0.0;
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double wk = w_[k];
                    const double* x = X.data() + k * n + i0;
                    for (Eigen::Index i = 0; i < b; ++i) z[i] += wk * x[i];
                }
                const double a = net.out_signs[j];
                for (Eigen::Index i = 0; i < b; ++i) out[i] += a * (z[i] > 0.0 ? z[i] : 0.0);
            }
        }
        f /= std::sqrt(static_cast<double>(m));
    }

    /// Gradient given residuals ξ = y - f. Samples run in the outer loop and
    /// neurons in the inner one, so every inner loop is a plain vector update.
    void gradient(const TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& residual,
                  Eigen::MatrixXd& grad) {
        const Eigen::Index m = net.width();
        const Eigen::Index n = X.rows();
        const Eigen::Index d = X.cols();
        grad.setZero(m, d);
        row_.resize(d);
        const double* W = net.hidden.data();  // column k holds coordinate k of every neuron
        double* G = grad.data();
        double z[kGradBlock];
        double s[kGradBlock];
        for (Eigen::Index j0 = 0; j0 < m; j0 += kGradBlock) {
            const Eigen::Index b = std::min(kGradBlock, m - j0);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index k = 0; k < d; ++k) row_[k] = X(i, k);
                const double xi = residual[i];
                for (Eigen::Index j = 0; j < b; ++j) z[j] = 0.0;
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double xk = row_[k];
                    const double* w = W + k * m + j0;
                    for (Eigen::Index j = 0; j < b; ++j) z[j] += xk * w[j];
                }
                for (Eigen::Index j = 0; j < b; ++j) s[j] = z[j] > 0.0 ? xi : 0.0;
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double xk = row_[k];
                    double* g = G + k * m + j0;
                    for (Eigen::Index j = 0; j < b; ++j) g[j] += s[j] * xk;
                }
            }
        }
        const double scale = -2.0 / (static_cast<double>(n) * std::sqrt(static_cast<double>(m)));
        grad = (scale * net.out_signs).asDiagonal() * grad;
    }

private:
    static constexpr Eigen::Index kGradBlock = 256;
    static constexpr Eigen::Index kSampleBlock = 256;

    Eigen::VectorXd row_;
    Eigen::VectorXd w_;
};

}  // namespace

Initialized init_antisymmetric(Eigen::Index m, Eigen::Index d, std::uint64_t seed) {
    if (m < 2 || m % 2 != 0) throw InvalidArgument("network width must be even and >= 2, got " + std::to_string(m));
    if (d < 1) throw InvalidArgument("input dimension must be positive");
    const Eigen::Index half = m / 2;
    TwoLayerNet net;
    net.hidden.resize(m, d);
    net.out_signs.resize(m);
    SplitMix64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < half; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) net.hidden(j, k) = normal(engine);
        net.out_signs[j] = (engine() >> 63) ? 1.0 : -1.0;
    }
    net.hidden.bottomRows(half) = net.hidden.topRows(half);
    net.out_signs.tail(half) = -net.out_signs.head(half);
    InitSnapshot snapshot(net.hidden);
    return {std::move(net), std::move(snapshot)};
}

Eigen::VectorXd forward(const TwoLayerNet& net, const Eigen::MatrixXd& X) {
    check_inputs(net, X);
    Kernels k;
    Eigen::VectorXd f;
    k.forward(net, X, f);
    return f;
}

Eigen::MatrixXd grad_empirical(const TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    check_inputs(net, X);
    check_targets(X, y);
    Kernels k;
    Eigen::VectorXd f;
    k.forward(net, X, f);
    Eigen::MatrixXd grad;
    k.gradient(net, X, y - f, grad);
    return grad;
}

void gd_step(TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lr) {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw InvalidArgument("learning rate must be finite and >= 0");
    const Eigen::MatrixXd grad = grad_empirical(net, X, y);
    if (!grad.allFinite()) throw NumericError("non-finite gradient");
    net.hidden.noalias() -= lr * grad;
}

Drift weight_drift(const TwoLayerNet& net, const InitSnapshot& snapshot) {
    if (net.hidden.rows() != snapshot.hidden().rows() || net.hidden.cols() != snapshot.hidden().cols()) {
        throw InvalidArgument("snapshot shape does not match the network");
    }
    Drift out;
    out.max_row_drift = (net.hidden - snapshot.hidden()).rowwise().norm().maxCoeff();
    out.radius = 32.0 * std::sqrt(static_cast<double>(net.dim()) / static_cast<double>(net.width()));
    return out;
}

LogSchedule LogSchedule::geometric(double ratio) {
    if (!(ratio > 1.0)) throw InvalidArgument("geometric log ratio must exceed 1");
    return LogSchedule(true, ratio, 0);
}

LogSchedule LogSchedule::every(std::size_t k) {
    if (k == 0) throw InvalidArgument("log step must be positive");
    return LogSchedule(false, 0.0, k);
}

LogSchedule LogSchedule::parse(const std::string& text) {
    if (text == "geometric") return geometric();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "geometric" && !arg.empty()) {
        double ratio = 0.0;
        const auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), ratio);
        if (ec == std::errc() && p == arg.data() + arg.size()) return geometric(ratio);
    } else if (head == "every" && !arg.empty()) {
        std::size_t k = 0;
        const auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
        if (ec == std::errc() && p == arg.data() + arg.size()) return every(k);
    }
    throw InvalidArgument("unrecognized log schedule '" + text + "'");
}

std::vector<std::size_t> LogSchedule::points(std::size_t iters) const {
    std::vector<std::size_t> out;
    if (geometric_) {
        std::size_t t = 0;
        while (t < iters) {
            out.push_back(t);
            if (t < 10) {
                ++t;
            } else {
                const auto next = static_cast<std::size_t>(std::floor(static_cast<double>(t) * ratio_));
                t = std::max(t + 1, next);
            }
        }
    } else {
        for (std::size_t t = 0; t < iters; t += step_) out.push_back(t);
    }
    out.push_back(iters);
    return out;
}

std::string LogSchedule::describe() const {
    std::ostringstream s;
    if (geometric_) {
        s << "geometric:" << ratio_;
    } else {
        s << "every:" << step_;
    }
    return s.str();
}

TrainResult train(TwoLayerNet& net, const InitSnapshot& snapshot, const datasets::LabeledDataset& dataset,
                  const TrainConfig& cfg, std::uint64_t eval_seed) {
    if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) throw InvalidArgument("learning rate must be finite and >= 0");
    const Eigen::MatrixXd& X = dataset.features;
    const Eigen::VectorXd& y = dataset.targets_noisy;
    check_inputs(net, X);
    check_targets(X, y);

    const experiments::ExcessRiskEstimator excess(dataset.kind, cfg.eval, eval_seed);
    const auto logged = cfg.schedule.points(cfg.iters);
    const double n = static_cast<double>(X.rows());

    TrainResult result;
    result.curve.meta.dataset = dataset.kind;
    result.curve.meta.model = experiments::ModelFamily::nn;
    result.curve.meta.n = static_cast<std::size_t>(X.rows());
    result.curve.meta.m_or_gammas = static_cast<std::size_t>(net.width());
    result.curve.meta.lr = cfg.lr;
    result.curve.meta.noise_std = dataset.noise_std;
    const bool eigen_enabled = cfg.diagnostics && X.rows() <= cfg.diagnostics_max_n;
    result.diagnostics.eigen_skipped = cfg.diagnostics && !eigen_enabled;

    Kernels train_kernels;
    Kernels eval_kernels;
    Eigen::VectorXd f;
    Eigen::VectorXd residual;
    Eigen::MatrixXd grad;
    std::size_t next_log = 0;

    for (std::size_t t = 0;; ++t) {
        train_kernels.forward(net, X, f);
        residual = y - f;
        const double risk = residual.squaredNorm() / n;
        if (!std::isfinite(risk) || risk > cfg.divergence_threshold) throw DivergenceError(t, risk);

        if (next_log < logged.size() && logged[next_log] == t) {
            ++next_log;
            const double exc = excess([&](const Eigen::MatrixXd& P) {
                Eigen::VectorXd out;
                eval_kernels.forward(net, P, out);
                return out;
            });
            result.curve.push(t, risk, exc);
            if (cfg.diagnostics) {
                DiagnosticsRow row;
                row.iteration = t;
                if (eigen_enabled) row.min_eig_empirical_gram = ntk::min_eigenvalue(ntk::gram_empirical(net.hidden, X));
                const Drift drift = weight_drift(net, snapshot);
                row.max_drift = drift.max_row_drift;
                row.drift_radius = drift.radius;
                result.diagnostics.rows.push_back(row);
            }
        }
        if (t == cfg.iters) break;

        train_kernels.gradient(net, X, residual, grad);
        if (!grad.allFinite()) throw NumericError("non-finite gradient at iteration " + std::to_string(t));
        net.hidden.noalias() -= cfg.lr * grad;
    }
    return result;
}

void write_diagnostics_csv(std::ostream& out, const DiagnosticsTrace& trace) {
    out << "iteration,min_eig_empirical_gram,max_drift,drift_radius\n";
    const auto old_precision = out.precision(17);
    for (const auto& r : trace.rows) {
        out << r.iteration << ',';
        if (std::isnan(r.min_eig_empirical_gram)) {
            out << "nan";
        } else {
            out << r.min_eig_empirical_gram;
        }
        out << ',' << r.max_drift << ',' << r.drift_radius << '\n';
    }
    out.precision(old_precision);
}

}  // namespace benign::relu_net
