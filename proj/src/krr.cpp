#include "benign/krr.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include <Eigen/Cholesky>

#include "benign/errors.hpp"

namespace benign::krr {

namespace {

void check_fit_inputs(const sphere::UnitMatrix& X, const Eigen::VectorXd& y, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive and finite");
    if (y.size() != X.n()) {
        throw InvalidArgument("target length " + std::to_string(y.size()) + " != sample count " +
                              std::to_string(X.n()));
    }
    if (!y.allFinite()) throw InvalidArgument("targets must be finite");
}

}  // namespace

KrrModel krr_fit(const sphere::UnitMatrix& X, const Eigen::VectorXd& y, double gamma) {
    check_fit_inputs(X, y, gamma);
    return krr_fit(X, ntk::gram_analytic(X), y, gamma);
}

KrrModel krr_fit(const sphere::UnitMatrix& X, const ntk::GramMatrix& H, const Eigen::VectorXd& y, double gamma) {
    check_fit_inputs(X, y, gamma);
    if (H.size() != X.n()) throw InvalidArgument("Gram size does not match the sample count");
    const Eigen::Index n = X.n();
    Eigen::MatrixXd A = H.values;
    A.diagonal().array() += static_cast<double>(n) * gamma;

    double jitter = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        jitter = 1e-12 * A.trace() / static_cast<double>(n);
        Eigen::MatrixXd Aj = A;
        Aj.diagonal().array() += jitter;
        llt.compute(Aj);
        if (llt.info() != Eigen::Success) throw NumericError("Cholesky of H + n*gamma*I failed even with jitter");
    }
    Eigen::VectorXd alpha = llt.solve(y);
    const double residual = (A * alpha - y).norm();
    if (!alpha.allFinite() || residual > 1e-8 * y.norm() + 1e-300) {
        throw NumericError("dual solve residual " + std::to_string(residual) + " exceeds 1e-8 * ||y||");
    }
    return KrrModel{gamma, X, std::move(alpha), jitter};
}

Eigen::VectorXd krr_predict(const KrrModel& model, const sphere::UnitMatrix& X_eval) {
    return ntk::kernel_matrix(X_eval, model.train_inputs) * model.dual_coeffs;
}

double empirical_risk(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
    if (predictions.size() != targets.size()) {
        throw InvalidArgument("prediction length " + std::to_string(predictions.size()) + " != target length " +
                              std::to_string(targets.size()));
    }
    if (targets.size() == 0) throw InvalidArgument("empirical risk of an empty sample");
    return (predictions - targets).squaredNorm() / static_cast<double>(targets.size());
}

std::pair<double, double> residual_identity(const KrrModel& model, const Eigen::VectorXd& y) {
    const auto H = ntk::gram_analytic(model.train_inputs);
    const Eigen::Index n = H.size();
    if (y.size() != n) throw InvalidArgument("target length does not match the model");
    const double lhs = empirical_risk(H.values * model.dual_coeffs, y);

    Eigen::MatrixXd B = H.values / static_cast<double>(n);
    B.diagonal().array() += model.gamma;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(B);
    if (ldlt.info() != Eigen::Success) throw NumericError("LDLT of H/n + gamma*I failed");
    const Eigen::VectorXd z = ldlt.solve(y);
    const double rhs = model.gamma * model.gamma / static_cast<double>(n) * z.squaredNorm();
    return {lhs, rhs};
}

AssumptionReport check_assumption_krr(const AssumptionParams& p) {
    AssumptionReport r;
    r.dimension_vs_delta.lhs = std::exp(-p.d);
    r.dimension_vs_delta.rhs = p.delta / 4.0;
    r.dimension_vs_delta.holds = r.dimension_vs_delta.lhs <= r.dimension_vs_delta.rhs;

    r.samples_vs_dimension.lhs = std::sqrt(p.n) - p.C * std::sqrt(p.d);
    r.samples_vs_dimension.rhs = 2.0 / std::sqrt(5.0) * std::sqrt(p.n);
    r.samples_vs_dimension.holds = r.samples_vs_dimension.lhs >= r.samples_vs_dimension.rhs;

    const double ratio = p.gamma / (p.gamma + 1.0 / (5.0 * p.d));
    r.shrinkage.lhs = ratio * ratio;
    r.shrinkage.rhs = p.eps;
    r.shrinkage.holds = r.shrinkage.lhs <= r.shrinkage.rhs;

    r.approximation.lhs = p.gamma * p.f_eps_norm * p.f_eps_norm;
    r.approximation.rhs = p.eps / 8.0;
    r.approximation.holds = r.approximation.lhs <= r.approximation.rhs;

    const double inv = 1.0 + 1.0 / p.gamma;
    r.estimation.lhs = p.n;
    r.estimation.rhs = 16.0 * inv * inv * std::log(4.0 / p.delta) / (p.gamma * p.gamma * p.eps);
    r.estimation.holds = r.estimation.lhs >= r.estimation.rhs;
    return r;
}

void print_report(std::ostream& out, const AssumptionReport& r) {
    const auto line = [&](const char* name, const char* relation, const Inequality& q) {
        out << "  " << std::left << std::setw(34) << name << std::setprecision(6) << q.lhs << ' ' << relation << ' '
            << q.rhs << "  -> " << (q.holds ? "ok" : "FAIL") << '\n';
    };
    out << "clause (i): " << (r.clause_i() ? "satisfied" : "violated") << '\n';
    line("exp(-d) <= delta/4", "vs", r.dimension_vs_delta);
    line("sqrt(n)-C*sqrt(d) >= 2/sqrt5*sqrt(n)", "vs", r.samples_vs_dimension);
    line("(gamma/(gamma+1/(5d)))^2 <= eps", "vs", r.shrinkage);
    out << "clause (ii): " << (r.clause_ii() ? "satisfied" : "violated") << '\n';
    line("gamma*|f_eps|_H^2 <= eps/8", "vs", r.approximation);
    out << "clause (iii): " << (r.clause_iii() ? "satisfied" : "violated") << '\n';
    line("n >= 16(1+1/g)^2 log(4/delta)/(g^2 eps)", "vs", r.estimation);
}

std::vector<SweepRecord> krr_complexity_sweep(const datasets::LabeledDataset& dataset,
                                              const std::vector<double>& gammas,
                                              const experiments::EvalConfig& eval, std::uint64_t eval_seed) {
    for (double g : gammas) {
        if (!(g > 0.0)) throw InvalidArgument("every gamma in a sweep must be positive");
    }
    const auto X = sphere::UnitMatrix::from_rows(dataset.features);
    const auto H = ntk::gram_analytic(X);
    const double lambda_min = ntk::min_eigenvalue(H);
    const experiments::ExcessRiskEstimator excess(dataset.kind, eval, eval_seed);

    std::vector<SweepRecord> out;
    out.reserve(gammas.size());
    for (double g : gammas) {
        const KrrModel model = krr_fit(X, H, dataset.targets_noisy, g);
        const double emp = empirical_risk(H.values * model.dual_coeffs, dataset.targets_noisy);
        const double exc = excess([&](const Eigen::MatrixXd& P) {
            return krr_predict(model, sphere::UnitMatrix::from_rows(P));
        });
        out.push_back({g, X.n(), emp, exc, lambda_min});
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << "gamma,n,empirical_risk,excess_risk,lambda_min\n";
    const auto old_precision = out.precision(17);
    for (const auto& r : records) {
        out << r.gamma << ',' << r.n << ',' << r.empirical_risk << ',' << r.excess_risk << ',' << r.lambda_min << '\n';
    }
    out.precision(old_precision);
}

}  // namespace benign::krr
