#include "benign/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "benign/errors.hpp"
#include "benign/io.hpp"
#include "benign/relu_net.hpp"
#include "benign/sphere.hpp"

namespace benign::commands {

namespace fs = std::filesystem;

namespace {

std::size_t to_count(const std::string& key, std::int64_t v, std::int64_t min = 1) {
    if (v < min) throw ConfigError("key '" + key + "': must be >= " + std::to_string(min) + ", got " + std::to_string(v));
    return static_cast<std::size_t>(v);
}

std::uint64_t env_seed_override(std::uint64_t fallback) {
    const char* env = std::getenv("BENIGN_LAB_SEED");
    if (env == nullptr || *env == '\0') return fallback;
    const std::string text(env);
    std::uint64_t seed = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc() || p != text.data() + text.size()) {
        throw ConfigError("BENIGN_LAB_SEED must be a nonnegative integer, got '" + text + "'");
    }
    return seed;
}

fs::path resolve_dataset_path(const config::RunConfig& cfg, datasets::DatasetKind kind) {
    fs::path path = cfg.get_string("dataset.path");
    if (!fs::is_directory(path)) return path;
    if (kind == datasets::DatasetKind::abalone) return path / "abalone.data";
    const std::string variant = cfg.get_string("wine_variant", "red");
    if (variant != "red" && variant != "white") {
        throw ConfigError("key 'wine_variant': expected red or white, got '" + variant + "'");
    }
    return path / ("winequality-" + variant + ".csv");
}

void print_curve_table(std::ostream& log, const experiments::RiskCurve& curve) {
    log << std::setw(10) << "iteration" << std::setw(16) << "empirical" << std::setw(16) << "excess" << '\n';
    for (std::size_t k = 0; k < curve.size(); ++k) {
        log << std::setw(10) << curve.iterations[k] << std::setw(16) << curve.empirical[k] << std::setw(16)
            << curve.excess[k] << '\n';
    }
}

}  // namespace

int cmd_spectrum(const SpectrumArgs& args, std::ostream& log) {
    if (args.max_h < 0) throw InvalidArgument("max_h must be >= 0");
    const auto entries = ntk::spectrum(args.d, args.max_h, args.tol);
    io::write_atomic(args.out, [&](std::ostream& out) { ntk::write_spectrum_csv(out, entries); });
    const auto top = std::max_element(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.eigenvalue < b.eigenvalue;
    });
    log << std::setprecision(12) << "top eigenvalue " << top->eigenvalue << " at h=" << top->order << '\n';
    log << "wrote " << entries.size() << " rows to " << args.out.string() << '\n';
    return 0;
}

KernelCheckReport kernel_check(const KernelCheckArgs& args) {
    if (args.samples == 0) throw InvalidArgument("kernel-check needs samples > 0");
    if (args.d < 2) throw InvalidArgument("kernel-check needs d >= 2");
    KernelCheckReport r;
    const int last = args.d - 1;
    Eigen::VectorXd pole = Eigen::VectorXd::Zero(args.d);
    pole[last] = 1.0;
    r.mc_estimate = ntk::operator_apply_mc(
        pole, [last](const Eigen::VectorXd& x) { return x[last]; }, args.samples, args.seed);
    r.mc_target = 1.0 / (4.0 * args.d);
    r.mc_ok = std::abs(r.mc_estimate - r.mc_target) <= args.mc_tol;

    for (int k = -90; k <= 90; ++k) {
        const double t = k / 100.0;
        const double err = std::abs(ntk::ntk_taylor(t, args.taylor_terms) - ntk::kernel_of_dot(t));
        r.taylor_max_error = std::max(r.taylor_max_error, err);
    }
    r.taylor_ok = r.taylor_max_error <= args.taylor_tol;
    return r;
}

int cmd_kernel_check(const KernelCheckArgs& args, std::ostream& log) {
    const auto r = kernel_check(args);
    log << std::setprecision(8);
    log << "eigen-equation at e_d: estimate " << r.mc_estimate << ", expected " << r.mc_target << ", |diff| "
        << std::abs(r.mc_estimate - r.mc_target) << " (tol " << args.mc_tol << ") "
        << (r.mc_ok ? "ok" : "FAILED") << '\n';
    log << "taylor vs closed form on |t|<=0.9: max error " << r.taylor_max_error << " (tol " << args.taylor_tol
        << ") " << (r.taylor_ok ? "ok" : "FAILED") << '\n';
    return r.ok() ? 0 : static_cast<int>(ExitCode::check_failed);
}

datasets::RawTable load_raw_table(const config::RunConfig& cfg) {
    const auto kind = datasets::parse_kind(cfg.get_string("dataset.kind", "synthetic"));
    if (kind == datasets::DatasetKind::synthetic) throw ConfigError("synthetic data has no table to load");
    const fs::path path = resolve_dataset_path(cfg, kind);
    if (kind == datasets::DatasetKind::abalone) {
        std::vector<int> columns;
        if (cfg.has("abalone_columns")) {
            for (auto c : cfg.get_int_list("abalone_columns")) columns.push_back(static_cast<int>(c));
        }
        return datasets::load_abalone(path, columns);
    }
    return datasets::load_wine(path);
}

experiments::ExperimentConfig experiment_config(const config::RunConfig& cfg) {
    experiments::ExperimentConfig out;
    out.dataset = datasets::parse_kind(cfg.get_string("dataset.kind", "synthetic"));
    out.model = experiments::parse_model(cfg.get_string("model", "nn"));
    for (auto n : cfg.get_int_list("n_list")) out.n_list.push_back(to_count("n_list", n));
    out.n_test = to_count("n_test", cfg.get_int("n_test", 1000), 0);
    out.seeds = to_count("seeds", cfg.get_int("seeds", 1));
    out.base_seed = env_seed_override(cfg.get_uint("base_seed", 0));
    out.noise_std = cfg.get_double("noise_std", 0.2);
    if (!(out.noise_std >= 0.0) || !std::isfinite(out.noise_std)) {
        throw ConfigError("key 'noise_std': must be finite and >= 0");
    }
    out.m = static_cast<Eigen::Index>(to_count("m", cfg.get_int("m", 4096), 2));
    if (out.m % 2 != 0) throw ConfigError("key 'm': network width must be even");
    out.lr = cfg.get_double("lr", 0.1);
    if (!(out.lr >= 0.0) || !std::isfinite(out.lr)) throw ConfigError("key 'lr': must be finite and >= 0");
    out.iterations = to_count("iterations", cfg.get_int("iterations", 1000));
    out.mc_samples = to_count("mc_samples", cfg.get_int("mc_samples", 20'000));
    try {
        out.schedule = relu_net::LogSchedule::parse(cfg.get_string("log_schedule", "geometric"));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("key 'log_schedule': ") + e.what());
    }

    if (out.model == experiments::ModelFamily::krr) {
        out.gammas = cfg.get_double_list("gamma_list");
        for (std::size_t i = 0; i < out.gammas.size(); ++i) {
            if (!(out.gammas[i] > 0.0) || !std::isfinite(out.gammas[i])) {
                throw ConfigError("key 'gamma_list': values must be finite and > 0");
            }
            if (i > 0 && out.gammas[i] > out.gammas[i - 1]) {
                throw ConfigError("key 'gamma_list': values must be in descending order");
            }
        }
        if (out.dataset != datasets::DatasetKind::synthetic) {
            throw ConfigError("key 'model': krr runs on unit-norm inputs and real features are not on the sphere");
        }
    }

    if (out.dataset == datasets::DatasetKind::synthetic) {
        const auto d = cfg.get_int("d", 3);
        if (d < 2) throw ConfigError("key 'd': must be >= 2");
        out.d = static_cast<int>(d);
    } else {
        auto raw = std::make_shared<datasets::RawTable>(load_raw_table(cfg));
        const auto cols = static_cast<int>(raw->features.cols());
        if (cfg.has("d") && cfg.get_int("d") != cols) {
            throw ConfigError("key 'd': table has " + std::to_string(cols) + " feature columns, config says " +
                              std::to_string(cfg.get_int("d")));
        }
        out.d = cols;
        const std::size_t largest = *std::max_element(out.n_list.begin(), out.n_list.end());
        if (largest + out.n_test > static_cast<std::size_t>(raw->rows())) {
            throw ConfigError("key 'n_list': n=" + std::to_string(largest) + " plus n_test=" +
                              std::to_string(out.n_test) + " exceeds the " + std::to_string(raw->rows()) +
                              " available rows");
        }
        out.raw = std::move(raw);
    }
    return out;
}

fs::path output_dir(const config::RunConfig& cfg) {
    const fs::path dir = cfg.get_string("out_dir", "out");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

int cmd_krr_sweep(const config::RunConfig& cfg, std::ostream& log) {
    if (cfg.get_string("model", "krr") != "krr") throw ConfigError("key 'model': krr-sweep needs model = krr");
    config::RunConfig krr_cfg = cfg;
    krr_cfg.set("model", "krr");
    const auto ec = experiment_config(krr_cfg);
    const fs::path dir = output_dir(cfg);
    std::vector<krr::SweepRecord> records;
    for (std::size_t ni = 0; ni < ec.n_list.size(); ++ni) {
        const auto cell = experiments::prepare_cell(ec, ni, 0);
        const auto part = krr::krr_complexity_sweep(cell.train, ec.gammas, cell.eval, cell.eval_seed);
        records.insert(records.end(), part.begin(), part.end());
    }
    io::write_atomic(dir / "krr_sweep.csv", [&](std::ostream& out) { krr::write_sweep_csv(out, records); });
    log << std::setprecision(6);
    log << std::setw(12) << "gamma" << std::setw(8) << "n" << std::setw(14) << "empirical" << std::setw(14)
        << "excess" << std::setw(14) << "lambda_min" << '\n';
    for (const auto& r : records) {
        log << std::setw(12) << r.gamma << std::setw(8) << r.n << std::setw(14) << r.empirical_risk << std::setw(14)
            << r.excess_risk << std::setw(14) << r.lambda_min << '\n';
    }
    log << "wrote " << (dir / "krr_sweep.csv").string() << '\n';
    return 0;
}

int cmd_nn_train(const config::RunConfig& cfg, std::ostream& log) {
    auto ec = experiment_config(cfg);
    if (ec.model != experiments::ModelFamily::nn) throw ConfigError("key 'model': nn-train needs model = nn");
    if (ec.n_list.size() != 1) throw ConfigError("key 'n_list': nn-train takes exactly one n");
    const fs::path dir = output_dir(cfg);

    const auto cell = experiments::prepare_cell(ec, 0, 0);
    auto init = relu_net::init_antisymmetric(ec.m, cell.train.d(), cell.init_seed);
    relu_net::TrainConfig tc;
    tc.lr = ec.lr;
    tc.iters = ec.iterations;
    tc.schedule = ec.schedule;
    tc.eval = cell.eval;
    tc.diagnostics = cfg.get_bool("diagnostics", true);
    auto result = relu_net::train(init.net, init.snapshot, cell.train, tc, cell.eval_seed);
    result.curve.meta.n = ec.n_list[0];
    result.curve.meta.seed = cell.init_seed;

    io::write_atomic(dir / "curves.csv",
                     [&](std::ostream& out) { experiments::write_curves_csv(out, {result.curve}); });
    io::write_atomic(dir / "diagnostics.csv",
                     [&](std::ostream& out) { relu_net::write_diagnostics_csv(out, result.diagnostics); });
    log << std::setprecision(6);
    print_curve_table(log, result.curve);
    if (result.diagnostics.eigen_skipped) log << "note: Gram eigenvalue diagnostics skipped for this n\n";
    const auto cross = experiments::detect_crossing(result.curve);
    if (cross.found) {
        log << "crossing at iteration " << cross.iteration << ", risk " << cross.risk_at_cross << '\n';
    } else {
        log << "no crossing within " << ec.iterations << " iterations\n";
    }
    log << "wrote " << (dir / "curves.csv").string() << " and " << (dir / "diagnostics.csv").string() << '\n';
    return 0;
}

int cmd_experiment(const config::RunConfig& cfg, std::size_t jobs, std::ostream& log) {
    const auto ec = experiment_config(cfg);
    const fs::path dir = output_dir(cfg);
    const auto result = experiments::run_risk_curves(ec, jobs);
    const auto rows = experiments::summarize_crossings(result.curves);

    io::write_atomic(dir / "curves.csv", [&](std::ostream& out) { experiments::write_curves_csv(out, result.curves); });
    io::write_atomic(dir / "crossings.csv", [&](std::ostream& out) { experiments::write_crossings_csv(out, rows); });
    io::write_atomic(dir / "failures.csv",
                     [&](std::ostream& out) { experiments::write_failures_csv(out, result.failures); });
    io::write_atomic(dir / "run_meta.txt", [&](std::ostream& out) {
        out << std::setprecision(17);
        out << "dataset = " << datasets::to_string(ec.dataset) << '\n';
        out << "model = " << experiments::to_string(ec.model) << '\n';
        out << "d = " << ec.d << '\n';
        out << "seeds = " << ec.seeds << '\n';
        out << "base_seed = " << ec.base_seed << '\n';
        out << "noise_std = " << ec.noise_std << '\n';
        if (ec.model == experiments::ModelFamily::nn) {
            out << "m = " << ec.m << '\n';
            out << "lr = " << ec.lr << '\n';
            out << "iterations = " << ec.iterations << '\n';
            out << "log_schedule = " << ec.schedule.describe() << '\n';
        } else {
            out << "gamma_list =";
            for (std::size_t i = 0; i < ec.gammas.size(); ++i) out << (i ? ", " : " ") << ec.gammas[i];
            out << '\n';
            out << "iteration_column = gamma rank (0 = largest gamma)\n";
        }
        if (ec.dataset == datasets::DatasetKind::synthetic) {
            out << "excess_risk = Monte-Carlo mean of (f(x) - x_d)^2 over " << ec.mc_samples
                << " uniform sphere points\n";
        } else {
            out << "n_test = " << ec.n_test << '\n';
            out << "excess_risk = held-out MSE against clean standardized targets (proxy, includes intrinsic noise)\n";
        }
        out << "crossing_std = population\n";
        out << "cells_ok = " << result.curves.size() << '\n';
        out << "cells_failed = " << result.failures.size() << '\n';
    });

    log << std::setprecision(6);
    for (const auto& r : rows) {
        log << "n=" << r.n << " runs=" << r.stats.runs << " found=" << r.stats.found_fraction;
        if (r.stats.mean_iteration) {
            log << " mean_iter=" << *r.stats.mean_iteration << " std_iter=" << *r.stats.std_iteration
                << " mean_risk=" << *r.stats.mean_risk << " std_risk=" << *r.stats.std_risk;
        }
        log << '\n';
    }
    for (const auto& f : result.failures) log << "cell n=" << f.n << " seed=" << f.seed_index << " failed: " << f.message << '\n';
    log << "wrote " << dir.string() << "/{curves,crossings,failures}.csv and run_meta.txt\n";
    return result.curves.empty() ? static_cast<int>(ExitCode::check_failed) : 0;
}

int cmd_crossing(const fs::path& curves_path, const fs::path& out_path, std::ostream& log) {
    std::ifstream in(curves_path);
    if (!in) throw IoError("cannot open " + curves_path.string());
    const auto curves = experiments::read_curves_csv(in);
    const auto rows = experiments::summarize_crossings(curves);
    io::write_atomic(out_path, [&](std::ostream& out) { experiments::write_crossings_csv(out, rows); });
    log << "read " << curves.size() << " curves, wrote " << rows.size() << " rows to " << out_path.string() << '\n';
    return 0;
}

int cmd_assumptions_krr(const krr::AssumptionParams& params, std::ostream& log) {
    const auto report = krr::check_assumption_krr(params);
    krr::print_report(log, report);
    return report.all() ? 0 : static_cast<int>(ExitCode::check_failed);
}

int cmd_assumptions_nn(const NnScheduleArgs& args, std::ostream& log) {
    if (!(args.eps > 0.0)) throw InvalidArgument("eps must be > 0");
    if (args.d < 2) throw InvalidArgument("d must be >= 2");
    const auto eigs = ntk::spectrum(args.d, args.max_h);
    const auto q = experiments::schedule_quantities(args.eps, args.d, eigs, args.L_eps);
    log << std::setprecision(10);
    log << "eps        " << q.eps << '\n';
    log << "L_eps      " << q.L_eps << '\n';
    log << "lambda_eps " << q.lambda_eps << '\n';
    log << "T_eps      " << q.T_eps << '\n';
    log << "U_eps      " << q.U_eps << '\n';
    return 0;
}

int cmd_data_check(const config::RunConfig& cfg, std::ostream& log) {
    const auto kind = datasets::parse_kind(cfg.get_string("dataset.kind", "synthetic"));
    log << std::setprecision(6);
    if (kind == datasets::DatasetKind::synthetic) {
        const auto d = static_cast<int>(cfg.get_int("d", 3));
        const auto ds = datasets::make_synthetic(d, 1000, cfg.get_double("noise_std", 0.2), 0);
        const double worst = (ds.features.rowwise().norm().array() - 1.0).abs().maxCoeff();
        log << "synthetic d=" << d << ": max | |x| - 1 | over 1000 draws = " << worst << '\n';
        return worst <= 1e-12 ? 0 : static_cast<int>(ExitCode::check_failed);
    }
    const auto raw = load_raw_table(cfg);
    log << datasets::to_string(kind) << ": " << raw.rows() << " rows, " << raw.features.cols() << " features\n";
    for (Eigen::Index c = 0; c < raw.features.cols(); ++c) {
        const auto col = raw.features.col(c);
        const double mean = col.mean();
        const double sd = std::sqrt((col.array() - mean).square().mean());
        log << "  " << std::left << std::setw(18) << raw.feature_names[static_cast<std::size_t>(c)] << std::right
            << " mean " << std::setw(12) << mean << " std " << std::setw(12) << sd << '\n';
    }
    const double tmean = raw.target.mean();
    log << "  target mean " << tmean << " std " << std::sqrt((raw.target.array() - tmean).square().mean()) << '\n';
    if (cfg.has("n_list")) {
        const auto n_list = cfg.get_int_list("n_list");
        const auto largest = *std::max_element(n_list.begin(), n_list.end());
        const auto need = largest + cfg.get_int("n_test", 1000);
        if (need > raw.rows()) {
            log << "insufficient rows: need " << need << ", have " << raw.rows() << '\n';
            return static_cast<int>(ExitCode::check_failed);
        }
    }
    return 0;
}

}  // namespace benign::commands
