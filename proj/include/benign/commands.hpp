#pragma once

/**
 * @file commands.hpp
 * @brief Subcommand implementations behind the benign_lab executable.
 *
 * Each command returns a process exit code for check outcomes and throws a
 * benign::Error for configuration, IO, and numeric failures.
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "benign/config.hpp"
#include "benign/datasets.hpp"
#include "benign/experiments.hpp"
#include "benign/krr.hpp"
#include "benign/ntk.hpp"

namespace benign::commands {

struct SpectrumArgs {
    int d = 3;
    int max_h = 10;
    double tol = ntk::kDefaultSeriesTol;
    std::filesystem::path out = "spectrum.csv";
};

int cmd_spectrum(const SpectrumArgs& args, std::ostream& log);

struct KernelCheckArgs {
    int d = 3;
    std::size_t samples = 500'000;
    std::uint64_t seed = 0;
    double mc_tol = 0.002;
    double taylor_tol = 1e-6;
    std::size_t taylor_terms = 50;
};

struct KernelCheckReport {
    double mc_estimate = 0.0;
    double mc_target = 0.0;
    bool mc_ok = false;
    double taylor_max_error = 0.0;
    bool taylor_ok = false;
    bool ok() const noexcept { return mc_ok && taylor_ok; }
};

/// (H f)(e_d) for f(x) = x_d against 1/(4d), and the Taylor expansion
/// of κ against the closed form on |t| <= 0.9.
KernelCheckReport kernel_check(const KernelCheckArgs& args);
int cmd_kernel_check(const KernelCheckArgs& args, std::ostream& log);

/// Reads every key a run needs up front; also honours BENIGN_LAB_SEED.
experiments::ExperimentConfig experiment_config(const config::RunConfig& cfg);

/// Resolves dataset.path (file or directory) and loads the raw table.
datasets::RawTable load_raw_table(const config::RunConfig& cfg);

std::filesystem::path output_dir(const config::RunConfig& cfg);

int cmd_krr_sweep(const config::RunConfig& cfg, std::ostream& log);
int cmd_nn_train(const config::RunConfig& cfg, std::ostream& log);
/// Nonzero exit iff every cell failed.
int cmd_experiment(const config::RunConfig& cfg, std::size_t jobs, std::ostream& log);
int cmd_crossing(const std::filesystem::path& curves, const std::filesystem::path& out, std::ostream& log);

/// Exit 0 when every clause holds, 1 otherwise.
int cmd_assumptions_krr(const krr::AssumptionParams& params, std::ostream& log);

struct NnScheduleArgs {
    double eps = 0.0;
    int d = 0;
    std::size_t L_eps = 1;
    int max_h = 40;
};
int cmd_assumptions_nn(const NnScheduleArgs& args, std::ostream& log);

int cmd_data_check(const config::RunConfig& cfg, std::ostream& log);

}  // namespace benign::commands
