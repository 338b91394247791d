#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "benign/datasets.hpp"
#include "benign/excess_risk.hpp"
#include "benign/ntk.hpp"
#include "benign/relu_net.hpp"
#include "benign/risk_curve.hpp"

namespace benign::experiments {

std::string_view to_string(ModelFamily model) noexcept;
ModelFamily parse_model(std::string_view text);

/// First logged point from which excess risk stays at or above empirical risk.
struct CrossingPoint {
    bool found = false;
    std::size_t index = 0;
    std::size_t iteration = 0;
    double risk_at_cross = 0.0;
};

CrossingPoint detect_crossing(const RiskCurve& curve);

struct CrossingStats {
    std::size_t runs = 0;
    double found_fraction = 0.0;
    /// Population statistics over runs that found a crossing; empty when none did.
    std::optional<double> mean_iteration;
    std::optional<double> std_iteration;
    std::optional<double> mean_risk;
    std::optional<double> std_risk;
};

/// Keyed by training sample size n.
std::map<std::size_t, CrossingStats> aggregate_crossings(
    const std::map<std::size_t, std::vector<CrossingPoint>>& groups);

struct ScheduleQuantities {
    double eps = 0.0;
    std::size_t L_eps = 0;
    double lambda_eps = 0.0;
    double T_eps = 0.0;
    std::size_t U_eps = 0;
};

/// λ_ε is the L_ε-th largest eigenvalue counted with multiplicity;
/// T_ε = (2/λ_ε) log(2/√ε); U_ε is the smallest U with (8T_ε/d)^U / U! <= √ε/14.
ScheduleQuantities schedule_quantities(double eps, int d, const std::vector<ntk::SpectrumEntry>& spectrum,
                                       std::size_t L_eps);

/// Grid of (n, seed) cells for one dataset and model family.
struct ExperimentConfig {
    datasets::DatasetKind dataset = datasets::DatasetKind::synthetic;
    ModelFamily model = ModelFamily::nn;
    int d = 3;
    std::vector<std::size_t> n_list;
    std::size_t n_test = 1000;
    std::size_t seeds = 1;
    std::uint64_t base_seed = 0;
    double noise_std = 0.2;
    // nn
    Eigen::Index m = 4096;
    double lr = 0.1;
    std::size_t iterations = 1000;
    relu_net::LogSchedule schedule = relu_net::LogSchedule::geometric();
    // krr, descending
    std::vector<double> gammas;
    std::size_t mc_samples = 20'000;
    /// Required for real datasets.
    std::shared_ptr<const datasets::RawTable> raw;
};

/// Seed of one stage of one cell. Data seeds ignore the seed index so every
/// seed of a given n sees the same sample and only the initialization varies.
std::uint64_t cell_seed(std::uint64_t base, std::size_t n_index, std::size_t seed_index, std::string_view stage);

/// Training sample, evaluation setup and seeds of one (n, seed) cell.
struct CellData {
    datasets::LabeledDataset train;
    EvalConfig eval;
    std::uint64_t eval_seed = 0;
    std::uint64_t init_seed = 0;
};

CellData prepare_cell(const ExperimentConfig& cfg, std::size_t n_index, std::size_t seed_index);

struct CellFailure {
    std::size_t n = 0;
    std::size_t seed_index = 0;
    std::string message;
};

struct ExperimentResult {
    std::vector<RiskCurve> curves;  // sorted by n, then seed index
    std::vector<CellFailure> failures;
};

/// Runs every cell, up to `jobs` at a time. Output order does not depend on `jobs`.
ExperimentResult run_risk_curves(const ExperimentConfig& cfg, std::size_t jobs = 1);

/// Groups crossings by n for every curve.
std::map<std::size_t, std::vector<CrossingPoint>> crossings_by_n(const std::vector<RiskCurve>& curves);

struct CrossingRow {
    datasets::DatasetKind dataset = datasets::DatasetKind::synthetic;
    ModelFamily model = ModelFamily::nn;
    std::size_t n = 0;
    CrossingStats stats;
};

/// Crossing statistics per (dataset, model, n), in that sort order.
std::vector<CrossingRow> summarize_crossings(const std::vector<RiskCurve>& curves);

void write_curves_csv(std::ostream& out, const std::vector<RiskCurve>& curves);
std::vector<RiskCurve> read_curves_csv(std::istream& in);
void write_crossings_csv(std::ostream& out, const std::vector<CrossingRow>& rows);
void write_failures_csv(std::ostream& out, const std::vector<CellFailure>& failures);

}  // namespace benign::experiments
