#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace benign::datasets {

enum class DatasetKind { synthetic, abalone, wine };

std::string_view to_string(DatasetKind kind) noexcept;
DatasetKind parse_kind(std::string_view text);

struct LabeledDataset {
    Eigen::MatrixXd features;       // n x d
    Eigen::VectorXd targets_noisy;  // training targets, noise included
    std::optional<Eigen::VectorXd> targets_clean;
    DatasetKind kind = DatasetKind::synthetic;
    double noise_std = 0.0;

    Eigen::Index n() const noexcept { return features.rows(); }
    Eigen::Index d() const noexcept { return features.cols(); }
};

/// Uniform sphere inputs with f*(x) = x_d plus N(0, noise_std²) label noise.
LabeledDataset make_synthetic(int d, std::size_t n, double noise_std, std::uint64_t seed);

/// Numeric table as read from a UCI file, before any preprocessing.
struct RawTable {
    Eigen::MatrixXd features;
    Eigen::VectorXd target;
    std::vector<std::string> feature_names;
    DatasetKind kind = DatasetKind::abalone;

    Eigen::Index rows() const noexcept { return features.rows(); }
};

/// Physical measurement columns of the UCI Abalone file, in file order.
inline const std::vector<std::string>& abalone_measurements() {
    static const std::vector<std::string> names{"length",         "diameter",       "height",
                                                "whole_weight",   "shucked_weight", "viscera_weight",
                                                "shell_weight"};
    return names;
}

/// Parses UCI Abalone (comma separated, no header, 9 columns: sex, 7
/// measurements, rings). `columns` selects measurement indices (0-based,
/// default all 7); the sex column is always dropped.
RawTable load_abalone(const std::filesystem::path& path, const std::vector<int>& columns = {});
RawTable parse_abalone(std::istream& in, const std::vector<int>& columns = {});

/// Parses UCI Wine Quality (semicolon separated, header line, 11 features + quality).
RawTable load_wine(const std::filesystem::path& path);
RawTable parse_wine(std::istream& in);

struct Standardization {
    Eigen::RowVectorXd feature_mean;
    Eigen::RowVectorXd feature_scale;
    double target_mean = 0.0;
    double target_scale = 1.0;

    Eigen::MatrixXd unstandardize_features(const Eigen::MatrixXd& z) const;
    Eigen::VectorXd unstandardize_targets(const Eigen::VectorXd& z) const;
};

struct SplitPair {
    LabeledDataset train;
    LabeledDataset test;  // clean targets; targets_noisy == targets_clean
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> test_rows;
    Standardization stats;  // computed on train rows only
};

/// Random disjoint split, standardization with train statistics (population
/// variance), then N(0, noise_std²) added to the standardized train targets.
SplitPair prepare_real(const RawTable& raw, std::size_t n_train, std::size_t n_test, double noise_std,
                       std::uint64_t seed);

/// CSV `split,row,feat_0..feat_{d-1},target_clean,target_noisy`.
void write_split_csv(std::ostream& out, const SplitPair& split);

}  // namespace benign::datasets
