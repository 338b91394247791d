#include "benign/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>

#include "benign/errors.hpp"
#include "benign/rng.hpp"
#include "benign/sphere.hpp"

namespace benign::datasets {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw ParseError("non-numeric field '" + std::string(field) + "'", line_no);
    }
    return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

/// Accumulated rows, converted to Eigen once the file is read.
struct RowBuffer {
    std::vector<double> features;
    std::vector<double> target;
    Eigen::Index width = 0;

    RawTable finish(std::vector<std::string> names, DatasetKind kind) const {
        RawTable t;
        const auto rows = static_cast<Eigen::Index>(target.size());
        t.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            features.data(), rows, width);
        t.target = Eigen::Map<const Eigen::VectorXd>(target.data(), rows);
        t.feature_names = std::move(names);
        t.kind = kind;
        return t;
    }
};

}  // namespace

std::string_view to_string(DatasetKind kind) noexcept {
    switch (kind) {
        case DatasetKind::synthetic: return "synthetic";
        case DatasetKind::abalone: return "abalone";
        case DatasetKind::wine: return "wine";
    }
    return "unknown";
}

DatasetKind parse_kind(std::string_view text) {
    if (text == "synthetic") return DatasetKind::synthetic;
    if (text == "abalone") return DatasetKind::abalone;
    if (text == "wine") return DatasetKind::wine;
    throw InvalidArgument("unknown dataset kind '" + std::string(text) + "'");
}

LabeledDataset make_synthetic(int d, std::size_t n, double noise_std, std::uint64_t seed) {
    if (!(noise_std >= 0.0)) throw InvalidArgument("noise_std must be nonnegative");
    const auto X = sphere::sample_sphere(d, n, derive_seed(seed, "synthetic-inputs"));
    LabeledDataset ds;
    ds.features = X.matrix();
    Eigen::VectorXd clean = ds.features.col(d - 1);
    Eigen::VectorXd noisy = clean;
    if (noise_std > 0.0) {
        SplitMix64 engine(derive_seed(seed, "synthetic-noise"));
        std::normal_distribution<double> noise(0.0, noise_std);
        for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy[i] += noise(engine);
    }
    ds.targets_clean = std::move(clean);
    ds.targets_noisy = std::move(noisy);
    ds.kind = DatasetKind::synthetic;
    ds.noise_std = noise_std;
    return ds;
}

RawTable parse_abalone(std::istream& in, const std::vector<int>& columns) {
    constexpr std::size_t kColumns = 9;
    const auto& names = abalone_measurements();
    std::vector<int> keep = columns;
    if (keep.empty()) {
        keep.resize(names.size());
        std::iota(keep.begin(), keep.end(), 0);
    }
    std::vector<std::string> kept_names;
    for (int c : keep) {
        if (c < 0 || c >= static_cast<int>(names.size())) {
            throw InvalidArgument("abalone column index " + std::to_string(c) + " out of range 0..6");
        }
        kept_names.push_back(names[static_cast<std::size_t>(c)]);
    }

    RowBuffer buf;
    buf.width = static_cast<Eigen::Index>(keep.size());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != kColumns) {
            throw FormatError("abalone line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                              " columns, expected 9");
        }
        if (fields[0].empty()) throw ParseError("empty sex field", line_no);
        double measurements[7];
        for (std::size_t k = 0; k < 7; ++k) measurements[k] = parse_number(fields[k + 1], line_no);
        const double rings = parse_number(fields[8], line_no);
        for (int c : keep) buf.features.push_back(measurements[c]);
        buf.target.push_back(rings);
    }
    if (buf.target.empty()) throw FormatError("abalone file has no data rows");
    return buf.finish(std::move(kept_names), DatasetKind::abalone);
}

RawTable load_abalone(const std::filesystem::path& path, const std::vector<int>& columns) {
    auto in = open_input(path);
    return parse_abalone(in, columns);
}

RawTable parse_wine(std::istream& in) {
    constexpr std::size_t kColumns = 12;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        for (auto field : split(line, ';')) {
            if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
                field = field.substr(1, field.size() - 2);
            }
            header.emplace_back(field);
        }
        break;
    }
    if (header.empty()) throw FormatError("wine file is empty (missing header)");
    if (header.size() != kColumns) {
        throw FormatError("wine header has " + std::to_string(header.size()) + " columns, expected 12");
    }
    header.pop_back();  // quality

    RowBuffer buf;
    buf.width = static_cast<Eigen::Index>(kColumns - 1);
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ';');
        if (fields.size() != kColumns) {
            throw FormatError("wine line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                              " columns, expected 12");
        }
        for (std::size_t k = 0; k + 1 < kColumns; ++k) buf.features.push_back(parse_number(fields[k], line_no));
        buf.target.push_back(parse_number(fields[kColumns - 1], line_no));
    }
    return buf.finish(std::move(header), DatasetKind::wine);
}

RawTable load_wine(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_wine(in);
}

Eigen::MatrixXd Standardization::unstandardize_features(const Eigen::MatrixXd& z) const {
    return (z.array().rowwise() * feature_scale.array()).rowwise() + feature_mean.array();
}

Eigen::VectorXd Standardization::unstandardize_targets(const Eigen::VectorXd& z) const {
    return (z.array() * target_scale + target_mean).matrix();
}

SplitPair prepare_real(const RawTable& raw, std::size_t n_train, std::size_t n_test, double noise_std,
                       std::uint64_t seed) {
    const auto rows = static_cast<std::size_t>(raw.rows());
    if (n_train == 0) throw InvalidArgument("n_train must be positive");
    if (n_train + n_test > rows) {
        throw InvalidArgument("requested " + std::to_string(n_train) + " train + " + std::to_string(n_test) +
                              " test rows but the table has " + std::to_string(rows));
    }
    if (!(noise_std >= 0.0)) throw InvalidArgument("noise_std must be nonnegative");

    std::vector<Eigen::Index> order(rows);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    SplitMix64 shuffle_engine(derive_seed(seed, "split-shuffle"));
    // Fisher-Yates with an explicit draw so the permutation does not depend on
    // the standard library's shuffle implementation.
    for (std::size_t i = rows; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(shuffle_engine() % i);
        std::swap(order[i - 1], order[j]);
    }

    SplitPair out;
    out.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                         order.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));

    const auto gather = [&](const std::vector<Eigen::Index>& idx, Eigen::MatrixXd& X, Eigen::VectorXd& y) {
        X.resize(static_cast<Eigen::Index>(idx.size()), raw.features.cols());
        y.resize(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            X.row(static_cast<Eigen::Index>(k)) = raw.features.row(idx[k]);
            y[static_cast<Eigen::Index>(k)] = raw.target[idx[k]];
        }
    };
    Eigen::MatrixXd X_train, X_test;
    Eigen::VectorXd y_train, y_test;
    gather(out.train_rows, X_train, y_train);
    gather(out.test_rows, X_test, y_test);

    auto& st = out.stats;
    const double nt = static_cast<double>(n_train);
    st.feature_mean = X_train.colwise().mean();
    const Eigen::MatrixXd centered = X_train.rowwise() - st.feature_mean;
    st.feature_scale = (centered.array().square().colwise().sum() / nt).sqrt().matrix();
    for (Eigen::Index k = 0; k < st.feature_scale.size(); ++k) {
        if (!(st.feature_scale[k] > 0.0)) st.feature_scale[k] = 1.0;  // constant column
    }
    st.target_mean = y_train.mean();
    st.target_scale = std::sqrt((y_train.array() - st.target_mean).square().sum() / nt);
    if (!(st.target_scale > 0.0)) st.target_scale = 1.0;

    const auto standardize_x = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd {
        return ((X.rowwise() - st.feature_mean).array().rowwise() / st.feature_scale.array()).matrix();
    };
    const auto standardize_y = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return ((y.array() - st.target_mean) / st.target_scale).matrix();
    };

    out.train.features = standardize_x(X_train);
    out.train.targets_clean = standardize_y(y_train);
    out.train.targets_noisy = *out.train.targets_clean;
    if (noise_std > 0.0) {
        SplitMix64 noise_engine(derive_seed(seed, "split-noise"));
        std::normal_distribution<double> noise(0.0, noise_std);
        for (Eigen::Index i = 0; i < out.train.targets_noisy.size(); ++i) out.train.targets_noisy[i] += noise(noise_engine);
    }
    out.train.kind = raw.kind;
    out.train.noise_std = noise_std;

    out.test.features = standardize_x(X_test);
    out.test.targets_clean = standardize_y(y_test);
    out.test.targets_noisy = *out.test.targets_clean;
    out.test.kind = raw.kind;
    out.test.noise_std = 0.0;
    return out;
}

void write_split_csv(std::ostream& out, const SplitPair& split) {
    const Eigen::Index d = split.train.d();
    out << "split,row";
    for (Eigen::Index k = 0; k < d; ++k) out << ",feat_" << k;
    out << ",target_clean,target_noisy\n";
    const auto old_precision = out.precision(17);
    const auto emit = [&](const char* name, const LabeledDataset& ds, const std::vector<Eigen::Index>& rows) {
        for (Eigen::Index i = 0; i < ds.n(); ++i) {
            out << name << ',' << rows[static_cast<std::size_t>(i)];
            for (Eigen::Index k = 0; k < d; ++k) out << ',' << ds.features(i, k);
            out << ',' << (*ds.targets_clean)[i] << ',' << ds.targets_noisy[i] << '\n';
        }
    };
    emit("train", split.train, split.train_rows);
    emit("test", split.test, split.test_rows);
    out.precision(old_precision);
}

}  // namespace benign::datasets
