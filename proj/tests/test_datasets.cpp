#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "benign/datasets.hpp"
#include "benign/errors.hpp"

using namespace benign;
using namespace benign::datasets;

namespace {

const char* kWineHeader =
    "\"fixed acidity\";\"volatile acidity\";\"citric acid\";\"residual sugar\";\"chlorides\";"
    "\"free sulfur dioxide\";\"total sulfur dioxide\";\"density\";\"pH\";\"sulphates\";\"alcohol\";\"quality\"\n";

/// Abalone-shaped text with `rows` random rows.
std::string fake_abalone(int rows, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::ostringstream s;
    s.precision(6);
    const char* sexes[] = {"M", "F", "I"};
    for (int r = 0; r < rows; ++r) {
        s << sexes[r % 3];
        for (int k = 0; k < 7; ++k) s << ',' << u(gen);
        s << ',' << (3 + static_cast<int>(gen() % 20)) << '\n';
    }
    return s.str();
}

RawTable parse_abalone_text(const std::string& text, const std::vector<int>& cols = {}) {
    std::istringstream in(text);
    return parse_abalone(in, cols);
}

RawTable parse_wine_text(const std::string& text) {
    std::istringstream in(text);
    return parse_wine(in);
}

double variance(const Eigen::VectorXd& v) { return (v.array() - v.mean()).square().mean(); }

}  // namespace

TEST_CASE("synthetic data") {
    const auto clean = make_synthetic(3, 50, 0.0, 1);
    CHECK(clean.targets_noisy == *clean.targets_clean);
    CHECK(clean.kind == DatasetKind::synthetic);
    CHECK((clean.features.rowwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(*clean.targets_clean == clean.features.col(2));

    const auto big = make_synthetic(3, 100'000, 0.0, 2);
    CHECK(std::abs(variance(*big.targets_clean) - 1.0 / 3.0) <= 0.01);

    const auto noisy = make_synthetic(3, 10'000, 0.2, 3);
    const Eigen::VectorXd noise = noisy.targets_noisy - *noisy.targets_clean;
    CHECK(std::abs(variance(noise) - 0.04) <= 0.005);
    CHECK(std::abs(noise.mean()) <= 0.01);
    CHECK(noisy.noise_std == 0.2);

    const auto d7 = make_synthetic(7, 20, 0.1, 4);
    CHECK(*d7.targets_clean == d7.features.col(6));
    CHECK(make_synthetic(4, 30, 0.1, 5).targets_noisy == make_synthetic(4, 30, 0.1, 5).targets_noisy);
    CHECK_THROWS_AS(make_synthetic(1, 10, 0.1, 0), InvalidArgument);
    CHECK_THROWS_AS(make_synthetic(3, 10, -0.1, 0), InvalidArgument);
}

TEST_CASE("noise does not disturb the inputs") {
    const auto a = make_synthetic(3, 200, 0.0, 8);
    const auto b = make_synthetic(3, 200, 0.5, 8);
    CHECK(a.features == b.features);
}

TEST_CASE("abalone parsing") {
    const auto t = parse_abalone_text("M,0.455,0.365,0.095,0.514,0.2245,0.101,0.15,15\n"
                                      "F,0.53,0.42,0.135,0.677,0.2565,0.1415,0.21,9\n");
    REQUIRE(t.rows() == 2);
    CHECK(t.features.cols() == 7);
    CHECK(t.features(0, 0) == 0.455);
    CHECK(t.features(0, 6) == 0.15);
    CHECK(t.target[0] == 15.0);
    CHECK(t.target[1] == 9.0);
    CHECK(t.kind == DatasetKind::abalone);
    CHECK(t.feature_names == abalone_measurements());

    const auto sub = parse_abalone_text("I,0.1,0.2,0.3,0.4,0.5,0.6,0.7,5\n", {0, 2, 6});
    CHECK(sub.features.cols() == 3);
    CHECK(sub.features(0, 1) == 0.3);
    CHECK(sub.features(0, 2) == 0.7);
    CHECK(sub.feature_names == std::vector<std::string>{"length", "height", "shell_weight"});
}

TEST_CASE("abalone errors") {
    CHECK_THROWS_AS(parse_abalone_text(""), FormatError);
    CHECK_THROWS_AS(parse_abalone_text("M,0.1,0.2,0.3,0.4,0.5,0.6,7\n"), FormatError);
    try {
        parse_abalone_text("M,0.1,0.2,0.3,0.4,0.5,0.6,0.7,5\nF,0.1,abc,0.3,0.4,0.5,0.6,0.7,5\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_abalone_text("M,0.1,0.2,0.3,0.4,0.5,0.6,0.7,5\n", {7}), InvalidArgument);
    CHECK_THROWS_AS(load_abalone("/nonexistent/abalone.data"), IoError);
}

TEST_CASE("wine parsing") {
    const auto empty = parse_wine_text(kWineHeader);
    CHECK(empty.rows() == 0);
    CHECK(empty.features.cols() == 11);
    CHECK(empty.feature_names.front() == "fixed acidity");

    const auto t = parse_wine_text(std::string(kWineHeader) + "7.4;0.7;0;1.9;0.076;11;34;0.9978;3.51;0.56;9.4;5\n");
    REQUIRE(t.rows() == 1);
    CHECK(t.features.cols() == 11);
    CHECK(t.features(0, 7) == 0.9978);
    CHECK(t.target[0] == 5.0);
    CHECK(t.kind == DatasetKind::wine);

    CHECK_THROWS_AS(parse_wine_text(std::string(kWineHeader) + "7.4;0.7;0;1.9;0.076;11;34;0.9978;3.51;0.56;9.4\n"),
                    FormatError);
    CHECK_THROWS_AS(parse_wine_text(""), FormatError);
    CHECK_THROWS_AS(parse_wine_text(std::string(kWineHeader) + "7.4;0.7;0;1.9;x;11;34;0.9978;3.51;0.56;9.4;5\n"),
                    ParseError);
}

TEST_CASE("loading from disk") {
    const auto dir = std::filesystem::temp_directory_path() / "benign_datasets_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "abalone.data";
    {
        std::ofstream out(path);
        out << fake_abalone(25, 3);
    }
    const auto t = load_abalone(path);
    CHECK(t.rows() == 25);
    std::filesystem::remove_all(dir);
}

TEST_CASE("dataset kinds round trip") {
    for (auto k : {DatasetKind::synthetic, DatasetKind::abalone, DatasetKind::wine}) CHECK(parse_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_kind("mnist"), InvalidArgument);
}

TEST_CASE("real-data preparation") {
    const auto raw = parse_abalone_text(fake_abalone(300, 7));
    const auto split = prepare_real(raw, 200, 80, 0.0, 11);

    SUBCASE("disjoint rows from the table") {
        std::set<Eigen::Index> train(split.train_rows.begin(), split.train_rows.end());
        std::set<Eigen::Index> test(split.test_rows.begin(), split.test_rows.end());
        CHECK(train.size() == 200);
        CHECK(test.size() == 80);
        for (auto r : test) CHECK(train.count(r) == 0);
        for (auto r : train) CHECK((r >= 0 && r < 300));
    }
    SUBCASE("train statistics are standardized") {
        const Eigen::VectorXd& y = *split.train.targets_clean;
        CHECK(std::abs(y.mean()) <= 1e-10);
        CHECK(std::abs(variance(y) - 1.0) <= 1e-10);
        for (Eigen::Index k = 0; k < split.train.d(); ++k) {
            const Eigen::VectorXd col = split.train.features.col(k);
            CHECK(std::abs(col.mean()) <= 1e-10);
            CHECK(std::abs(variance(col) - 1.0) <= 1e-10);
        }
        CHECK(split.train.targets_noisy == y);
    }
    SUBCASE("standardization is invertible") {
        const Eigen::MatrixXd back = split.stats.unstandardize_features(split.train.features);
        const Eigen::VectorXd yback = split.stats.unstandardize_targets(*split.train.targets_clean);
        for (std::size_t k = 0; k < split.train_rows.size(); ++k) {
            const auto r = split.train_rows[k];
            const auto i = static_cast<Eigen::Index>(k);
            CHECK((back.row(i) - raw.features.row(r)).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK(std::abs(yback[i] - raw.target[r]) <= 1e-10);
        }
        // Test rows use the train statistics.
        const Eigen::MatrixXd tback = split.stats.unstandardize_features(split.test.features);
        CHECK((tback.row(0) - raw.features.row(split.test_rows[0])).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("determinism") {
        const auto again = prepare_real(raw, 200, 80, 0.0, 11);
        CHECK(again.train_rows == split.train_rows);
        CHECK(again.train.features == split.train.features);
        CHECK(prepare_real(raw, 200, 80, 0.0, 12).train_rows != split.train_rows);
    }
}

TEST_CASE("label noise lands on the train split only") {
    const auto raw = parse_abalone_text(fake_abalone(3000, 9));
    const auto split = prepare_real(raw, 2000, 500, 0.2, 4);
    const Eigen::VectorXd noise = split.train.targets_noisy - *split.train.targets_clean;
    CHECK(std::abs(variance(noise) - 0.04) <= 0.006);
    CHECK(split.test.targets_noisy == *split.test.targets_clean);
    CHECK(split.test.noise_std == 0.0);
    CHECK(split.train.noise_std == 0.2);
    const auto same = prepare_real(raw, 2000, 500, 0.2, 4);
    CHECK(same.train.targets_noisy == split.train.targets_noisy);
    // Noise does not move the split.
    CHECK(prepare_real(raw, 2000, 500, 0.0, 4).train_rows == split.train_rows);
}

TEST_CASE("preparation errors and csv") {
    const auto raw = parse_abalone_text(fake_abalone(10, 1));
    CHECK_THROWS_AS(prepare_real(raw, 8, 3, 0.1, 0), InvalidArgument);
    CHECK_THROWS_AS(prepare_real(raw, 0, 3, 0.1, 0), InvalidArgument);
    const auto split = prepare_real(raw, 6, 4, 0.1, 0);
    std::ostringstream csv;
    write_split_csv(csv, split);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "split,row,feat_0,feat_1,feat_2,feat_3,feat_4,feat_5,feat_6,target_clean,target_noisy");
    int train = 0, test = 0;
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind("train,", 0) == 0) ++train;
        if (line.rfind("test,", 0) == 0) ++test;
    }
    CHECK(train == 6);
    CHECK(test == 4);
}
