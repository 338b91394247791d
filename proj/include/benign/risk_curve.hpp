#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "benign/datasets.hpp"

namespace benign::experiments {

enum class ModelFamily { nn, krr };

struct CurveMeta {
    datasets::DatasetKind dataset = datasets::DatasetKind::synthetic;
    ModelFamily model = ModelFamily::nn;
    std::size_t n = 0;
    /// Network width for nn curves; number of γ values for krr curves.
    std::size_t m_or_gammas = 0;
    std::size_t seed_index = 0;
    std::uint64_t seed = 0;
    double lr = 0.0;
    double noise_std = 0.0;
};

/// Empirical and excess risk at logged iterations (or γ ranks for KRR).
struct RiskCurve {
    std::vector<std::size_t> iterations;
    std::vector<double> empirical;
    std::vector<double> excess;
    CurveMeta meta;

    std::size_t size() const noexcept { return iterations.size(); }

    void push(std::size_t iteration, double emp, double exc) {
        iterations.push_back(iteration);
        empirical.push_back(emp);
        excess.push_back(exc);
    }
};

}  // namespace benign::experiments
