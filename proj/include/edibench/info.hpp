#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "edibench/core.hpp"
#include "edibench/estimators.hpp"

namespace edibench {

// Estimator selection for a metric. An empty slot means "route by data":
// pairwise terms use the plug-in estimator when code and factor are both discrete and KSG otherwise;
// joint terms use plug-in on tuples when all codes are discrete, NeuralDv when d > 3 and KSG otherwise.
struct InfoOptions {
    std::optional<EstimatorChoice> pairwise;
    std::optional<EstimatorChoice> joint;
    std::uint64_t seed = 0;

    static InfoOptions automatic(std::uint64_t seed = 0) { return InfoOptions{std::nullopt, std::nullopt, seed}; }
    static InfoOptions uniform(const EstimatorChoice& choice, std::uint64_t seed = 0) {
        return InfoOptions{choice, choice, seed};
    }
};

// Lazily evaluated information quantities of one representation.
// Continuous factors enter every term as their 20-bin quantization (B bins under the binned estimator).
class InfoContext {
public:
    InfoContext(const Representation& rep, InfoOptions options);

    std::size_t k() const { return rep_.k(); }
    std::size_t d() const { return rep_.d(); }

    const std::vector<std::int64_t>& factor_labels(std::size_t j) const { return factor_labels_[j]; }
    bool code_is_discrete(std::size_t i) const { return code_discrete_[i]; }

    double factor_entropy(std::size_t j) const;
    double code_entropy(std::size_t i) const;

    // I(c_i; z_j)
    double pairwise(std::size_t i, std::size_t j);
    // d x k matrix of pairwise terms.
    Matrix pairwise_matrix();
    // I(c_1..c_d; z_j); sample-based estimates are floored at the largest pairwise term.
    double joint(std::size_t j);

    EstimatorChoice pairwise_choice(std::size_t i) const;
    EstimatorChoice joint_choice() const;

private:
    int quantization_bins() const;

    const Representation& rep_;
    InfoOptions options_;
    std::vector<std::vector<std::int64_t>> factor_labels_;
    std::vector<bool> code_discrete_;
    std::vector<std::vector<double>> code_columns_;
    std::vector<double> factor_entropy_;
    std::vector<std::optional<double>> pair_cache_;
    std::vector<std::optional<double>> joint_cache_;
};

}  // namespace edibench
