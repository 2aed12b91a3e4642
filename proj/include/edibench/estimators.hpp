#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edibench/core.hpp"

namespace edibench {

enum class ValueKind { Discrete, Continuous };

struct DvConfig {
    std::vector<int> hidden_layers{100, 100};
    double learning_rate = 1e-3;
    int batch_size = 512;
    int max_epochs = 150;
    double ema_rate = 0.01;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EstimatorChoice {
    enum class Kind { DiscretePlugin, Binned, Ksg, NeuralDv };
    Kind kind = Kind::DiscretePlugin;
    int bins = 20;
    int k_neighbors = 3;
    DvConfig dv;

    static EstimatorChoice discrete_plugin();
    static EstimatorChoice binned(int bins = 20);
    static EstimatorChoice ksg(int k_neighbors = 3);
    static EstimatorChoice neural_dv(const DvConfig& cfg = {});

    // Accepts "discrete", "binned:B", "ksg:K", "dv" ("binned" and "ksg" alone take the defaults).
    static EstimatorChoice parse(const std::string& text);
    std::string to_string() const;
    void validate() const;
};

constexpr int kDefaultQuantizationBins = 20;
constexpr double kKsgJitterScale = 1e-10;

// Plug-in entropy in nats.
double discrete_entropy(const std::vector<std::int64_t>& samples);

// Exact plug-in MI over category pairs.
double plugin_mi(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y);

// Exact integers mapped to labels; throws DomainViolation on non-integers.
std::vector<std::int64_t> integer_labels(const std::vector<double>& v);
bool is_integer_valued(const std::vector<double>& v);

// Uniform-width bins over the empirical range, labels in [0, bins).
std::vector<std::int64_t> uniform_bins(const std::vector<double>& v, int bins);

// Dense relabelling of the row tuples of several label columns.
std::vector<std::int64_t> tuple_labels(const std::vector<std::vector<std::int64_t>>& columns);

double binned_mi(const std::vector<double>& x, const std::vector<double>& y, int bins = 20,
                 ValueKind kx = ValueKind::Continuous, ValueKind ky = ValueKind::Continuous);

// Kraskov estimator (algorithm 1, max-norm). Rows are samples.
double ksg_mi(const Matrix& x, const Matrix& y, int k_neighbors = 3, std::uint64_t seed = 0);

// Donsker-Varadhan lower bound from a trained statistics network.
double neural_dv_mi(const Matrix& x, const Matrix& y, const DvConfig& cfg);

double mutual_information(const Matrix& x, ValueKind kx, const Matrix& y, ValueKind ky, const EstimatorChoice& choice);

Matrix column_matrix(const std::vector<double>& v);

}  // namespace edibench
