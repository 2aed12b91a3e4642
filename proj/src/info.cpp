#include "edibench/info.hpp"

#include <algorithm>

#include <utility>

#include "edibench/rng.hpp"

namespace edibench {

namespace {

std::vector<double> as_reals(const std::vector<std::int64_t>& labels) {
    return std::vector<double>(labels.begin(), labels.end());
}

}  // namespace

InfoContext::InfoContext(const Representation& rep, InfoOptions options) : rep_(rep), options_(std::move(options)) {
    if (options_.pairwise) options_.pairwise->validate();
    if (options_.joint) options_.joint->validate();
    const int bins = quantization_bins();
    for (std::size_t j = 0; j < rep_.k(); ++j) {
        auto col = rep_.factors.column(j);
        factor_labels_.push_back(rep_.factor_kinds[j].is_discrete() ? integer_labels(col) : uniform_bins(col, bins));
        factor_entropy_.push_back(discrete_entropy(factor_labels_.back()));
    }
    for (std::size_t i = 0; i < rep_.d(); ++i) {
        code_columns_.push_back(rep_.codes.column(i));
        code_discrete_.push_back(is_integer_valued(code_columns_.back()));
    }
    pair_cache_.assign(rep_.k() * rep_.d(), std::nullopt);
    joint_cache_.assign(rep_.k(), std::nullopt);
}

int InfoContext::quantization_bins() const {
    if (options_.pairwise && options_.pairwise->kind == EstimatorChoice::Kind::Binned) return options_.pairwise->bins;
    return kDefaultQuantizationBins;
}

double InfoContext::factor_entropy(std::size_t j) const { return factor_entropy_[j]; }

double InfoContext::code_entropy(std::size_t i) const {
    if (code_discrete_[i]) return discrete_entropy(integer_labels(code_columns_[i]));
    return discrete_entropy(uniform_bins(code_columns_[i], quantization_bins()));
}

EstimatorChoice InfoContext::pairwise_choice(std::size_t i) const {
    if (options_.pairwise) return *options_.pairwise;
    return code_discrete_[i] ? EstimatorChoice::discrete_plugin() : EstimatorChoice::ksg();
}

EstimatorChoice InfoContext::joint_choice() const {
    if (options_.joint) return *options_.joint;
    bool all_discrete = true;
    for (bool b : code_discrete_) all_discrete = all_discrete && b;
    if (all_discrete) return EstimatorChoice::discrete_plugin();
    return rep_.d() > 3 ? EstimatorChoice::neural_dv() : EstimatorChoice::ksg();
}

double InfoContext::pairwise(std::size_t i, std::size_t j) {
    auto& slot = pair_cache_[i * rep_.k() + j];
    if (slot) return *slot;
    const auto choice = pairwise_choice(i);
    const auto& z = factor_labels_[j];
    const auto& c = code_columns_[i];
    double v = 0.0;
    switch (choice.kind) {
        case EstimatorChoice::Kind::DiscretePlugin:
            if (!code_discrete_[i])
                throw Error(ErrorCode::IncompatibleEstimator,
                            "discrete plug-in estimator needs discrete code c" + std::to_string(i));
            v = plugin_mi(integer_labels(c), z);
            break;
        case EstimatorChoice::Kind::Binned:
            v = plugin_mi(code_discrete_[i] ? integer_labels(c) : uniform_bins(c, choice.bins), z);
            break;
        case EstimatorChoice::Kind::Ksg:
            v = ksg_mi(column_matrix(c), column_matrix(as_reals(z)), choice.k_neighbors, options_.seed);
            break;
        case EstimatorChoice::Kind::NeuralDv: {
            DvConfig cfg = choice.dv;
            cfg.seed = hash64(options_.seed, cfg.seed, i, j);
            v = neural_dv_mi(column_matrix(c), column_matrix(as_reals(z)), cfg);
            break;
        }
    }
    slot = v;
    return v;
}

Matrix InfoContext::pairwise_matrix() {
    Matrix m(rep_.d(), rep_.k());
    for (std::size_t i = 0; i < rep_.d(); ++i)
        for (std::size_t j = 0; j < rep_.k(); ++j) m(i, j) = pairwise(i, j);
    return m;
}

double InfoContext::joint(std::size_t j) {
    auto& slot = joint_cache_[j];
    if (slot) return *slot;
    const auto choice = joint_choice();
    const auto& z = factor_labels_[j];
    double v = 0.0;
    switch (choice.kind) {
        case EstimatorChoice::Kind::DiscretePlugin:
        case EstimatorChoice::Kind::Binned: {
            std::vector<std::vector<std::int64_t>> cols;
            for (std::size_t i = 0; i < rep_.d(); ++i) {
                if (code_discrete_[i])
                    cols.push_back(integer_labels(code_columns_[i]));
                else if (choice.kind == EstimatorChoice::Kind::Binned)
                    cols.push_back(uniform_bins(code_columns_[i], choice.bins));
                else
                    throw Error(ErrorCode::IncompatibleEstimator,
                                "discrete plug-in estimator needs discrete code c" + std::to_string(i));
            }
            v = plugin_mi(tuple_labels(cols), z);
            break;
        }
        case EstimatorChoice::Kind::Ksg:
            v = ksg_mi(rep_.codes, column_matrix(as_reals(z)), choice.k_neighbors, options_.seed);
            break;
        case EstimatorChoice::Kind::NeuralDv: {
            DvConfig cfg = choice.dv;
            cfg.seed = hash64(options_.seed, cfg.seed, 0x6a6f696eULL, j);
            v = neural_dv_mi(rep_.codes, column_matrix(as_reals(z)), cfg);
            break;
        }
    }
    // Floored at the pairwise terms, since I(c_1..c_d; z) >= I(c_i; z).
    if (choice.kind == EstimatorChoice::Kind::Ksg || choice.kind == EstimatorChoice::Kind::NeuralDv)
        for (std::size_t i = 0; i < rep_.d(); ++i) v = std::max(v, pairwise(i, j));
    slot = v;
    return v;
}

}  // namespace edibench
