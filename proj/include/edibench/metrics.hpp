#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edibench/core.hpp"
#include "edibench/estimators.hpp"
#include "edibench/info.hpp"

namespace edibench {

struct InterventionConfig {
    int votes = 800;
    int subset_size = 64;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DciConfig {
    double l1_penalty = 0.01;
    int max_iterations = 1000;
    double tolerance = 1e-6;
    double test_fraction = 0.3;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DciResult {
    double disentanglement = 0.0;
    double completeness = 0.0;
    double informativeness = 0.0;
    Matrix importance;  // d x k, each factor column sums to 1
};

double zdiff(const Representation& rep, const InterventionConfig& cfg);
double zminvar(const Representation& rep, const InterventionConfig& cfg);
double sap(const Representation& rep);

double mig(InfoContext& ctx);
double mig(const Representation& rep, const InfoOptions& options);
double mig_sup(InfoContext& ctx);
double mig_sup(const Representation& rep, const InfoOptions& options);
double modularity_score(InfoContext& ctx);
double modularity_score(const Representation& rep, const InfoOptions& options);
double dcimig(InfoContext& ctx);
double dcimig(const Representation& rep, const InfoOptions& options);

// Per-factor MIG gaps (top minus runner-up code, normalised by H(z_j)).
std::vector<double> mig_gaps(InfoContext& ctx);

DciResult dci(const Representation& rep, const DciConfig& cfg);
// Random-forest importances (50 trees, depth 8) in place of LASSO coefficients.
DciResult dci_forest(const Representation& rep, const DciConfig& cfg);
// Disentanglement and completeness from a d x k importance matrix.
std::pair<double, double> dci_scores(const Matrix& importance);

struct ImpactMatrix {
    Matrix intensities;  // d x k
    Matrix pairwise_mi;  // d x k
    std::vector<double> joint_mi;
    std::vector<double> factor_entropy;
    std::vector<bool> uncaptured;
};

constexpr double kUncapturedThreshold = 1e-6;

double exclusivity(const std::vector<double>& values);

ImpactMatrix impact_intensity(InfoContext& ctx);
ImpactMatrix impact_intensity(const Representation& rep, const InfoOptions& options);

double edi_modularity(const ImpactMatrix& im);
double edi_compactness(const ImpactMatrix& im);
double edi_explicitness(const ImpactMatrix& im);
// D(c_i) for every code.
std::vector<double> edi_code_disentanglement(const ImpactMatrix& im);

// JSON dump of an impact matrix with per-code and per-factor scores.
std::string impact_matrix_json(const ImpactMatrix& im);

// "name" or "name@estimator", e.g. "mig@binned:20".
struct MetricSpec {
    std::string name;
    std::optional<EstimatorChoice> estimator;

    static MetricSpec parse(const std::string& text);
    std::string label() const;
    bool uses_information() const;
};

// Metric names known to the registry; "all" expands to every entry except dci_forest.
const std::vector<std::string>& metric_names();
std::vector<MetricSpec> parse_metric_list(const std::string& text);

// Evaluates one metric; the report uses spec.label() as the metric name.
MetricReport evaluate_metric(const MetricSpec& spec, const Representation& rep, std::uint64_t seed);

}  // namespace edibench
