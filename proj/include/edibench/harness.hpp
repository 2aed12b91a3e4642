#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edibench/core.hpp"
#include "edibench/metrics.hpp"
#include "edibench/synth.hpp"

namespace edibench {

enum class Experiment { Calibrate, Nonlinear, Rotation, Noise, Efficiency, Agree, Score };

const char* experiment_name(Experiment e);

struct InputFile {
    std::string csv;
    std::string kinds;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::Calibrate;
    std::vector<double> alphas{0.0};
    std::size_t n = 20000;
    std::size_t reps = 5;
    std::vector<std::uint64_t> seeds;
    std::vector<MetricSpec> metrics;
    // Applied to information metrics that carry no estimator of their own.
    std::optional<EstimatorChoice> estimator;
    std::vector<std::string> cases = boundary_codes();
    std::size_t k = 6;
    std::size_t d = 6;
    std::vector<InputFile> inputs;
    unsigned jobs = 1;

    void validate() const;
};

struct Preset {
    std::size_t n;
    std::size_t reps;
    std::size_t seeds;
};

Preset desk_preset();
Preset paper_preset(Experiment e);

// seed_t = hash64(master, t) for t in [0, count).
std::vector<std::uint64_t> derive_seeds(std::uint64_t master, std::size_t count);
std::uint64_t cell_seed(std::uint64_t seed, const std::string& experiment, std::size_t alpha_index,
                        std::size_t rep_index);

// Inclusive grid "lo:hi:step"; a single number is a one-point grid.
std::vector<double> parse_alpha_grid(const std::string& text);

struct RunOutput {
    std::vector<ResultRow> rows;
    std::vector<std::string> errors;
};

// Failed metric evaluations are omitted from rows and described in errors.
RunOutput run_experiment(const ExperimentConfig& cfg);

struct AggregateCell {
    std::string experiment;
    double alpha = 0.0;
    std::string metric;
    std::string component;
    double mean = 0.0;
    double std = 0.0;
    std::size_t count = 0;
};

std::vector<AggregateCell> aggregate(const std::vector<ResultRow>& rows);

// Mean |score(subset) - score(full)| over seeds for each metric component and size; rep_index holds the size.
RunOutput sample_efficiency(const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes);

using TimedMetric = std::function<MetricReport(const Representation&, std::uint64_t)>;

struct TimingTarget {
    std::string name;
    TimedMetric run;
};

// Median-of-3 wall time per (metric, size), then a log-log slope row (component "slope") per metric.
// Cells run one at a time. Representations come from the first configured case at each size.
RunOutput time_complexity(const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes);
std::vector<ResultRow> time_targets(const std::vector<TimingTarget>& targets,
                                    const std::function<Representation(std::size_t)>& make,
                                    const std::vector<std::size_t>& sizes, std::uint64_t seed);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b);

struct AgreementMatrix {
    std::vector<std::string> names;
    Matrix rho;
};

struct SeriesKey {
    std::string metric;
    Component component = Component::Single;
    std::string label() const;
};

// Series default to every (metric, component) of the first report.
AgreementMatrix agreement_matrix(const std::vector<MetricReport>& reports, std::vector<SeriesKey> series = {});
void write_agreement_csv(const AgreementMatrix& m, const std::string& path);

// Scores every input file; reports are returned in input order.
std::vector<MetricReport> score_inputs(const ExperimentConfig& cfg, std::vector<std::string>* errors);

void write_errors_log(const std::vector<std::string>& errors, const std::string& path);

// Runs fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace edibench
