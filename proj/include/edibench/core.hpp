#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace edibench {

enum class ErrorCode {
    DimensionMismatch,
    DomainViolation,
    NonFinite,
    ParseError,
    HeaderMismatch,
    MissingKinds,
    IoError,
    EmptyInput,
    LengthMismatch,
    TooFewSamples,
    TrainingDiverged,
    IncompatibleEstimator,
    DegenerateFactor,
    DegenerateCode,
    ZeroEntropyFactor,
    ZeroEntropyCode,
    ZeroMaxMi,
    AllZeroImportance,
    InvalidCase,
    TooFewRequested,
    ZeroVariance,
    MissingMetric,
    InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::vector<double> column(std::size_t c) const;
    void set_column(std::size_t c, const std::vector<double>& values);
    static Matrix from_columns(const std::vector<std::vector<double>>& columns);
    Matrix select_rows(const std::vector<std::size_t>& idx) const;
    Matrix select_columns(const std::vector<std::size_t>& idx) const;
};

struct FactorKind {
    enum class Type { Discrete, Continuous };
    Type type = Type::Discrete;
    int categories = 2;
    double lower = 0.0;
    double upper = 1.0;

    static FactorKind discrete(int categories);
    static FactorKind continuous(double lower, double upper);
    bool is_discrete() const { return type == Type::Discrete; }
    bool operator==(const FactorKind& other) const;
};

struct Representation {
    Matrix factors;
    Matrix codes;
    std::vector<FactorKind> factor_kinds;
    std::uint64_t seed = 0;
    std::optional<double> alpha;

    std::size_t n() const { return factors.rows; }
    std::size_t k() const { return factors.cols; }
    std::size_t d() const { return codes.cols; }
};

enum class Component { Modularity, Compactness, Explicitness, Single };

const char* component_name(Component c);
Component parse_component(const std::string& s);

struct MetricEntry {
    std::string metric;
    Component component = Component::Single;
    double value = 0.0;
};

class MetricReport {
public:
    void add(const std::string& metric, Component component, double value);
    const std::vector<MetricEntry>& entries() const { return entries_; }
    std::optional<double> find(const std::string& metric, Component component) const;
    void merge(const MetricReport& other);

private:
    std::vector<MetricEntry> entries_;
};

struct ResultRow {
    std::string experiment;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t rep_index = 0;
    std::string metric;
    std::string component;
    double value = 0.0;
    double elapsed_ms = 0.0;
};

void validate_representation(const Representation& rep);

Representation read_representation_csv(const std::string& path, const std::string& kinds_path);
void write_representation_csv(const Representation& rep, const std::string& path,
                              const std::string& kinds_path);

std::vector<FactorKind> read_kinds_json(const std::string& path);
void write_kinds_json(const std::vector<FactorKind>& kinds, const std::string& path);

inline const char* kResultsHeader = "experiment,alpha,seed,rep_index,metric,component,value,elapsed_ms";

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_results_csv(const std::string& path);

// Formats a double with 12 significant digits.
std::string format_real(double v);

}  // namespace edibench
