#include "edibench/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace edibench {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DomainViolation: return "DomainViolation";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::HeaderMismatch: return "HeaderMismatch";
        case ErrorCode::MissingKinds: return "MissingKinds";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::TrainingDiverged: return "TrainingDiverged";
        case ErrorCode::IncompatibleEstimator: return "IncompatibleEstimator";
        case ErrorCode::DegenerateFactor: return "DegenerateFactor";
        case ErrorCode::DegenerateCode: return "DegenerateCode";
        case ErrorCode::ZeroEntropyFactor: return "ZeroEntropyFactor";
        case ErrorCode::ZeroEntropyCode: return "ZeroEntropyCode";
        case ErrorCode::ZeroMaxMi: return "ZeroMaxMi";
        case ErrorCode::AllZeroImportance: return "AllZeroImportance";
        case ErrorCode::InvalidCase: return "InvalidCase";
        case ErrorCode::TooFewRequested: return "TooFewRequested";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::MissingMetric: return "MissingMetric";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = data[r * cols + c];
    return out;
}

void Matrix::set_column(std::size_t c, const std::vector<double>& values) {
    for (std::size_t r = 0; r < rows; ++r) data[r * cols + c] = values[r];
}

Matrix Matrix::from_columns(const std::vector<std::vector<double>>& columns) {
    if (columns.empty()) return {};
    Matrix m(columns[0].size(), columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != m.rows)
            throw Error(ErrorCode::DimensionMismatch, "columns of unequal length");
        m.set_column(c, columns[c]);
    }
    return m;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& idx) const {
    Matrix m(idx.size(), cols);
    for (std::size_t i = 0; i < idx.size(); ++i)
        std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(idx[i] * cols), cols,
                    m.data.begin() + static_cast<std::ptrdiff_t>(i * cols));
    return m;
}

Matrix Matrix::select_columns(const std::vector<std::size_t>& idx) const {
    Matrix m(rows, idx.size());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < idx.size(); ++j) m(r, j) = (*this)(r, idx[j]);
    return m;
}

FactorKind FactorKind::discrete(int categories) {
    if (categories < 2) throw Error(ErrorCode::DomainViolation, "discrete factor needs at least 2 categories");
    FactorKind k;
    k.type = Type::Discrete;
    k.categories = categories;
    return k;
}

FactorKind FactorKind::continuous(double lower, double upper) {
    if (!(lower < upper)) throw Error(ErrorCode::DomainViolation, "continuous factor needs lower < upper");
    FactorKind k;
    k.type = Type::Continuous;
    k.lower = lower;
    k.upper = upper;
    return k;
}

bool FactorKind::operator==(const FactorKind& other) const {
    if (type != other.type) return false;
    if (type == Type::Discrete) return categories == other.categories;
    return lower == other.lower && upper == other.upper;
}

const char* component_name(Component c) {
    switch (c) {
        case Component::Modularity: return "modularity";
        case Component::Compactness: return "compactness";
        case Component::Explicitness: return "explicitness";
        case Component::Single: return "single";
    }
    return "single";
}

Component parse_component(const std::string& s) {
    if (s == "modularity") return Component::Modularity;
    if (s == "compactness") return Component::Compactness;
    if (s == "explicitness") return Component::Explicitness;
    if (s == "single") return Component::Single;
    throw Error(ErrorCode::ParseError, "unknown component '" + s + "'");
}

void MetricReport::add(const std::string& metric, Component component, double value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::NonFinite, "metric " + metric + " produced a non-finite value");
    for (const auto& e : entries_)
        if (e.metric == metric && e.component == component)
            throw Error(ErrorCode::InvalidArgument, "duplicate report entry " + metric + "/" + component_name(component));
    entries_.push_back({metric, component, value});
}

std::optional<double> MetricReport::find(const std::string& metric, Component component) const {
    for (const auto& e : entries_)
        if (e.metric == metric && e.component == component) return e.value;
    return std::nullopt;
}

void MetricReport::merge(const MetricReport& other) {
    for (const auto& e : other.entries_) add(e.metric, e.component, e.value);
}

void validate_representation(const Representation& rep) {
    if (rep.factors.rows != rep.codes.rows)
        throw Error(ErrorCode::DimensionMismatch, "factors have " + std::to_string(rep.factors.rows) +
                                                      " rows, codes have " + std::to_string(rep.codes.rows));
    if (rep.factors.rows < 2) throw Error(ErrorCode::DimensionMismatch, "representation needs at least 2 rows");
    if (rep.factors.cols == 0 || rep.codes.cols == 0)
        throw Error(ErrorCode::DimensionMismatch, "representation needs at least one factor and one code");
    if (rep.factor_kinds.size() != rep.factors.cols)
        throw Error(ErrorCode::DimensionMismatch, "factor_kinds length differs from factor count");
    if (rep.factors.data.size() != rep.factors.rows * rep.factors.cols ||
        rep.codes.data.size() != rep.codes.rows * rep.codes.cols)
        throw Error(ErrorCode::DimensionMismatch, "matrix storage does not match its shape");
    for (double v : rep.factors.data)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite factor value");
    for (double v : rep.codes.data)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite code value");
    if (rep.alpha && !(*rep.alpha >= 0.0 && *rep.alpha <= 1.0))
        throw Error(ErrorCode::DomainViolation, "alpha outside [0,1]");
    for (std::size_t j = 0; j < rep.k(); ++j) {
        const auto& kind = rep.factor_kinds[j];
        if (kind.is_discrete()) {
            if (kind.categories < 2) throw Error(ErrorCode::DomainViolation, "discrete factor with < 2 categories");
            for (std::size_t r = 0; r < rep.n(); ++r) {
                double v = rep.factors(r, j);
                if (v != std::floor(v) || v < 0 || v >= kind.categories)
                    throw Error(ErrorCode::DomainViolation, "factor z" + std::to_string(j) + " row " +
                                                                std::to_string(r) + " holds " + format_real(v));
            }
        } else if (!(kind.lower < kind.upper)) {
            throw Error(ErrorCode::DomainViolation, "continuous factor with lower >= upper");
        }
    }
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    if (s.empty()) throw Error(ErrorCode::ParseError, "empty field at " + where);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw Error(ErrorCode::ParseError, "bad number '" + s + "' at " + where);
    return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
    if (s.empty() || s[0] == '-') throw Error(ErrorCode::ParseError, "bad integer '" + s + "' at " + where);
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) throw Error(ErrorCode::ParseError, "bad integer '" + s + "' at " + where);
    return v;
}

}  // namespace

std::vector<FactorKind> read_kinds_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingKinds, "cannot open kinds file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::MissingKinds, "invalid JSON in " + path + ": " + e.what());
    }
    if (!j.is_array()) throw Error(ErrorCode::MissingKinds, path + " is not a JSON list");
    std::vector<FactorKind> kinds;
    for (const auto& item : j) {
        try {
            std::string kind = item.at("kind").get<std::string>();
            if (kind == "discrete") {
                kinds.push_back(FactorKind::discrete(item.at("categories").get<int>()));
            } else if (kind == "continuous") {
                kinds.push_back(FactorKind::continuous(item.at("lower").get<double>(), item.at("upper").get<double>()));
            } else {
                throw Error(ErrorCode::MissingKinds, "unknown kind '" + kind + "' in " + path);
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MissingKinds, "malformed kind entry in " + path + ": " + e.what());
        }
    }
    return kinds;
}

void write_kinds_json(const std::vector<FactorKind>& kinds, const std::string& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& k : kinds) {
        if (k.is_discrete())
            j.push_back({{"kind", "discrete"}, {"categories", k.categories}});
        else
            j.push_back({{"kind", "continuous"}, {"lower", k.lower}, {"upper", k.upper}});
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << j.dump() << "\n";
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

Representation read_representation_csv(const std::string& path, const std::string& kinds_path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::HeaderMismatch, "empty file " + path);
    auto header = split_csv_line(line);
    std::size_t k = 0;
    while (k < header.size() && header[k] == "z" + std::to_string(k)) ++k;
    std::size_t d = 0;
    while (k + d < header.size() && header[k + d] == "c" + std::to_string(d)) ++d;
    if (k == 0 || d == 0 || k + d != header.size())
        throw Error(ErrorCode::HeaderMismatch, "header of " + path + " is not z0..z{k-1},c0..c{d-1}");

    auto kinds = read_kinds_json(kinds_path);
    if (kinds.size() != k)
        throw Error(ErrorCode::MissingKinds, kinds_path + " lists " + std::to_string(kinds.size()) +
                                                 " kinds for " + std::to_string(k) + " factors");

    std::vector<double> fz, cz;
    std::size_t n = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        std::string where = path + ":" + std::to_string(lineno);
        if (fields.size() != k + d)
            throw Error(ErrorCode::ParseError, "expected " + std::to_string(k + d) + " fields, got " +
                                                   std::to_string(fields.size()) + " at " + where);
        for (std::size_t c = 0; c < k; ++c) fz.push_back(parse_double(fields[c], where));
        for (std::size_t c = 0; c < d; ++c) cz.push_back(parse_double(fields[k + c], where));
        ++n;
    }
    Representation rep;
    rep.factors.rows = n;
    rep.factors.cols = k;
    rep.factors.data = std::move(fz);
    rep.codes.rows = n;
    rep.codes.cols = d;
    rep.codes.data = std::move(cz);
    rep.factor_kinds = std::move(kinds);
    validate_representation(rep);
    return rep;
}

void write_representation_csv(const Representation& rep, const std::string& path, const std::string& kinds_path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    for (std::size_t j = 0; j < rep.k(); ++j) out << (j ? "," : "") << "z" << j;
    for (std::size_t i = 0; i < rep.d(); ++i) out << ",c" << i;
    out << "\n";
    char buf[64];
    for (std::size_t r = 0; r < rep.n(); ++r) {
        for (std::size_t j = 0; j < rep.k(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", rep.factors(r, j));
            out << (j ? "," : "") << buf;
        }
        for (std::size_t i = 0; i < rep.d(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", rep.codes(r, i));
            out << "," << buf;
        }
        out << "\n";
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
    write_kinds_json(rep.factor_kinds, kinds_path);
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << kResultsHeader << "\n";
    for (const auto& r : rows) {
        out << r.experiment << ',' << format_real(r.alpha) << ',' << r.seed << ',' << r.rep_index << ',' << r.metric
            << ',' << r.component << ',' << format_real(r.value) << ',' << format_real(r.elapsed_ms) << "\n";
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader)
        throw Error(ErrorCode::HeaderMismatch, "unexpected results header in " + path);
    std::vector<ResultRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        std::string where = path + ":" + std::to_string(lineno);
        if (f.size() != 8) throw Error(ErrorCode::ParseError, "expected 8 fields at " + where);
        ResultRow r;
        r.experiment = f[0];
        r.alpha = parse_double(f[1], where);
        r.seed = parse_u64(f[2], where);
        r.rep_index = parse_u64(f[3], where);
        r.metric = f[4];
        r.component = f[5];
        r.value = parse_double(f[6], where);
        r.elapsed_ms = parse_double(f[7], where);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace edibench
