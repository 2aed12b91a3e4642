#include "edibench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "edibench/rng.hpp"

namespace edibench {

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Calibrate: return "calibrate";
        case Experiment::Nonlinear: return "nonlinear";
        case Experiment::Rotation: return "rotation";
        case Experiment::Noise: return "noise";
        case Experiment::Efficiency: return "efficiency";
        case Experiment::Agree: return "agree";
        case Experiment::Score: return "score";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "at least one seed is required");
    if (metrics.empty()) throw Error(ErrorCode::InvalidArgument, "at least one metric is required");
    if (reps == 0) throw Error(ErrorCode::InvalidArgument, "reps must be positive");
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "n must be at least 2");
    if (alphas.empty()) throw Error(ErrorCode::InvalidArgument, "alpha grid is empty");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha values must lie in [0,1]");
    if ((experiment == Experiment::Score || experiment == Experiment::Agree) && inputs.empty())
        throw Error(ErrorCode::InvalidArgument, "score and agree need input files");
    if (estimator) estimator->validate();
    for (const auto& c : cases) BoundaryCase{c}.validate();
}

Preset desk_preset() { return {20000, 5, 10}; }

Preset paper_preset(Experiment e) { return {e == Experiment::Calibrate ? std::size_t{50000} : std::size_t{20000}, 50, 50}; }

std::vector<std::uint64_t> derive_seeds(std::uint64_t master, std::size_t count) {
    std::vector<std::uint64_t> out;
    for (std::size_t t = 0; t < count; ++t) out.push_back(hash64(master, t));
    return out;
}

std::uint64_t cell_seed(std::uint64_t seed, const std::string& experiment, std::size_t alpha_index,
                        std::size_t rep_index) {
    return hash64(seed, hash_string(experiment), alpha_index, rep_index);
}

std::vector<double> parse_alpha_grid(const std::string& text) {
    auto bad = [&] { return Error(ErrorCode::InvalidArgument, "bad alpha grid '" + text + "', expected lo:hi:step"); };
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    std::vector<double> v;
    try {
        for (const auto& s : parts) {
            std::size_t used = 0;
            v.push_back(std::stod(s, &used));
            if (used != s.size()) throw bad();
        }
    } catch (const std::logic_error&) {
        throw bad();
    }
    std::vector<double> grid;
    if (v.size() == 1) {
        grid = {v[0]};
    } else if (v.size() == 3) {
        double lo = v[0], hi = v[1], step = v[2];
        if (!(step > 0.0) || hi < lo) throw bad();
        auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
        for (std::size_t i = 0; i <= count; ++i) {
            double a = lo + static_cast<double>(i) * step;
            grid.push_back(std::round(a * 1e12) / 1e12);
        }
    } else {
        throw bad();
    }
    for (double a : grid)
        if (!(a >= 0.0 && a <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha values must lie in [0,1]");
    return grid;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned threads = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

MetricSpec effective(const MetricSpec& spec, const std::optional<EstimatorChoice>& fallback) {
    MetricSpec out = spec;
    if (!out.estimator && fallback && out.uses_information()) out.estimator = fallback;
    return out;
}

std::uint64_t metric_seed(std::uint64_t cell, const MetricSpec& spec) { return hash64(cell, hash_string(spec.label())); }

struct Cell {
    std::string experiment;
    double alpha = 0.0;
    std::size_t alpha_index = 0;
    std::uint64_t seed = 0;
    std::size_t rep_index = 0;
    std::function<Representation()> make;
};

struct CellResult {
    std::vector<ResultRow> rows;
    std::vector<std::string> errors;
};

std::string describe(const Cell& c, const std::string& metric, const std::string& message) {
    std::ostringstream os;
    os << c.experiment << " alpha=" << format_real(c.alpha) << " seed=" << c.seed << " rep=" << c.rep_index << " "
       << metric << ": " << message;
    return os.str();
}

CellResult evaluate_cell(const Cell& cell, const std::vector<MetricSpec>& metrics,
                         const std::optional<EstimatorChoice>& fallback) {
    CellResult out;
    Representation rep;
    try {
        rep = cell.make();
        validate_representation(rep);
    } catch (const std::exception& e) {
        out.errors.push_back(describe(cell, "<representation>", e.what()));
        return out;
    }
    const std::uint64_t cs = cell_seed(cell.seed, cell.experiment, cell.alpha_index, cell.rep_index);
    for (const auto& raw : metrics) {
        MetricSpec spec = effective(raw, fallback);
        try {
            auto start = Clock::now();
            MetricReport report = evaluate_metric(spec, rep, metric_seed(cs, spec));
            double elapsed = ms_since(start);
            for (const auto& e : report.entries())
                out.rows.push_back({cell.experiment, cell.alpha, cell.seed, cell.rep_index, e.metric,
                                    component_name(e.component), e.value, elapsed});
        } catch (const std::exception& e) {
            out.errors.push_back(describe(cell, spec.label(), e.what()));
        }
    }
    return out;
}

RunOutput run_cells(const std::vector<Cell>& cells, const ExperimentConfig& cfg) {
    std::vector<CellResult> results(cells.size());
    parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) { results[i] = evaluate_cell(cells[i], cfg.metrics, cfg.estimator); });
    RunOutput out;
    for (auto& r : results) {
        out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
        out.errors.insert(out.errors.end(), r.errors.begin(), r.errors.end());
    }
    return out;
}

std::vector<Cell> calibration_cells(const ExperimentConfig& cfg, std::size_t n) {
    std::vector<Cell> cells;
    for (const auto& code : cfg.cases) {
        const std::string name = "calibrate:" + code;
        for (std::uint64_t seed : cfg.seeds)
            for (std::size_t r = 0; r < cfg.reps; ++r) {
                std::uint64_t gen_seed = cell_seed(seed, name, 0, r);
                cells.push_back({name, 0.0, 0, seed, r, [code, n, gen_seed] {
                                     return gen_boundary(BoundaryCase{code}, n, gen_seed);
                                 }});
            }
    }
    return cells;
}

std::vector<Cell> sweep_cells(const ExperimentConfig& cfg, Family family) {
    std::vector<Cell> cells;
    const std::string name = family_name(family);
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a)
        for (std::uint64_t seed : cfg.seeds)
            for (std::size_t r = 0; r < cfg.reps; ++r) {
                SweepSpec spec{family, cfg.alphas[a], cfg.k, cfg.d, cfg.n, cell_seed(seed, name, a, r)};
                spec.validate();
                cells.push_back({name, cfg.alphas[a], a, seed, r, [spec] { return gen_sweep(spec); }});
            }
    return cells;
}

}  // namespace

std::vector<MetricReport> score_inputs(const ExperimentConfig& cfg, std::vector<std::string>* errors) {
    std::vector<Representation> reps;
    for (const auto& in : cfg.inputs) reps.push_back(read_representation_csv(in.csv, in.kinds));
    std::vector<MetricReport> reports(reps.size());
    std::vector<std::vector<std::string>> errs(reps.size());
    const std::uint64_t seed = cfg.seeds.front();
    parallel_for(reps.size(), cfg.jobs, [&](std::size_t f) {
        for (const auto& raw : cfg.metrics) {
            MetricSpec spec = effective(raw, cfg.estimator);
            try {
                reports[f].merge(evaluate_metric(spec, reps[f], metric_seed(cell_seed(seed, "score", 0, f), spec)));
            } catch (const std::exception& e) {
                errs[f].push_back(cfg.inputs[f].csv + " " + spec.label() + ": " + e.what());
            }
        }
    });
    if (errors)
        for (auto& e : errs) errors->insert(errors->end(), e.begin(), e.end());
    return reports;
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.experiment) {
        case Experiment::Calibrate: return run_cells(calibration_cells(cfg, cfg.n), cfg);
        case Experiment::Nonlinear: return run_cells(sweep_cells(cfg, Family::Nonlinear), cfg);
        case Experiment::Rotation: return run_cells(sweep_cells(cfg, Family::Rotation), cfg);
        case Experiment::Noise: return run_cells(sweep_cells(cfg, Family::Noise), cfg);
        case Experiment::Efficiency: {
            std::vector<std::size_t> sizes;
            for (std::size_t m = 100; m < cfg.n; m *= 10) sizes.push_back(m);
            sizes.push_back(cfg.n);
            return sample_efficiency(cfg, sizes);
        }
        case Experiment::Score:
        case Experiment::Agree: {
            RunOutput out;
            auto reports = score_inputs(cfg, &out.errors);
            const std::string name = experiment_name(cfg.experiment);
            for (std::size_t f = 0; f < reports.size(); ++f)
                for (const auto& e : reports[f].entries())
                    out.rows.push_back({name, 0.0, cfg.seeds.front(), f, e.metric, component_name(e.component), e.value, 0.0});
            return out;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown experiment");
}

std::vector<AggregateCell> aggregate(const std::vector<ResultRow>& rows) {
    std::map<std::tuple<std::string, double, std::string, std::string>, std::vector<double>> groups;
    for (const auto& r : rows) groups[{r.experiment, r.alpha, r.metric, r.component}].push_back(r.value);
    std::vector<AggregateCell> out;
    for (auto& [key, values] : groups) {
        std::sort(values.begin(), values.end());
        AggregateCell c;
        std::tie(c.experiment, c.alpha, c.metric, c.component) = key;
        c.count = values.size();
        double sum = 0.0;
        for (double v : values) sum += v;
        c.mean = sum / static_cast<double>(c.count);
        if (c.count > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - c.mean) * (v - c.mean);
            c.std = std::sqrt(ss / static_cast<double>(c.count - 1));
        }
        out.push_back(c);
    }
    return out;
}

RunOutput sample_efficiency(const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes) {
    cfg.validate();
    for (std::size_t m : sizes)
        if (m < 2 || m > cfg.n)
            throw Error(ErrorCode::TooFewRequested, "subset size " + std::to_string(m) + " outside [2, n]");
    const std::string code = cfg.cases.empty() ? "111" : cfg.cases.front();
    const std::string name = "efficiency";
    struct Acc {
        double diff = 0.0, elapsed = 0.0;
        std::size_t count = 0;
    };
    // Keyed by (size index, metric label, component); insertion order is kept for output.
    std::vector<std::tuple<std::size_t, std::string, std::string>> order;
    std::map<std::tuple<std::size_t, std::string, std::string>, Acc> acc;
    RunOutput out;
    std::vector<std::vector<MetricReport>> subset_reports(cfg.seeds.size());
    std::vector<MetricReport> full(cfg.seeds.size());
    std::vector<std::vector<std::vector<double>>> times(cfg.seeds.size());
    std::vector<std::vector<std::string>> errs(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.jobs, [&](std::size_t s) {
        const std::uint64_t seed = cfg.seeds[s];
        Representation rep = gen_boundary(BoundaryCase{code}, cfg.n, cell_seed(seed, name, 0, 0));
        subset_reports[s].resize(sizes.size());
        times[s].assign(sizes.size(), std::vector<double>(cfg.metrics.size(), 0.0));
        for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
            MetricSpec spec = effective(cfg.metrics[mi], cfg.estimator);
            const std::uint64_t ms = metric_seed(cell_seed(seed, name, 0, 0), spec);
            try {
                full[s].merge(evaluate_metric(spec, rep, ms));
            } catch (const std::exception& e) {
                errs[s].push_back(name + " seed=" + std::to_string(seed) + " full " + spec.label() + ": " + e.what());
                continue;
            }
            for (std::size_t z = 0; z < sizes.size(); ++z) {
                try {
                    Representation sub = sizes[z] == rep.n() ? rep : subsample(rep, sizes[z], hash64(seed, sizes[z]));
                    auto start = Clock::now();
                    subset_reports[s][z].merge(evaluate_metric(spec, sub, ms));
                    times[s][z][mi] = ms_since(start);
                } catch (const std::exception& e) {
                    errs[s].push_back(name + " seed=" + std::to_string(seed) + " size=" + std::to_string(sizes[z]) + " " +
                                      spec.label() + ": " + e.what());
                }
            }
        }
    });
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
        out.errors.insert(out.errors.end(), errs[s].begin(), errs[s].end());
        for (std::size_t z = 0; z < sizes.size(); ++z)
            for (const auto& e : subset_reports[s][z].entries()) {
                auto ref = full[s].find(e.metric, e.component);
                if (!ref) continue;
                auto key = std::make_tuple(z, e.metric, std::string(component_name(e.component)));
                if (!acc.count(key)) order.push_back(key);
                auto& a = acc[key];
                a.diff += std::fabs(e.value - *ref);
                std::size_t mi = 0;
                for (; mi < cfg.metrics.size(); ++mi)
                    if (effective(cfg.metrics[mi], cfg.estimator).label() == e.metric) break;
                a.elapsed += mi < cfg.metrics.size() ? times[s][z][mi] : 0.0;
                ++a.count;
            }
    }
    std::sort(order.begin(), order.end());
    for (const auto& key : order) {
        const auto& a = acc[key];
        out.rows.push_back({name, 0.0, 0, sizes[std::get<0>(key)], std::get<1>(key), std::get<2>(key),
                            a.diff / static_cast<double>(a.count), a.elapsed / static_cast<double>(a.count)});
    }
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "slope inputs differ in length");
    if (x.size() < 2) throw Error(ErrorCode::TooFewSamples, "slope needs at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::max(y[i], 1e-9)));
        mx += lx.back();
        my += ly.back();
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx <= 0.0) throw Error(ErrorCode::ZeroVariance, "slope needs distinct sizes");
    return sxy / sxx;
}

std::vector<ResultRow> time_targets(const std::vector<TimingTarget>& targets,
                                    const std::function<Representation(std::size_t)>& make,
                                    const std::vector<std::size_t>& sizes, std::uint64_t seed) {
    if (sizes.size() < 3) throw Error(ErrorCode::InvalidArgument, "timing needs at least 3 sizes");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1]) throw Error(ErrorCode::InvalidArgument, "timing sizes must strictly increase");
    std::vector<ResultRow> rows;
    std::vector<std::vector<double>> medians(targets.size());
    for (std::size_t m : sizes) {
        Representation rep = make(m);
        for (std::size_t t = 0; t < targets.size(); ++t) {
            double runs[3];
            for (double& r : runs) {
                auto start = Clock::now();
                targets[t].run(rep, seed);
                r = ms_since(start);
            }
            std::sort(std::begin(runs), std::end(runs));
            medians[t].push_back(runs[1]);
            rows.push_back({"time", 0.0, seed, m, targets[t].name, "time", runs[1], runs[1]});
        }
    }
    std::vector<double> xs(sizes.begin(), sizes.end());
    for (std::size_t t = 0; t < targets.size(); ++t)
        rows.push_back({"time", 0.0, seed, 0, targets[t].name, "slope", loglog_slope(xs, medians[t]), 0.0});
    return rows;
}

RunOutput time_complexity(const ExperimentConfig& cfg, const std::vector<std::size_t>& sizes) {
    cfg.validate();
    const std::string code = cfg.cases.empty() ? "111" : cfg.cases.front();
    const std::uint64_t seed = cfg.seeds.front();
    std::vector<TimingTarget> targets;
    for (const auto& raw : cfg.metrics) {
        MetricSpec spec = effective(raw, cfg.estimator);
        targets.push_back({spec.label(), [spec](const Representation& r, std::uint64_t s) {
                               return evaluate_metric(spec, r, metric_seed(s, spec));
                           }});
    }
    RunOutput out;
    out.rows = time_targets(
        targets, [&](std::size_t m) { return gen_boundary(BoundaryCase{code}, m, cell_seed(seed, "time", 0, m)); },
        sizes, seed);
    return out;
}

namespace {

std::vector<double> mid_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "rank inputs differ in length");
    if (a.size() < 2) throw Error(ErrorCode::TooFewSamples, "rank correlation needs at least 2 values");
    auto ra = mid_ranks(a), rb = mid_ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) throw Error(ErrorCode::ZeroVariance, "rank correlation of a constant series");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::string SeriesKey::label() const {
    return component == Component::Single ? metric : metric + ":" + component_name(component);
}

AgreementMatrix agreement_matrix(const std::vector<MetricReport>& reports, std::vector<SeriesKey> series) {
    if (reports.size() < 2) throw Error(ErrorCode::TooFewSamples, "agreement needs at least 2 representations");
    if (series.empty())
        for (const auto& e : reports.front().entries()) series.push_back({e.metric, e.component});
    std::vector<std::vector<double>> values(series.size());
    for (std::size_t s = 0; s < series.size(); ++s)
        for (std::size_t r = 0; r < reports.size(); ++r) {
            auto v = reports[r].find(series[s].metric, series[s].component);
            if (!v)
                throw Error(ErrorCode::MissingMetric,
                            "representation " + std::to_string(r) + " lacks " + series[s].label());
            values[s].push_back(*v);
        }
    AgreementMatrix out;
    for (const auto& s : series) out.names.push_back(s.label());
    out.rho = Matrix(series.size(), series.size());
    for (std::size_t a = 0; a < series.size(); ++a) {
        out.rho(a, a) = 1.0;
        for (std::size_t b = a + 1; b < series.size(); ++b) out.rho(a, b) = out.rho(b, a) = spearman_rho(values[a], values[b]);
    }
    return out;
}

void write_agreement_csv(const AgreementMatrix& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
    f << "metric";
    for (const auto& n : m.names) f << ',' << n;
    f << '\n';
    for (std::size_t r = 0; r < m.names.size(); ++r) {
        f << m.names[r];
        for (std::size_t c = 0; c < m.names.size(); ++c) f << ',' << format_real(m.rho(r, c));
        f << '\n';
    }
    if (!f) throw Error(ErrorCode::IoError, "failed writing " + path);
}

void write_errors_log(const std::vector<std::string>& errors, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
    for (const auto& e : errors) f << e << '\n';
}

}  // namespace edibench
