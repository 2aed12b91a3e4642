#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "edibench/harness.hpp"
#include "edibench/kernels.hpp"
#include "edibench/metrics.hpp"
#include "edibench/synth.hpp"

namespace fs = std::filesystem;
using namespace edibench;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::size_t n = 20000;
    std::size_t reps = 5;
    std::size_t seeds = 10;
    std::string alphas = "0:1:0.2";
    std::string metrics = "all";
    std::string estimator = "auto";
    std::string out;
    bool paper_scale = false;
    std::uint64_t master_seed = 0;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* app, Common& c, bool sweep_flags) {
    app->add_option("--n", c.n, "Samples per representation")->check(CLI::Range(2, 100000000));
    app->add_option("--reps", c.reps, "Representations per cell (M)")->check(CLI::PositiveNumber);
    app->add_option("--seeds", c.seeds, "Number of seeds (s)")->check(CLI::PositiveNumber);
    if (sweep_flags) app->add_option("--alphas", c.alphas, "Alpha grid lo:hi:step (inclusive)");
    app->add_option("--metrics", c.metrics, "Comma list of metric[@estimator], or all");
    app->add_option("--estimator", c.estimator, "auto|discrete|binned:B|ksg:K|dv for information metrics");
    app->add_option("--out", c.out, "Output CSV path")->required();
    app->add_flag("--paper-scale", c.paper_scale, "Use N, M and s from the full-scale study");
    app->add_option("--master-seed", c.master_seed, "Master seed (EDIBENCH_SEED overrides)");
    app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig build_config(CLI::App* app, const Common& c, Experiment e, bool uses_alphas) {
    ExperimentConfig cfg;
    cfg.experiment = e;
    std::uint64_t master = c.master_seed;
    if (const char* env = std::getenv("EDIBENCH_SEED")) {
        try {
            master = std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("EDIBENCH_SEED is not an unsigned integer: " + std::string(env));
        }
    }
    Preset p{c.n, c.reps, c.seeds};
    if (c.paper_scale) {
        Preset full = paper_preset(e);
        if (app->count("--n") == 0) p.n = full.n;
        if (app->count("--reps") == 0) p.reps = full.reps;
        if (app->count("--seeds") == 0) p.seeds = full.seeds;
    }
    cfg.n = p.n;
    cfg.reps = p.reps;
    cfg.seeds = derive_seeds(master, p.seeds);
    cfg.jobs = c.jobs;
    try {
        cfg.metrics = parse_metric_list(c.metrics);
    } catch (const Error& err) {
        throw UsageError("--metrics: " + std::string(err.what()));
    }
    if (c.estimator != "auto") {
        try {
            cfg.estimator = EstimatorChoice::parse(c.estimator);
        } catch (const Error& err) {
            throw UsageError("--estimator: " + std::string(err.what()));
        }
    }
    if (uses_alphas) {
        try {
            cfg.alphas = parse_alpha_grid(c.alphas);
        } catch (const Error& err) {
            throw UsageError("--alphas: " + std::string(err.what()));
        }
    }
    return cfg;
}

std::string sibling(const std::string& out, const std::string& suffix) { return out + suffix; }

void finish(const RunOutput& r, const std::string& out) {
    write_results_csv(r.rows, out);
    if (!r.errors.empty()) {
        write_errors_log(r.errors, sibling(out, ".errors.log"));
        std::cerr << r.errors.size() << " metric evaluations failed; see " << sibling(out, ".errors.log") << '\n';
    }
}

std::string kinds_for(const std::string& csv) {
    fs::path p(csv);
    return (p.parent_path() / (p.stem().string() + ".kinds.json")).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disentanglement metric benchmark: EDI and baseline metrics on synthetic and ingested representations"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    Common common;
    std::string cases = "000,001,010,011,100,101,110,111";
    auto* calibrate = app.add_subcommand("calibrate", "Score the eight boundary cases");
    add_common(calibrate, common, false);
    calibrate->add_option("--cases", cases, "Comma list of boundary cases");

    std::string family;
    std::size_t dims = 6;
    auto* sweep = app.add_subcommand("sweep", "Nonlinear, rotation or noise sweep over alpha");
    add_common(sweep, common, true);
    sweep->add_option("--family", family, "nonlinear|rotation|noise")
        ->required()
        ->check(CLI::IsMember({"nonlinear", "rotation", "noise"}));
    sweep->add_option("--dims", dims, "Number of factors and codes (k = d)")->check(CLI::PositiveNumber);

    std::string eff_case = "111";
    std::vector<std::size_t> sizes{100, 1000, 10000};
    bool timing = false;
    std::vector<std::size_t> timing_sizes{1000, 10000, 100000};
    auto* efficiency = app.add_subcommand("efficiency", "Subset score deltas and optional timing");
    add_common(efficiency, common, false);
    efficiency->add_option("--case", eff_case, "Boundary case generating the data");
    efficiency->add_option("--sizes", sizes, "Subset sizes compared against the full sample")->delimiter(',');
    efficiency->add_flag("--timing", timing, "Also write median-of-3 timings to <out>.timing.csv");
    efficiency->add_option("--timing-sizes", timing_sizes, "Sizes for the timing run")->delimiter(',');

    std::string input_dir;
    auto* agree = app.add_subcommand("agree", "Rank agreement of metrics over ingested representations");
    add_common(agree, common, false);
    agree->add_option("--input-dir", input_dir, "Directory of <name>.csv files with <name>.kinds.json sidecars")
        ->required();

    std::string input, kinds, diagnostics;
    auto* score = app.add_subcommand("score", "Score one representation file");
    add_common(score, common, false);
    score->add_option("--input", input, "Representation CSV")->required();
    score->add_option("--kinds", kinds, "Kinds sidecar (default <input stem>.kinds.json)");
    score->add_option("--diagnostics", diagnostics, "Write the EDI impact matrix as JSON here");

    std::string gen_case, gen_family, gen_kinds;
    double gen_alpha = 0.0;
    auto* gen = app.add_subcommand("gen", "Write a synthetic representation as CSV");
    add_common(gen, common, false);
    gen->add_option("--case", gen_case, "Boundary case");
    gen->add_option("--family", gen_family, "Sweep family")->check(CLI::IsMember({"nonlinear", "rotation", "noise"}));
    gen->add_option("--alpha", gen_alpha, "Sweep alpha")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--dims", dims, "Sweep k = d")->check(CLI::PositiveNumber);
    gen->add_option("--kinds", gen_kinds, "Kinds sidecar path (default <out stem>.kinds.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (calibrate->parsed()) {
            auto cfg = build_config(calibrate, common, Experiment::Calibrate, false);
            cfg.cases.clear();
            std::stringstream ss(cases);
            for (std::string c; std::getline(ss, c, ',');) {
                try {
                    BoundaryCase{c}.validate();
                } catch (const Error& err) {
                    throw UsageError("--cases: " + std::string(err.what()));
                }
                cfg.cases.push_back(c);
            }
            finish(run_experiment(cfg), common.out);
        } else if (sweep->parsed()) {
            Family fam = parse_family(family);
            Experiment e = fam == Family::Nonlinear ? Experiment::Nonlinear
                           : fam == Family::Rotation ? Experiment::Rotation
                                                     : Experiment::Noise;
            auto cfg = build_config(sweep, common, e, true);
            cfg.k = cfg.d = dims;
            finish(run_experiment(cfg), common.out);
        } else if (efficiency->parsed()) {
            auto cfg = build_config(efficiency, common, Experiment::Efficiency, false);
            if (efficiency->count("--n") == 0 && !common.paper_scale) cfg.n = 100000;
            try {
                BoundaryCase{eff_case}.validate();
            } catch (const Error& err) {
                throw UsageError("--case: " + std::string(err.what()));
            }
            cfg.cases = {eff_case};
            for (auto m : sizes)
                if (m < 2 || m > cfg.n) throw UsageError("--sizes: " + std::to_string(m) + " is outside [2, --n]");
            auto with_full = sizes;
            if (std::find(with_full.begin(), with_full.end(), cfg.n) == with_full.end()) with_full.push_back(cfg.n);
            if (timing) {
                if (timing_sizes.size() < 3) throw UsageError("--timing-sizes: need at least 3 sizes");
                for (std::size_t i = 1; i < timing_sizes.size(); ++i)
                    if (timing_sizes[i] <= timing_sizes[i - 1])
                        throw UsageError("--timing-sizes: sizes must strictly increase");
            }
            auto result = sample_efficiency(cfg, with_full);
            finish(result, common.out);
            if (timing) write_results_csv(time_complexity(cfg, timing_sizes).rows, sibling(common.out, ".timing.csv"));
        } else if (agree->parsed()) {
            auto cfg = build_config(agree, common, Experiment::Agree, false);
            if (!fs::is_directory(input_dir)) throw Error(ErrorCode::IoError, "input directory not found: " + input_dir);
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(input_dir))
                if (entry.path().extension() == ".csv") files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) cfg.inputs.push_back({f.string(), kinds_for(f.string())});
            if (cfg.inputs.size() < 2)
                throw Error(ErrorCode::TooFewSamples, "agreement needs at least 2 representation files in " + input_dir);
            RunOutput scores;
            auto reports = score_inputs(cfg, &scores.errors);
            for (std::size_t f = 0; f < reports.size(); ++f)
                for (const auto& e : reports[f].entries())
                    scores.rows.push_back({"agree", 0.0, cfg.seeds.front(), f, e.metric, component_name(e.component), e.value, 0.0});
            std::vector<SeriesKey> series;
            for (const auto& e : reports.front().entries()) {
                std::vector<double> v;
                for (const auto& r : reports)
                    if (auto x = r.find(e.metric, e.component)) v.push_back(*x);
                bool constant = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
                if (constant)
                    scores.errors.push_back(SeriesKey{e.metric, e.component}.label() +
                                            ": constant across inputs, left out of the agreement matrix");
                else
                    series.push_back({e.metric, e.component});
            }
            if (series.empty()) throw Error(ErrorCode::ZeroVariance, "every metric is constant across the inputs");
            auto matrix = agreement_matrix(reports, series);
            write_agreement_csv(matrix, common.out);
            write_results_csv(scores.rows, sibling(common.out, ".scores.csv"));
            if (!scores.errors.empty()) write_errors_log(scores.errors, sibling(common.out, ".errors.log"));
        } else if (score->parsed()) {
            auto cfg = build_config(score, common, Experiment::Score, false);
            cfg.inputs = {{input, kinds.empty() ? kinds_for(input) : kinds}};
            if (!fs::exists(input)) throw Error(ErrorCode::IoError, "input file not found: " + input);
            auto result = run_experiment(cfg);
            if (!diagnostics.empty()) {
                auto rep = read_representation_csv(cfg.inputs[0].csv, cfg.inputs[0].kinds);
                InfoOptions opt = cfg.estimator ? InfoOptions::uniform(*cfg.estimator, cfg.seeds.front())
                                                : InfoOptions::automatic(cfg.seeds.front());
                std::ofstream f(diagnostics);
                if (!f) throw Error(ErrorCode::IoError, "cannot write " + diagnostics);
                f << impact_matrix_json(impact_intensity(rep, opt)) << '\n';
            }
            finish(result, common.out);
        } else if (gen->parsed()) {
            auto cfg = build_config(gen, common, Experiment::Score, false);
            if (gen_case.empty() == gen_family.empty()) throw UsageError("gen: give exactly one of --case or --family");
            Representation rep;
            std::uint64_t seed = cfg.seeds.front();
            if (!gen_case.empty()) {
                try {
                    BoundaryCase{gen_case}.validate();
                } catch (const Error& err) {
                    throw UsageError("--case: " + std::string(err.what()));
                }
                rep = gen_boundary(BoundaryCase{gen_case}, cfg.n, seed);
            } else {
                rep = gen_sweep(SweepSpec{parse_family(gen_family), gen_alpha, dims, dims, cfg.n, seed});
            }
            write_representation_csv(rep, common.out, gen_kinds.empty() ? kinds_for(common.out) : gen_kinds);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
