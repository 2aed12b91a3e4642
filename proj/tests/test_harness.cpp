#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "doctest.h"
#include "edibench/harness.hpp"
#include "edibench/rng.hpp"
#include "support.hpp"

using namespace edibench;

namespace {

ResultRow row(const std::string& metric, double value, double alpha = 0.0) {
    return ResultRow{"exp", alpha, 1, 0, metric, "single", value, 0.0};
}

ExperimentConfig cheap(Experiment e) {
    ExperimentConfig cfg;
    cfg.experiment = e;
    cfg.n = 1000;
    cfg.reps = 1;
    cfg.seeds = derive_seeds(42, 1);
    cfg.metrics = parse_metric_list("mig,modularity");
    return cfg;
}

MetricReport single(double v, const std::string& name = "m") {
    MetricReport r;
    r.add(name, Component::Single, v);
    return r;
}

}  // namespace

TEST_CASE("aggregate mean and unbiased std") {
    auto cells = aggregate({row("m", 1.0), row("m", 2.0), row("m", 3.0), row("m", 5.0, 0.5)});
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].alpha == 0.0);
    CHECK(cells[0].mean == doctest::Approx(2.0));
    CHECK(cells[0].std == doctest::Approx(1.0));
    CHECK(cells[0].count == 3);
    CHECK(cells[1].mean == doctest::Approx(5.0));
    CHECK(cells[1].std == 0.0);
}

TEST_CASE("aggregate is invariant under row permutation") {
    Rng rng(3);
    std::vector<ResultRow> rows;
    for (int i = 0; i < 60; ++i) rows.push_back(row(i % 3 == 0 ? "a" : "b", uniform01(rng), 0.25 * (i % 4)));
    auto base = aggregate(rows);
    for (int t = 0; t < 5; ++t) {
        auto perm = permutation(rows.size(), rng);
        std::vector<ResultRow> shuffled;
        for (auto p : perm) shuffled.push_back(rows[p]);
        auto other = aggregate(shuffled);
        REQUIRE(other.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(other[i].metric == base[i].metric);
            CHECK(other[i].mean == base[i].mean);
            CHECK(other[i].std == base[i].std);
        }
    }
}

TEST_CASE("spearman examples") {
    CHECK(spearman_rho({1, 2, 3, 4, 5}, {2, 4, 6, 8, 10}) == doctest::Approx(1.0));
    CHECK(spearman_rho({1, 2, 3, 4, 5}, {5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman_rho({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}) == doctest::Approx(1.0));
    // 1 - 6 * sum d^2 / (n (n^2 - 1)) with d = (0,2,-1,-1,0): 1 - 36/120
    CHECK(spearman_rho({1, 2, 3, 4, 5}, {1, 4, 2, 3, 5}) == doctest::Approx(0.7));
    // Ties use mid-ranks: ranks (1.5,1.5,3,4) vs (1,2,3,4)
    CHECK(spearman_rho({1, 1, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(4.5 / std::sqrt(4.5 * 5.0)));
    CHECK_THROWS_AS(spearman_rho({1, 1, 1}, {1, 2, 3}), Error);
    CHECK_THROWS_AS(spearman_rho({1, 2}, {1, 2, 3}), Error);
}

TEST_CASE("agreement matrix properties") {
    Rng rng(5);
    std::vector<MetricReport> reports;
    for (int r = 0; r < 20; ++r) {
        double a = uniform01(rng), b = uniform01(rng);
        MetricReport rep;
        rep.add("a", Component::Single, a);
        rep.add("neg", Component::Single, -a);
        rep.add("cube", Component::Single, a * a * a + 7.0);
        rep.add("b", Component::Single, b);
        reports.push_back(rep);
    }
    auto m = agreement_matrix(reports);
    REQUIRE(m.names.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(m.rho(i, i) == 1.0);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(m.rho(i, j) == m.rho(j, i));
            CHECK(std::fabs(m.rho(i, j)) <= 1.0);
        }
    }
    CHECK(m.rho(0, 1) == doctest::Approx(-1.0));
    CHECK(m.rho(0, 2) == doctest::Approx(1.0));

    reports[3] = single(0.5, "a");
    CHECK_THROWS_AS(agreement_matrix(reports), Error);
    try {
        agreement_matrix(reports);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingMetric);
    }
}

TEST_CASE("agreement over synthetic representations") {
    std::vector<MetricReport> reports;
    for (int r = 0; r < 20; ++r) {
        auto rep = gen_rotation(SweepSpec{Family::Rotation, 0.025 * r, 3, 3, 600, static_cast<std::uint64_t>(r)});
        MetricReport rpt;
        for (auto& spec : parse_metric_list("mig,dci")) rpt.merge(evaluate_metric(spec, rep, 1));
        reports.push_back(rpt);
    }
    auto m = agreement_matrix(reports);
    for (std::size_t i = 0; i < m.names.size(); ++i)
        for (std::size_t j = 0; j < m.names.size(); ++j) CHECK(m.rho(i, j) == m.rho(j, i));
    auto path = testsupport::temp_dir("agree") / "m.csv";
    write_agreement_csv(m, path.string());
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header.rfind("metric,", 0) == 0);
}

TEST_CASE("time_targets on a size-independent fixture") {
    TimingTarget fixed{"fixed", [](const Representation&, std::uint64_t) {
                           volatile double s = 0;
                           for (int i = 0; i < 200000; ++i) s = s + i;
                           return single(s);
                       }};
    auto make = [](std::size_t m) { return gen_boundary(BoundaryCase{"111"}, m, 1); };
    auto rows = time_targets({fixed}, make, {1000, 10000, 100000}, 1);
    REQUIRE(rows.size() == 4);
    CHECK(rows.back().component == "slope");
    CHECK(std::fabs(rows.back().value) <= 0.2);
    CHECK_THROWS_AS(time_targets({fixed}, make, {1000, 1000, 2000}, 1), Error);
    CHECK_THROWS_AS(time_targets({fixed}, make, {1000, 2000}, 1), Error);
}

TEST_CASE("loglog slope") {
    CHECK(loglog_slope({1, 10, 100}, {3, 30, 300}) == doctest::Approx(1.0));
    CHECK(loglog_slope({1, 10, 100}, {1, 100, 10000}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(loglog_slope({5, 5}, {1, 2}), Error);
}

TEST_CASE("alpha grids") {
    auto g = parse_alpha_grid("0:1:0.25");
    REQUIRE(g.size() == 5);
    CHECK(g.back() == doctest::Approx(1.0));
    CHECK(parse_alpha_grid("0:0.5:0.05").size() == 11);
    CHECK(parse_alpha_grid("0.3") == std::vector<double>{0.3});
    CHECK_THROWS_AS(parse_alpha_grid("0:1"), Error);
    CHECK_THROWS_AS(parse_alpha_grid("0:1:0"), Error);
    CHECK_THROWS_AS(parse_alpha_grid("1:0:0.1"), Error);
    CHECK_THROWS_AS(parse_alpha_grid("0:2:0.5"), Error);
    CHECK_THROWS_AS(parse_alpha_grid("x"), Error);
}

TEST_CASE("calibration cardinality") {
    auto cfg = cheap(Experiment::Calibrate);
    cfg.seeds = derive_seeds(1, 2);
    cfg.reps = 2;
    auto out = run_experiment(cfg);
    CHECK(out.errors.empty());
    // 8 cases x 2 seeds x 2 reps x 2 single-valued metrics
    CHECK(out.rows.size() == 64);
    std::set<std::string> names;
    for (const auto& r : out.rows) names.insert(r.experiment);
    CHECK(names.size() == 8);
}

TEST_CASE("sweep endpoints") {
    ExperimentConfig rot = cheap(Experiment::Rotation);
    rot.k = rot.d = 3;
    rot.n = 2000;
    rot.metrics = parse_metric_list("edi");
    rot.alphas = {0.0};
    auto out = run_experiment(rot);
    REQUIRE(out.errors.empty());
    for (const auto& r : out.rows)
        if (r.component == "modularity") CHECK(r.value >= 0.95);

    ExperimentConfig noise = rot;
    noise.experiment = Experiment::Noise;
    noise.alphas = {1.0};
    out = run_experiment(noise);
    REQUIRE(out.errors.empty());
    bool seen = false;
    for (const auto& r : out.rows)
        if (r.component == "explicitness") {
            seen = true;
            CHECK(r.value <= 0.1);
        }
    CHECK(seen);
}

TEST_CASE("runs are deterministic and independent of the job count") {
    auto cfg = cheap(Experiment::Rotation);
    cfg.k = cfg.d = 3;
    cfg.alphas = {0.0, 0.25, 0.5};
    cfg.seeds = derive_seeds(9, 2);
    cfg.metrics = parse_metric_list("mig,sap,dci");
    auto a = run_experiment(cfg);
    auto b = run_experiment(cfg);
    cfg.jobs = 2;
    auto c = run_experiment(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    REQUIRE(a.rows.size() == c.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].value == b.rows[i].value);
        CHECK(a.rows[i].value == c.rows[i].value);
        CHECK(a.rows[i].metric == c.rows[i].metric);
    }
}

TEST_CASE("derived seeds and cell seeds") {
    auto s = derive_seeds(7, 4);
    CHECK(s.size() == 4);
    CHECK(std::set<std::uint64_t>(s.begin(), s.end()).size() == 4);
    CHECK(derive_seeds(7, 4) == s);
    CHECK(cell_seed(1, "a", 0, 0) != cell_seed(1, "b", 0, 0));
    CHECK(cell_seed(1, "a", 0, 0) != cell_seed(1, "a", 1, 0));
}

TEST_CASE("sample efficiency at full size is exact") {
    auto cfg = cheap(Experiment::Efficiency);
    cfg.n = 2000;
    cfg.seeds = derive_seeds(2, 2);
    cfg.cases = {"111"};
    auto out = sample_efficiency(cfg, {200, 2000});
    CHECK(out.errors.empty());
    for (const auto& r : out.rows)
        if (r.rep_index == 2000) CHECK(r.value == 0.0);
    CHECK_THROWS_AS(sample_efficiency(cfg, {1}), Error);
    CHECK_THROWS_AS(sample_efficiency(cfg, {3000}), Error);
}

TEST_CASE("config validation") {
    auto cfg = cheap(Experiment::Calibrate);
    cfg.metrics.clear();
    CHECK_THROWS_AS(run_experiment(cfg), Error);
    cfg = cheap(Experiment::Calibrate);
    cfg.seeds.clear();
    CHECK_THROWS_AS(run_experiment(cfg), Error);
    cfg = cheap(Experiment::Score);
    CHECK_THROWS_AS(run_experiment(cfg), Error);
}

TEST_CASE("parallel_for covers every index once and propagates failures") {
    std::vector<int> hits(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
        if (i == 7) throw Error(ErrorCode::InvalidArgument, "boom");
    }));
}
