#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include "doctest.h"
#include "edibench/core.hpp"
#include "support.hpp"

using namespace edibench;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an edibench::Error");
    return ErrorCode::InvalidArgument;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

}  // namespace

TEST_CASE("validate_representation accepts a well formed representation") {
    auto rep = testsupport::discrete_rep(100, 2, 10, 1);
    CHECK_NOTHROW(validate_representation(rep));
}

TEST_CASE("validate_representation rejects row count mismatch") {
    auto rep = testsupport::discrete_rep(100, 2, 10, 1);
    rep.codes = Matrix(99, 2);
    CHECK(code_of([&] { validate_representation(rep); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("validate_representation rejects non-integer discrete entries") {
    auto rep = testsupport::discrete_rep(100, 2, 10, 1);
    rep.factors(3, 1) = 2.5;
    CHECK(code_of([&] { validate_representation(rep); }) == ErrorCode::DomainViolation);
}

TEST_CASE("validate_representation rejects N < 2") {
    auto rep = testsupport::discrete_rep(1, 2, 10, 1);
    CHECK(code_of([&] { validate_representation(rep); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("validate_representation fuzz: each corruption maps to its error") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        auto rep = testsupport::discrete_rep(20, 3, 5, static_cast<std::uint64_t>(trial));
        rep.codes.data[uniform_index(rng, rep.codes.data.size())] += 0.25;  // codes may be any finite real
        std::size_t kind = uniform_index(rng, 5);
        std::size_t r = uniform_index(rng, 20), c = uniform_index(rng, 3);
        std::optional<ErrorCode> expected;
        switch (kind) {
            case 0: break;
            case 1:
                rep.factors(r, c) = 5.0;
                expected = ErrorCode::DomainViolation;
                break;
            case 2:
                rep.codes(r, c) = std::numeric_limits<double>::quiet_NaN();
                expected = ErrorCode::NonFinite;
                break;
            case 3:
                rep.factors(r, c) = -std::numeric_limits<double>::infinity();
                expected = ErrorCode::NonFinite;
                break;
            case 4:
                rep.codes = rep.codes.select_rows({0, 1, 2});
                expected = ErrorCode::DimensionMismatch;
                break;
        }
        if (expected)
            CHECK(code_of([&] { validate_representation(rep); }) == *expected);
        else
            CHECK_NOTHROW(validate_representation(rep));
    }
}

TEST_CASE("FactorKind invariants") {
    CHECK(code_of([] { FactorKind::discrete(1); }) == ErrorCode::DomainViolation);
    CHECK(code_of([] { FactorKind::continuous(1.0, 1.0); }) == ErrorCode::DomainViolation);
    CHECK(FactorKind::continuous(0.0, 2.0).upper == 2.0);
}

TEST_CASE("representation CSV round trip") {
    auto dir = testsupport::temp_dir("core_rep");
    Representation rep;
    rep.factors = Matrix::from_columns({{0, 3, 9}, {1, 1, 2}});
    rep.codes = Matrix::from_columns({{0.125, -3.5, 1e-7}, {2, 4, 6}});
    rep.factor_kinds = {FactorKind::discrete(10), FactorKind::discrete(10)};
    auto csv = (dir / "r.csv").string(), kinds = (dir / "r.kinds.json").string();
    write_representation_csv(rep, csv, kinds);
    auto back = read_representation_csv(csv, kinds);
    CHECK(back.n() == 3);
    CHECK(back.k() == 2);
    CHECK(back.d() == 2);
    CHECK(back.factors.data == rep.factors.data);
    CHECK(back.codes.data == rep.codes.data);
    CHECK(back.factor_kinds == rep.factor_kinds);
}

TEST_CASE("representation CSV errors") {
    auto dir = testsupport::temp_dir("core_err");
    auto kinds = (dir / "k.json").string();
    write_kinds_json({FactorKind::discrete(10), FactorKind::discrete(10)}, kinds);
    auto bad_header = (dir / "h.csv").string();
    write_text(bad_header, "a,b\n1,2\n");
    CHECK(code_of([&] { read_representation_csv(bad_header, kinds); }) == ErrorCode::HeaderMismatch);
    auto short_row = (dir / "s.csv").string();
    write_text(short_row, "z0,z1,c0,c1\n1,2,3,4\n1,2,3\n");
    CHECK(code_of([&] { read_representation_csv(short_row, kinds); }) == ErrorCode::ParseError);
    auto good = (dir / "g.csv").string();
    write_text(good, "z0,z1,c0,c1\n1,2,3,4\n0,0,1,1\n");
    CHECK(code_of([&] { read_representation_csv(good, (dir / "missing.json").string()); }) == ErrorCode::MissingKinds);
    write_text((dir / "bad.json").string(), "[{\"kind\":\"discrete\"");
    CHECK(code_of([&] { read_representation_csv(good, (dir / "bad.json").string()); }) == ErrorCode::MissingKinds);
}

TEST_CASE("results CSV: empty list writes the header only") {
    auto dir = testsupport::temp_dir("core_res0");
    auto path = (dir / "r.csv").string();
    write_results_csv({}, path);
    std::ifstream f(path);
    std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(all == std::string(kResultsHeader) + "\n");
    CHECK(read_results_csv(path).empty());
}

TEST_CASE("results CSV: one row is a two line file") {
    auto dir = testsupport::temp_dir("core_res1");
    auto path = (dir / "r.csv").string();
    write_results_csv({{"rotation", 0.25, 7, 1, "edi", "modularity", 0.5, 12.0}}, path);
    std::ifstream f(path);
    int lines = 0;
    for (std::string l; std::getline(f, l);) ++lines;
    CHECK(lines == 2);
}

TEST_CASE("results CSV round trip of 1000 random rows at 12 significant digits") {
    auto dir = testsupport::temp_dir("core_res");
    Rng rng(5);
    std::vector<ResultRow> rows;
    const char* metrics[] = {"edi", "mig@binned:20", "dci"};
    for (int i = 0; i < 1000; ++i) {
        double scale = std::pow(10.0, static_cast<double>(uniform_index(rng, 13)) - 6.0);
        rows.push_back({"calibrate:011", static_cast<double>(uniform_index(rng, 11)) / 10.0, rng(), uniform_index(rng, 50),
                        metrics[uniform_index(rng, 3)], component_name(static_cast<Component>(uniform_index(rng, 4))),
                        (uniform01(rng) - 0.5) * scale, uniform01(rng) * 1000.0});
    }
    auto path = (dir / "r.csv").string();
    write_results_csv(rows, path);
    auto back = read_results_csv(path);
    REQUIRE(back.size() == rows.size());
    // Independent oracle: the value printed with %.12g and parsed again.
    auto twelve = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::strtod(buf, nullptr);
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].experiment == rows[i].experiment);
        CHECK(back[i].seed == rows[i].seed);
        CHECK(back[i].rep_index == rows[i].rep_index);
        CHECK(back[i].metric == rows[i].metric);
        CHECK(back[i].component == rows[i].component);
        CHECK(back[i].alpha == twelve(rows[i].alpha));
        CHECK(back[i].value == twelve(rows[i].value));
        CHECK(back[i].elapsed_ms == twelve(rows[i].elapsed_ms));
    }
}

TEST_CASE("MetricReport rejects duplicates and non-finite values") {
    MetricReport r;
    r.add("edi", Component::Modularity, 0.5);
    CHECK_THROWS_AS(r.add("edi", Component::Modularity, 0.6), Error);
    CHECK_THROWS_AS(r.add("mig", Component::Single, std::nan("")), Error);
    CHECK(r.find("edi", Component::Modularity) == doctest::Approx(0.5));
    CHECK_FALSE(r.find("edi", Component::Compactness).has_value());
}

TEST_CASE("component names round trip") {
    for (auto c : {Component::Modularity, Component::Compactness, Component::Explicitness, Component::Single})
        CHECK(parse_component(component_name(c)) == c);
}
