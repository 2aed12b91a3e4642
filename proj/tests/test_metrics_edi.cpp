#include <cmath>

#include "doctest.h"
#include "edibench/metrics.hpp"
#include "edibench/synth.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace edibench;

namespace {

const auto kAuto = InfoOptions::automatic();

// Full factorial design: every (z0, z1) pair appears equally often, codes copy z0 only.
Representation factorial(std::size_t copies, bool twice) {
    Representation rep;
    std::vector<double> z0, z1;
    for (std::size_t c = 0; c < copies; ++c)
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 4; ++b) {
                z0.push_back(a);
                z1.push_back(b);
            }
    rep.factors = Matrix::from_columns({z0, z1});
    rep.codes = twice ? Matrix::from_columns({z0, z0}) : Matrix::from_columns({z0});
    rep.factor_kinds = {FactorKind::discrete(5), FactorKind::discrete(4)};
    return rep;
}

}  // namespace

TEST_CASE("exclusivity examples") {
    CHECK(exclusivity({1.0, 0.0}) == doctest::Approx(1.0));
    CHECK(exclusivity({0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(exclusivity({0.8, 0.2, 0.2}) == doctest::Approx(0.8 - std::sqrt(0.08 / 2.0)));
    CHECK(exclusivity({0.8, 0.2, 0.2}) == doctest::Approx(0.6));
    CHECK(exclusivity({0.3}) == doctest::Approx(0.3));
    CHECK_THROWS_AS(exclusivity({}), Error);
}

TEST_CASE("exclusivity properties on random vectors") {
    Rng rng(1);
    for (int t = 0; t < 500; ++t) {
        std::size_t n = 1 + uniform_index(rng, 6);
        std::vector<double> v(n);
        for (auto& x : v) x = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng);
        double e = exclusivity(v);
        auto p = permutation(n, rng);
        std::vector<double> w;
        for (auto i : p) w.push_back(v[i]);
        CHECK(exclusivity(w) == doctest::Approx(e).epsilon(1e-12));
        double mx = *std::max_element(v.begin(), v.end());
        CHECK(e <= mx + 1e-15);
        std::size_t nonzero_rest = std::count_if(v.begin(), v.end(), [](double x) { return x > 0.0; });
        bool rest_zero = nonzero_rest <= 1;
        CHECK((std::fabs(e - mx) < 1e-15) == (rest_zero || n == 1));
    }
}

TEST_CASE("impact intensity: one-to-one representation is a permutation matrix") {
    auto rep = gen_boundary({"111"}, 50000, 2);
    auto im = impact_intensity(rep, kAuto);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            if (i == j)
                CHECK(im.intensities(i, j) >= 0.95);
            else
                CHECK(im.intensities(i, j) <= 0.05);
        }
    CHECK(edi_modularity(im) == doctest::Approx(0.99).epsilon(0.05));
    CHECK(edi_compactness(im) >= 0.95);
    CHECK(edi_explicitness(im) >= 0.95);
}

TEST_CASE("impact intensity: digit split gives two halves") {
    auto rep = gen_boundary({"001"}, 20000, 3);
    auto im = impact_intensity(rep, kAuto);
    // z0 has 100 categories; each code holds one decimal digit, I(c_i;z0) = ln 10, I(c;z0) = ln 100.
    CHECK(std::fabs(im.intensities(0, 0) - 0.5) <= 0.05);
    CHECK(std::fabs(im.intensities(1, 0) - 0.5) <= 0.05);
}

TEST_CASE("impact intensity: a factor the codes ignore is uncaptured") {
    auto rep = factorial(50, false);
    auto im = impact_intensity(rep, kAuto);
    CHECK_FALSE(im.uncaptured[0]);
    CHECK(im.uncaptured[1]);
    CHECK(im.intensities(0, 1) == 0.0);
    CHECK(im.intensities(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("edi_modularity caps each factor at one") {
    auto im = impact_intensity(factorial(50, true), kAuto);
    auto per_code = edi_code_disentanglement(im);
    CHECK(per_code[0] == doctest::Approx(1.0));
    CHECK(per_code[1] == doctest::Approx(1.0));
    CHECK(edi_modularity(im) == doctest::Approx(0.5));
}

TEST_CASE("edi_explicitness: exact copy scores 1, constant factor is an error") {
    auto rep = testsupport::discrete_rep(5000, 3, 8, 4);
    auto im = impact_intensity(rep, kAuto);
    CHECK(edi_explicitness(im) == doctest::Approx(1.0));
    for (std::size_t r = 0; r < rep.n(); ++r) rep.factors(r, 2) = 0.0;
    auto flat = impact_intensity(rep, kAuto);
    CHECK_THROWS_AS(edi_explicitness(flat), Error);
}

TEST_CASE("EDI scores stay within estimator slack") {
    for (const auto& code : boundary_codes()) {
        auto im = impact_intensity(gen_boundary({code}, 5000, 5), kAuto);
        CHECK(edi_modularity(im) <= 1.05);
        CHECK(edi_compactness(im) <= 1.05);
        CHECK(edi_explicitness(im) <= 1.0);
        for (double v : im.intensities.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.05);
        }
    }
}

TEST_CASE("EDI is robust to a monotone warp of the codes") {
    SweepSpec base{Family::Nonlinear, 0.0, 2, 2, 20000, 6};
    SweepSpec warped = base;
    warped.alpha = 0.6;
    auto a = impact_intensity(gen_nonlinear(base), InfoOptions::uniform(EstimatorChoice::ksg(), 1));
    auto b = impact_intensity(gen_nonlinear(warped), InfoOptions::uniform(EstimatorChoice::ksg(), 1));
    CHECK(std::fabs(edi_modularity(a) - edi_modularity(b)) <= 0.05);
    CHECK(std::fabs(edi_compactness(a) - edi_compactness(b)) <= 0.05);
}

TEST_CASE("EDI modularity and compactness are stable under moderate noise") {
    SweepSpec clean{Family::Noise, 0.0, 2, 2, 20000, 7};
    SweepSpec noisy = clean;
    noisy.alpha = 0.6;
    auto a = impact_intensity(gen_noise(clean), kAuto);
    auto b = impact_intensity(gen_noise(noisy), kAuto);
    CHECK(std::fabs(edi_modularity(a) - edi_modularity(b)) <= 0.1);
    CHECK(std::fabs(edi_compactness(a) - edi_compactness(b)) <= 0.1);
    CHECK(edi_explicitness(b) < edi_explicitness(a));
}

TEST_CASE("EDI is deterministic given the seed") {
    SweepSpec spec{Family::Rotation, 0.3, 3, 3, 5000, 8};
    auto rep = gen_rotation(spec);
    auto a = impact_intensity(rep, InfoOptions::automatic(3));
    auto b = impact_intensity(rep, InfoOptions::automatic(3));
    CHECK(a.intensities.data == b.intensities.data);
    CHECK(a.joint_mi == b.joint_mi);
}

TEST_CASE("impact matrix JSON diagnostics") {
    auto im = impact_intensity(gen_boundary({"101"}, 3000, 9), kAuto);
    auto j = nlohmann::json::parse(impact_matrix_json(im));
    CHECK(j["intensities"].size() == 3);
    CHECK(j["intensities"][0].size() == 2);
    CHECK(j["code_disentanglement"].size() == 3);
    CHECK(j["joint_mi"].size() == 2);
    CHECK(j["modularity"].get<double>() == doctest::Approx(edi_modularity(im)));
}

TEST_CASE("sample-based joint terms never fall below a pairwise term") {
    auto rep = gen_noise(SweepSpec{Family::Noise, 0.0, 3, 3, 800, 21});
    InfoContext ctx(rep, InfoOptions::automatic(4));
    auto im = impact_intensity(ctx);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(im.joint_mi[j] >= im.pairwise_mi(i, j));
            CHECK(im.intensities(i, j) <= 1.0);
        }
    CHECK(edi_compactness(im) <= 1.0);
    CHECK(edi_explicitness(im) >= 0.95);
}
