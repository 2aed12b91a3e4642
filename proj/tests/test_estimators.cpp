#include <cmath>
#include <map>

#include "doctest.h"
#include "edibench/estimators.hpp"
#include "edibench/rng.hpp"
#include "support.hpp"

using namespace edibench;
using testsupport::gaussian_mi;
using testsupport::gaussian_pair;
using testsupport::table_mi;

namespace {

std::vector<std::int64_t> cycle(std::size_t n, int q) {
    std::vector<std::int64_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::int64_t>(i % static_cast<std::size_t>(q));
    return v;
}

}  // namespace

TEST_CASE("discrete_entropy examples") {
    CHECK(discrete_entropy(cycle(1000, 10)) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
    CHECK(discrete_entropy(std::vector<std::int64_t>(50, 4)) == 0.0);
    CHECK(discrete_entropy({0, 1, 0, 1}) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK_THROWS_AS(discrete_entropy({}), Error);
}

TEST_CASE("discrete_entropy is independent of sample order") {
    Rng rng(1);
    std::vector<std::int64_t> v(997);
    for (auto& x : v) x = static_cast<std::int64_t>(uniform_index(rng, 13));
    double h = discrete_entropy(v);
    auto p = permutation(v.size(), rng);
    std::vector<std::int64_t> w;
    for (auto i : p) w.push_back(v[i]);
    CHECK(discrete_entropy(w) == h);
}

TEST_CASE("plug-in MI: symmetry, self information and table oracle") {
    Rng rng(2);
    std::vector<std::int64_t> x(5000), y(5000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<std::int64_t>(uniform_index(rng, 7));
        y[i] = (x[i] + static_cast<std::int64_t>(uniform_index(rng, 3))) % 5;
    }
    CHECK(plugin_mi(x, y) == plugin_mi(y, x));
    CHECK(plugin_mi(x, x) == discrete_entropy(x));
    CHECK(plugin_mi(x, y) == doctest::Approx(table_mi(x, y)).epsilon(1e-10));
    CHECK(plugin_mi(x, y) >= 0.0);
}

TEST_CASE("binned_mi examples") {
    auto z = cycle(10000, 10);
    std::vector<double> zd(z.begin(), z.end());
    CHECK(binned_mi(zd, zd, 20, ValueKind::Discrete, ValueKind::Discrete) ==
          doctest::Approx(std::log(10.0)).epsilon(1e-12));

    Rng rng(3);
    std::vector<double> a(50000), b(50000);
    for (auto& v : a) v = uniform01(rng);
    for (auto& v : b) v = uniform01(rng);
    CHECK(binned_mi(a, b, 20) <= 0.05);

    std::vector<double> twice(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) twice[i] = 2.0 * a[i];
    CHECK(binned_mi(a, twice, 20) == doctest::Approx(discrete_entropy(uniform_bins(a, 20))).epsilon(1e-12));
    CHECK(binned_mi(a, b, 20) == binned_mi(b, a, 20));

    CHECK_THROWS_AS(binned_mi({1.0, 2.0}, {1.0}, 20), Error);
}

TEST_CASE("KSG: bivariate Gaussian rho = 0.9 within 5%") {
    auto p = gaussian_pair(10000, 0.9, 21);
    CHECK(std::fabs(ksg_mi(p.x, p.y, 3) / gaussian_mi(0.9) - 1.0) <= 0.05);
}

TEST_CASE("KSG: bivariate Gaussian rho = 0.5 within 0.02 nats") {
    auto p = gaussian_pair(10000, 0.5, 22);
    CHECK(std::fabs(ksg_mi(p.x, p.y, 3) - gaussian_mi(0.5)) <= 0.02);
}

TEST_CASE("KSG: independent samples") {
    auto p = gaussian_pair(10000, 0.0, 23);
    double v = ksg_mi(p.x, p.y, 3);
    CHECK(v >= 0.0);
    CHECK(v <= 0.02);
}

TEST_CASE("KSG: symmetry and determinism") {
    auto p = gaussian_pair(4000, 0.7, 24);
    double a = ksg_mi(p.x, p.y, 3, 9), b = ksg_mi(p.y, p.x, 3, 9);
    CHECK(std::fabs(a - b) <= 1e-9);
    CHECK(ksg_mi(p.x, p.y, 3, 9) == a);
}

TEST_CASE("KSG: invariance under a strictly monotone transform") {
    auto p = gaussian_pair(10000, 0.8, 25);
    Matrix g = p.x;
    for (auto& v : g.data) v = v * v * v + 3.0;
    CHECK(std::fabs(ksg_mi(p.x, p.y, 3) - ksg_mi(g, p.y, 3)) <= 0.05);
}

TEST_CASE("KSG: errors") {
    auto p = gaussian_pair(3, 0.5, 26);
    CHECK_THROWS_AS(ksg_mi(p.x, p.y, 3), Error);
    Matrix shorter(2, 1);
    CHECK_THROWS_AS(ksg_mi(p.x, shorter, 1), Error);
}

TEST_CASE("KSG: multivariate x with duplicated columns") {
    auto p = gaussian_pair(8000, 0.9, 27);
    Matrix xx = Matrix::from_columns({p.x.column(0), p.x.column(0)});
    CHECK(std::fabs(ksg_mi(xx, p.y, 3) / gaussian_mi(0.9) - 1.0) <= 0.1);
}

TEST_CASE("DV: too few samples and config validation") {
    auto p = gaussian_pair(1000, 0.5, 28);
    CHECK_THROWS_AS(neural_dv_mi(p.x, p.y, DvConfig{}), Error);
    DvConfig bad;
    bad.ema_rate = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = DvConfig{};
    bad.hidden_layers = {100, 0};
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("DV: deterministic given the seed") {
    auto p = gaussian_pair(2048, 0.8, 29);
    DvConfig cfg;
    cfg.max_epochs = 11;
    cfg.seed = 5;
    double a = neural_dv_mi(p.x, p.y, cfg);
    double b = neural_dv_mi(p.x, p.y, cfg);
    CHECK(a == b);
    cfg.seed = 6;
    CHECK(neural_dv_mi(p.x, p.y, cfg) != a);
}

TEST_CASE("DV: independent inputs stay near zero") {
    auto p = gaussian_pair(20000, 0.0, 30);
    double v = neural_dv_mi(p.x, p.y, DvConfig{});
    CHECK(v >= 0.0);
    CHECK(v <= 0.05);
}

TEST_CASE("DV: exact copy of a 10-category variable inside 6 dimensions") {
    Rng rng(31);
    const std::size_t n = 20000;
    std::normal_distribution<double> nd;
    Matrix x(n, 6), y(n, 1);
    std::vector<std::int64_t> labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        labels[r] = static_cast<std::int64_t>(uniform_index(rng, 10));
        y(r, 0) = static_cast<double>(labels[r]);
        x(r, 0) = y(r, 0);
        for (std::size_t c = 1; c < 6; ++c) x(r, c) = nd(rng);
    }
    double oracle = discrete_entropy(labels);
    double v = neural_dv_mi(x, y, DvConfig{});
    CHECK(std::fabs(v / oracle - 1.0) <= 0.10);
}

TEST_CASE("mutual_information dispatch") {
    auto z = cycle(1000, 10);
    Matrix zm = column_matrix(std::vector<double>(z.begin(), z.end()));
    CHECK(mutual_information(zm, ValueKind::Discrete, zm, ValueKind::Discrete, EstimatorChoice::discrete_plugin()) ==
          doctest::Approx(std::log(10.0)).epsilon(1e-12));
    auto p = gaussian_pair(5000, 0.9, 32);
    CHECK_THROWS_AS(mutual_information(p.x, ValueKind::Continuous, zm.select_rows({0, 1}), ValueKind::Discrete,
                                       EstimatorChoice::discrete_plugin()),
                    Error);
    try {
        mutual_information(p.x, ValueKind::Continuous, p.y, ValueKind::Discrete, EstimatorChoice::discrete_plugin());
        FAIL("expected IncompatibleEstimator");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncompatibleEstimator);
    }
    CHECK(mutual_information(p.x, ValueKind::Continuous, p.y, ValueKind::Continuous, EstimatorChoice::ksg(3)) ==
          ksg_mi(p.x, p.y, 3));
}

TEST_CASE("EstimatorChoice parsing") {
    CHECK(EstimatorChoice::parse("discrete").kind == EstimatorChoice::Kind::DiscretePlugin);
    CHECK(EstimatorChoice::parse("binned:7").bins == 7);
    CHECK(EstimatorChoice::parse("binned").bins == 20);
    CHECK(EstimatorChoice::parse("ksg:5").k_neighbors == 5);
    CHECK(EstimatorChoice::parse("dv").kind == EstimatorChoice::Kind::NeuralDv);
    for (std::string s : {"discrete", "binned:7", "ksg:5", "dv"}) CHECK(EstimatorChoice::parse(s).to_string() == s);
    CHECK_THROWS_AS(EstimatorChoice::parse("binned:1"), Error);
    CHECK_THROWS_AS(EstimatorChoice::parse("ksg:0"), Error);
    CHECK_THROWS_AS(EstimatorChoice::parse("mine"), Error);
}

TEST_CASE("uniform_bins and tuple_labels") {
    auto b = uniform_bins({0.0, 0.5, 1.0, 0.999}, 2);
    CHECK(b == std::vector<std::int64_t>{0, 1, 1, 1});
    auto t = tuple_labels({{0, 0, 1, 1}, {0, 1, 0, 1}});
    CHECK(discrete_entropy(t) == doctest::Approx(std::log(4.0)));
    CHECK_FALSE(is_integer_valued({0.0, 1.5}));
    CHECK_THROWS_AS(integer_labels({0.5}), Error);
}
