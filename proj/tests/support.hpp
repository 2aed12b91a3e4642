#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <unistd.h>

#include "edibench/core.hpp"
#include "edibench/rng.hpp"

namespace testsupport {

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("edibench_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

struct Pair {
    edibench::Matrix x, y;
};

inline Pair gaussian_pair(std::size_t n, double rho, std::uint64_t seed) {
    edibench::Rng rng(seed);
    std::normal_distribution<double> nd;
    Pair p{edibench::Matrix(n, 1), edibench::Matrix(n, 1)};
    for (std::size_t i = 0; i < n; ++i) {
        double a = nd(rng), b = nd(rng);
        p.x.data[i] = a;
        p.y.data[i] = rho * a + std::sqrt(1.0 - rho * rho) * b;
    }
    return p;
}

inline double gaussian_mi(double rho) { return -0.5 * std::log(1.0 - rho * rho); }

inline edibench::Representation discrete_rep(std::size_t n, std::size_t k, int categories, std::uint64_t seed) {
    edibench::Rng rng(seed);
    edibench::Representation rep;
    rep.factors = edibench::Matrix(n, k);
    for (auto& v : rep.factors.data) v = static_cast<double>(edibench::uniform_index(rng, categories));
    rep.codes = rep.factors;
    rep.factor_kinds.assign(k, edibench::FactorKind::discrete(categories));
    return rep;
}

// Plug-in MI computed from explicit joint frequency tables.
inline double table_mi(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    std::map<std::int64_t, double> px, py;
    std::map<std::pair<std::int64_t, std::int64_t>, double> pxy;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        px[x[i]] += 1.0 / n;
        py[y[i]] += 1.0 / n;
        pxy[{x[i], y[i]}] += 1.0 / n;
    }
    double mi = 0.0;
    for (auto& [key, p] : pxy) mi += p * std::log(p / (px[key.first] * py[key.second]));
    return mi;
}

inline double table_entropy(const std::vector<std::int64_t>& x) { return table_mi(x, x); }

inline std::vector<std::int64_t> labels_of(const std::vector<double>& v) {
    return std::vector<std::int64_t>(v.begin(), v.end());
}

}  // namespace testsupport
