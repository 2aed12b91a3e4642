#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edibench/core.hpp"

namespace edibench {

// Table-style boundary representation: code3 flags (modularity, compactness, explicitness).
struct BoundaryCase {
    std::string code3 = "111";
    int categories = 10;
    double drop_fraction = 0.6;
    // Cardinality of the finer digit of the second factor in the 00x layout.
    int secondary_categories = 5;

    void validate() const;
};

const std::vector<std::string>& boundary_codes();

Representation gen_boundary(const BoundaryCase& bc, std::size_t n, std::uint64_t seed);

enum class Family { Nonlinear, Rotation, Noise };

const char* family_name(Family f);
Family parse_family(const std::string& s);

struct SweepSpec {
    Family family = Family::Rotation;
    double alpha = 0.0;
    std::size_t k = 6;
    std::size_t d = 6;
    std::size_t n = 20000;
    std::uint64_t seed = 0;

    void validate() const;
};

constexpr double kWarpEpsilon = 1e-3;

// Monotone bijection of [0,1]; close to the identity at alpha = 0 and increasingly steep towards alpha = 1.
double tangent_warp(double z, double alpha);

Representation gen_nonlinear(const SweepSpec& spec);
Representation gen_rotation(const SweepSpec& spec);
Representation gen_noise(const SweepSpec& spec);
Representation gen_sweep(const SweepSpec& spec);

// m rows drawn without replacement.
Representation subsample(const Representation& rep, std::size_t m, std::uint64_t seed);

}  // namespace edibench
