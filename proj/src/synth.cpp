#include "edibench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edibench/rng.hpp"

namespace edibench {

void BoundaryCase::validate() const {
    bool ok = code3.size() == 3 && std::all_of(code3.begin(), code3.end(), [](char c) { return c == '0' || c == '1'; });
    if (!ok) throw Error(ErrorCode::InvalidCase, "boundary case must be three 0/1 flags, got '" + code3 + "'");
    if (categories < 2 || secondary_categories < 2)
        throw Error(ErrorCode::InvalidCase, "boundary case needs at least 2 categories");
    if (!(drop_fraction > 0.0 && drop_fraction < 1.0))
        throw Error(ErrorCode::InvalidCase, "drop_fraction must lie in (0,1)");
}

const std::vector<std::string>& boundary_codes() {
    static const std::vector<std::string> codes = {"000", "001", "010", "011", "100", "101", "110", "111"};
    return codes;
}

namespace {

// Collapses a random subset of the q categories onto the smallest survivor.
std::vector<std::int64_t> collapse_map(std::int64_t q, double fraction, Rng& rng) {
    auto dropped = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(q)));
    dropped = std::min(dropped, static_cast<std::size_t>(q - 1));
    auto perm = permutation(static_cast<std::size_t>(q), rng);
    std::size_t target = *std::min_element(perm.begin() + static_cast<std::ptrdiff_t>(dropped), perm.end());
    std::vector<std::int64_t> map(static_cast<std::size_t>(q));
    for (std::int64_t c = 0; c < q; ++c) map[static_cast<std::size_t>(c)] = c;
    for (std::size_t t = 0; t < dropped; ++t) map[perm[t]] = static_cast<std::int64_t>(target);
    return map;
}

}  // namespace

Representation gen_boundary(const BoundaryCase& bc, std::size_t n, std::uint64_t seed) {
    bc.validate();
    if (n < 100) throw Error(ErrorCode::InvalidArgument, "boundary cases need n >= 100");
    const bool mod = bc.code3[0] == '1', comp = bc.code3[1] == '1', expl = bc.code3[2] == '1';
    const std::int64_t q = bc.categories, q2 = bc.secondary_categories;
    std::vector<std::int64_t> card;
    if (mod && comp)
        card = {q, q};
    else if (!mod && comp)
        card = {q, q, q};
    else if (mod && !comp)
        card = {q * q, q * q};
    else
        card = {q * q, q * q2};

    Rng rng(hash64(seed, hash_string(bc.code3), 0x6264ULL));
    const std::size_t k = card.size();
    std::vector<std::vector<std::int64_t>> z(k, std::vector<std::int64_t>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < k; ++j) z[j][r] = static_cast<std::int64_t>(uniform_index(rng, card[j]));
    std::vector<std::vector<std::int64_t>> a = z;
    if (!expl) {
        for (std::size_t j = 0; j < k; ++j) {
            auto map = collapse_map(card[j], bc.drop_fraction, rng);
            for (auto& v : a[j]) v = map[static_cast<std::size_t>(v)];
        }
    }

    std::vector<std::vector<std::int64_t>> c;
    if (mod && comp) {
        c = {a[0], a[1]};
    } else if (!mod && comp) {
        c.assign(2, std::vector<std::int64_t>(n));
        for (std::size_t r = 0; r < n; ++r) {
            c[0][r] = a[0][r] * q + a[1][r];
            c[1][r] = a[2][r];
        }
    } else if (mod && !comp) {
        c.assign(3, std::vector<std::int64_t>(n));
        for (std::size_t r = 0; r < n; ++r) {
            c[0][r] = a[0][r] / q;
            c[1][r] = a[0][r] % q;
            c[2][r] = a[1][r];
        }
    } else {
        c.assign(2, std::vector<std::int64_t>(n));
        for (std::size_t r = 0; r < n; ++r) {
            c[0][r] = (a[0][r] / q) * q + a[1][r] / q2;
            c[1][r] = (a[0][r] % q) * q2 + a[1][r] % q2;
        }
    }

    Representation rep;
    rep.factors = Matrix(n, k);
    rep.codes = Matrix(n, c.size());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < k; ++j) rep.factors(r, j) = static_cast<double>(z[j][r]);
        for (std::size_t i = 0; i < c.size(); ++i) rep.codes(r, i) = static_cast<double>(c[i][r]);
    }
    for (auto cj : card) rep.factor_kinds.push_back(FactorKind::discrete(static_cast<int>(cj)));
    rep.seed = seed;
    return rep;
}

const char* family_name(Family f) {
    switch (f) {
        case Family::Nonlinear: return "nonlinear";
        case Family::Rotation: return "rotation";
        case Family::Noise: return "noise";
    }
    return "?";
}

Family parse_family(const std::string& s) {
    if (s == "nonlinear") return Family::Nonlinear;
    if (s == "rotation") return Family::Rotation;
    if (s == "noise") return Family::Noise;
    throw Error(ErrorCode::InvalidArgument, "unknown sweep family '" + s + "'");
}

void SweepSpec::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0,1]");
    if (k == 0 || d == 0) throw Error(ErrorCode::InvalidArgument, "k and d must be positive");
    if (k != d) throw Error(ErrorCode::InvalidArgument, std::string(family_name(family)) + " sweeps need k = d");
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "n must be at least 2");
}

double tangent_warp(double z, double alpha) {
    const double omega = alpha * (std::numbers::pi - kWarpEpsilon) + kWarpEpsilon * (1.0 - alpha);
    return 0.5 + std::tan(omega * (z - 0.5)) / (2.0 * std::tan(omega / 2.0));
}

namespace {

Representation uniform_factors(const SweepSpec& spec, Rng& rng) {
    spec.validate();
    Representation rep;
    rep.factors = Matrix(spec.n, spec.k);
    for (auto& v : rep.factors.data) v = uniform01(rng);
    rep.factor_kinds.assign(spec.k, FactorKind::continuous(0.0, 1.0));
    rep.seed = spec.seed;
    rep.alpha = spec.alpha;
    return rep;
}

Rng family_rng(const SweepSpec& spec) { return Rng(hash64(spec.seed, hash_string(family_name(spec.family)))); }

}  // namespace

Representation gen_nonlinear(const SweepSpec& spec) {
    Rng rng = family_rng(spec);
    auto rep = uniform_factors(spec, rng);
    rep.codes = Matrix(spec.n, spec.d);
    for (std::size_t t = 0; t < rep.factors.data.size(); ++t)
        rep.codes.data[t] = tangent_warp(rep.factors.data[t], spec.alpha);
    return rep;
}

Representation gen_rotation(const SweepSpec& spec) {
    Rng rng = family_rng(spec);
    auto rep = uniform_factors(spec, rng);
    const std::size_t k = spec.k;
    rep.codes = Matrix(spec.n, k);
    // c = R z with R_ii = 1 - alpha and R_{i,i+1 mod k} = alpha.
    for (std::size_t r = 0; r < spec.n; ++r)
        for (std::size_t i = 0; i < k; ++i)
            rep.codes(r, i) = (1.0 - spec.alpha) * rep.factors(r, i) + spec.alpha * rep.factors(r, (i + 1) % k);
    return rep;
}

Representation gen_noise(const SweepSpec& spec) {
    Rng rng = family_rng(spec);
    auto rep = uniform_factors(spec, rng);
    rep.codes = Matrix(spec.n, spec.d);
    for (std::size_t t = 0; t < rep.factors.data.size(); ++t)
        rep.codes.data[t] = (1.0 - spec.alpha) * rep.factors.data[t] + spec.alpha * uniform01(rng);
    return rep;
}

Representation gen_sweep(const SweepSpec& spec) {
    switch (spec.family) {
        case Family::Nonlinear: return gen_nonlinear(spec);
        case Family::Rotation: return gen_rotation(spec);
        case Family::Noise: return gen_noise(spec);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown family");
}

Representation subsample(const Representation& rep, std::size_t m, std::uint64_t seed) {
    if (m < 2 || m > rep.n())
        throw Error(ErrorCode::TooFewRequested,
                    "subsample size " + std::to_string(m) + " outside [2, " + std::to_string(rep.n()) + "]");
    Rng rng(hash64(seed, 0x7375ULL));
    auto perm = permutation(rep.n(), rng);
    perm.resize(m);
    Representation out;
    out.factors = rep.factors.select_rows(perm);
    out.codes = rep.codes.select_rows(perm);
    out.factor_kinds = rep.factor_kinds;
    out.seed = seed;
    out.alpha = rep.alpha;
    return out;
}

}  // namespace edibench
