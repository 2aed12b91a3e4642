#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace edibench {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over the bytes of a string.
constexpr std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t hash64(std::uint64_t a) { return mix64(a); }

template <typename... Rest>
std::uint64_t hash64(std::uint64_t a, std::uint64_t b, Rest... rest) {
    return hash64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL + (mix64(a) << 6) + (mix64(a) >> 2)),
                  static_cast<std::uint64_t>(rest)...);
}

inline double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[uniform_index(rng, i)]);
    return p;
}

}  // namespace edibench
