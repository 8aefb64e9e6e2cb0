#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace syngraph {

using Engine = std::mt19937_64;

// Independent stream keyed by (seed, stream, round, tag). Every random
// consumer in the library derives its engine through here so that output is
// a pure function of the user seed and the worker count.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t round = 0,
                          std::uint64_t tag = 0) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(round), hi(round), lo(tag), hi(tag)};
    return Engine(seq);
}

// Child seed for a sub-task, via the splitmix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) {
    std::uint64_t z = seed ^ (tag * 0x9e3779b97f4a7c15ULL) ^ (index * 0xc2b2ae3d27d4eb4fULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// [0, 1) with 53 random bits; independent of the standard library's
// distribution implementations.
inline double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// [0, n) via multiply-high.
inline std::uint64_t uniform_below(Engine& engine, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine()) * n) >> 64);
}

// Standard normal via Box-Muller on uniform01, for the same portability reason.
inline double standard_normal(Engine& engine) {
    constexpr double two_pi = 6.283185307179586476925;
    double u1 = uniform01(engine);
    while (u1 <= 0.0) {
        u1 = uniform01(engine);
    }
    const double u2 = uniform01(engine);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace syngraph
