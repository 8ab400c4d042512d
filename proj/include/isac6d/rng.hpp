#pragma once

#include <complex>
#include <cstdint>
#include <random>

// Deterministic seed lineage. Every random quantity in a simulation is drawn
// from an engine seeded by mixing the config seed with integer tags, so the
// whole experiment is a pure function of the config and is reproducible for
// any worker count.

namespace isac6d {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a) {
    return splitmix64(base ^ splitmix64(a + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(base, a), b);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// Circular complex Gaussian with E|z|^2 = variance.
inline std::complex<double> complex_normal(std::mt19937_64& eng, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(eng);
    const double im = n(eng);
    return {re, im};
}

// Rayleigh amplitude with E[A^2] = mean_square (Swerling-I frame draw).
inline double rayleigh_amplitude(std::mt19937_64& eng, double mean_square) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double v = u(eng);
    if (v <= 0.0) v = 1e-300;
    return std::sqrt(-mean_square * std::log(v));
}

}  // namespace isac6d
