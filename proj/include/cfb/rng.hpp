#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <array>

// Seeded sampling primitives. All distributions are implemented here rather
// than with std:: distributions so that streams are reproducible across
// standard library implementations and across thread counts (each consumer
// derives its own engine from a master seed).

namespace cfb {

// Derives independent child seeds from a master seed (splitmix64 mixing).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

// Uniform double in [0, 1) with 53 bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1], safe as a log argument.
inline double uniform01_open(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [lo, hi] inclusive.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    // rejection to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
}

// Standard normal via the polar method.
inline double standard_normal(Rng& rng) {
    double u, v, s;
    do {
        u = 2.0 * uniform01(rng) - 1.0;
        v = 2.0 * uniform01(rng) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

// log of a Gamma(shape, 1) draw. Marsaglia-Tsang for shape >= 1, with the
// log-space boost for shape < 1 so tiny shapes do not underflow to zero.
inline double log_gamma_draw(Rng& rng, double shape) {
    if (shape < 1.0) {
        const double lg = log_gamma_draw(rng, shape + 1.0);
        return lg + std::log(uniform01_open(rng)) / shape;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01_open(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
    }
}

// Dirichlet draw on the 4-simplex via normalized Gamma draws, computed in
// log space so that weights far below 1 stay on the simplex.
inline std::array<double, 4> dirichlet4(Rng& rng, const std::array<double, 4>& weights) {
    std::array<double, 4> lg{};
    double lg_max = -INFINITY;
    for (int i = 0; i < 4; ++i) {
        lg[i] = log_gamma_draw(rng, weights[i]);
        lg_max = std::max(lg_max, lg[i]);
    }
    std::array<double, 4> out{};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        out[i] = std::exp(lg[i] - lg_max);
        sum += out[i];
    }
    for (int i = 0; i < 4; ++i) out[i] /= sum;
    return out;
}

// Binomial(n, p) by sequential inversion of the CDF; exact, O(n) worst case.
// All protocols here use small n (v <= 500).
inline int binomial(Rng& rng, int n, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    // keep q >= 0.5 so q^n cannot underflow for the n used here
    if (p > 0.5) return n - binomial(rng, n, 1.0 - p);
    const double u = uniform01(rng);
    const double q = 1.0 - p;
    double pmf = std::pow(q, n);
    double cdf = pmf;
    int k = 0;
    while (cdf < u && k < n) {
        ++k;
        pmf *= p * static_cast<double>(n - k + 1) / (q * static_cast<double>(k));
        cdf += pmf;
    }
    return k;
}

// Index in [0, 3] drawn with the given (normalized) probabilities.
inline int categorical4(Rng& rng, const std::array<double, 4>& probs) {
    const double u = uniform01(rng);
    double cdf = 0.0;
    for (int i = 0; i < 3; ++i) {
        cdf += probs[i];
        if (u < cdf) return i;
    }
    return 3;
}

}  // namespace cfb
