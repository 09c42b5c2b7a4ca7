#pragma once

// Deterministic random source. All distribution draws are built from the raw
// 64-bit stream of mt19937_64 (no std::*_distribution, whose output is
// implementation-defined), so identical seeds give identical output on every
// platform. Normals are drawn by inverse cdf: exactly one uniform per variate.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "special.hpp"

namespace hiercop {

// splitmix64 step; used to derive independent substream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed for stream `index` under `master`; streams are pairwise independent for
// practical purposes, letting replicates run in any order or thread layout.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = master ^ (0xD1B54A32D192ED03ULL * (index + 1));
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x9E3779B97F4A7C15ULL);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on (0,1), never returning the endpoints.
    double uniform() {
        const std::uint64_t r = engine_();
        const double u = (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
        return u;
    }

    double normal() { return special::norm_quantile(uniform()); }

    double exponential() { return -std::log(uniform()); }

    // Marsaglia-Tsang for shape >= 1; shape boost for shape < 1.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::domain_error("Rng::gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Logarithmic series on {1,2,...} with parameter p in (0,1); Kemp's LK method.
    std::uint64_t log_series(double p) {
        if (!(p > 0.0 && p < 1.0)) throw std::domain_error("Rng::log_series: p outside (0,1)");
        const double u2 = uniform();
        if (u2 > p) return 1;
        const double u1 = uniform();
        const double q = 1.0 - std::exp(u1 * std::log1p(-p));
        if (u2 < q * q) {
            const double k = 1.0 + std::log(u2) / std::log(q);
            return static_cast<std::uint64_t>(k);
        }
        return (u2 > q) ? 1 : 2;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace hiercop
