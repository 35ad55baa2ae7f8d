// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

namespace rfbsr {

/// Deterministic random source. All sampling goes through explicit methods on
/// top of mt19937_64 instead of std distributions, so that a fixed seed yields
/// the same stream on every standard library.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    bool coin() { return (eng_() & 1u) != 0; }

    /// Standard normal via Box-Muller; one fresh pair of uniforms per draw.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Derives an independent stream for a named purpose (data sampling vs
    /// generator init vs discriminator init) so adding one consumer does not
    /// shift the others.
    static Rng derive(uint64_t seed, const std::string& purpose) {
        uint64_t h = 1469598103934665603ull;  // FNV-1a 64
        for (unsigned char ch : purpose) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        return Rng(seed ^ h);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace rfbsr
