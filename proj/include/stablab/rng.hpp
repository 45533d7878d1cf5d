#pragma once

#include <cmath>
#include <cstdint>

#include "stablab/error.hpp"

// Self-contained, fully specified random number generation. Replicate streams
// must be reproducible bit-for-bit across runs and thread counts, so nothing
// here depends on library-defined distributions.
//
// Stream derivation (stable contract, do not change):
//   seed64 = mix64(mix64(mix64(mix64(master) ^ w0) ^ w1) ^ w2)
// where mix64 is the splitmix64 finalizer. The four xoshiro256++ state words
// are then the first four outputs of a splitmix64 sequence started at seed64.

namespace stablab {

/// splitmix64 finalizer step.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and up to three
/// stream coordinates (e.g. lambda index, replicate index, purpose tag).
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t w0 = 0,
                                        std::uint64_t w1 = 0, std::uint64_t w2 = 0) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ w0);
    h = mix64(h ^ w1);
    h = mix64(h ^ w2);
    return h;
}

/// xoshiro256++ engine seeded through splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    static Rng stream(std::uint64_t master, std::uint64_t w0 = 0, std::uint64_t w1 = 0,
                      std::uint64_t w2 = 0) {
        return Rng(derive_stream_seed(master, w0, w1, w2));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log argument.
    double uniform01_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exponential() { return -std::log(uniform01_pos()); }

    /// Standard normal via the polar method; one spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Poisson count by exponential spacings: N = #{n : E_1+...+E_n <= lambda}.
    /// Exact for any lambda >= 0, O(lambda) draws.
    std::uint64_t poisson(double lambda) {
        if (lambda < 0.0) throw Error("poisson: negative intensity");
        std::uint64_t n = 0;
        double sum = exponential();
        while (sum <= lambda) {
            ++n;
            sum += exponential();
        }
        return n;
    }

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw Error("uniform_int: empty range");
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace stablab
