#pragma once

#include <cstdint>
#include <cmath>

namespace opdyn {

// CounterRng — SplitMix64 run in counter mode.
//
// The k-th output is mix64(key + k * GAMMA) with GAMMA = 0x9E3779B97F4A7C15
// and mix64 the SplitMix64 finalizer (Steele/Lea/Flood 2014, as in
// java.util.SplitMixRandom / Vigna's splitmix64.c). Identical to stock
// SplitMix64 seeded with `key`, but random-access: the state is just
// (key, counter), so traces replay bit-identically and independent streams
// come from distinct keys.
//
// Stream derivation: stream s of master seed m uses
//   key = mix64(m ^ mix64((s + 1) * GAMMA)).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(seed) {}

    CounterRng(std::uint64_t master_seed, std::uint64_t stream)
        : key_(mix64(master_seed ^ mix64((stream + 1) * kGamma))) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

    // Uniform in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double next_unit_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Multiply-shift; bias is < 2^-53 per draw, irrelevant at our scales.
        return static_cast<std::uint64_t>(next_unit() * static_cast<double>(n));
    }

    bool next_bool() { return (next_u64() & 1u) != 0; }

    // Standard normal via Box-Muller; second value of the pair is cached.
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = next_unit_open();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace opdyn
