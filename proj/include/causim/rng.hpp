#pragma once

#include <cstdint>

namespace causim::rng {

// All randomness in the library flows from SplitMix64 (Steele, Lea & Flood,
// 2014). Streams are identified by hashing (seed, a, b) so that any
// (node, row) or (replication, purpose) pair owns an independent substream
// and generation order does not affect the drawn values.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Key of the substream (seed, a, b).
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
    std::uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ (a + 1) * kGolden);
    k = mix64(k ^ (b + 1) * 0xD1B54A32D192ED03ULL);
    return k;
}

// Maps 64 random bits to the open interval (0, 1): midpoints of a 2^-52
// grid, so both ends stay exactly representable (the largest value is
// 1 - 2^-53).
constexpr double to_unit_open(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Inverse of the standard normal CDF. Acklam's rational approximation refined
// by one Halley step; absolute error below 1e-15 over (0, 1).
double normal_quantile(double p);

// Standard normal CDF.
double normal_cdf(double x);

// Sequential SplitMix64 generator.
class Stream {
public:
    explicit Stream(std::uint64_t key) noexcept : state_(key) {}

    static Stream derived(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
        return Stream(derive(seed, a, b));
    }

    std::uint64_t next_u64() noexcept {
        state_ += kGolden;
        return mix64(state_);
    }

    double uniform() noexcept { return to_unit_open(next_u64()); }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() { return normal_quantile(uniform()); }
    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Uniform integer in [0, n), rejection sampling to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) noexcept;

private:
    std::uint64_t state_;
};

}  // namespace causim::rng
