#pragma once

#include <cstdint>

namespace ccc {

// Counter-based randomness: every draw is a pure function of (seed, key...).
// Results are therefore independent of scheduling, thread count and call
// order, which is what the coupled constructions and the reproducibility
// contract require.  The mixer is the SplitMix64 finalizer (Steele, Lea,
// Flood 2014 / Vigna), applied as a chained combine over the key words.

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace stream {
// Key-space separation between independent sources of randomness.
constexpr std::uint64_t env_bits = 0x01;
constexpr std::uint64_t path = 0x02;
constexpr std::uint64_t chain = 0x03;
constexpr std::uint64_t chain_decoupled = 0x04;
constexpr std::uint64_t word = 0x05;
constexpr std::uint64_t experiment = 0x06;
}  // namespace stream

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t raw(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                      std::uint64_t d = 0) const {
        constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;
        std::uint64_t h = seed_ + golden;
        h = mix64(h + golden + a);
        h = mix64(h + golden + b);
        h = mix64(h + golden + c);
        h = mix64(h + golden + d);
        return h;
    }

    /// Uniform draw in [0,1) keyed by up to four words.
    double uniform(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                   std::uint64_t d = 0) const {
        return static_cast<double>(raw(a, b, c, d) >> 11) * 0x1.0p-53;
    }

    /// Fair bit keyed by up to four words.
    bool fair_bit(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                  std::uint64_t d = 0) const {
        return (raw(a, b, c, d) >> 63) != 0;
    }

  private:
    std::uint64_t seed_;
};

/// Signed positions enter keys via two's complement.
inline std::uint64_t key(std::int64_t v) { return static_cast<std::uint64_t>(v); }

}  // namespace ccc
