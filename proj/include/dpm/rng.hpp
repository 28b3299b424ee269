#pragma once

#include <cstdint>
#include <limits>

namespace dpm {

// SplitMix64 (Steele, Lea, Vigna). One 64-bit word of state advanced by the
// golden-gamma increment, output mixed through two xor-multiply rounds. Every
// subsystem that needs randomness receives its own generator, derived from
// (seed, salt) pairs via mix_seed, so parallel trials and tree branches are
// reproducible independently of evaluation order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1); never returns an exact endpoint.
  double next_open() {
    double u = next_double();
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Stateless hash of (a, b) into a fresh seed; one SplitMix64 output round over
// the combined words.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline SplitMix64 derive_rng(std::uint64_t seed, std::uint64_t salt) {
  return SplitMix64(mix_seed(seed, salt));
}

}  // namespace dpm
