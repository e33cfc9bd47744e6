#ifndef ONTO_RNG_HPP
#define ONTO_RNG_HPP

#include <cstdint>
#include <string_view>

namespace onto {

// All randomness in the library flows through this generator so that a run is
// reproducible from a single 64-bit seed. xoshiro256** (Blackman/Vigna), state
// expanded from the seed with splitmix64. Determinism is promised within one
// build of this library, not across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  bool next_bernoulli(double p) { return next_double() < p; }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  std::uint64_t state_[4];
};

// FNV-1a over bytes; used for fingerprints and per-stage seed derivation.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Stage seeds are derived as seed + fnv1a64(stage name), wrapping. Every stage
// that consumes randomness names itself here, so one config seed drives the
// whole pipeline without streams colliding.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
  return seed + fnv1a64(stage);
}

}  // namespace onto

#endif  // ONTO_RNG_HPP
