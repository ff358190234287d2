#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace s2p {

// Deterministic seeded generator. Identical seed => identical output
// sequence, independent of platform libstdc++ distribution details (we
// map raw 64-bit draws to doubles ourselves instead of going through
// std::uniform_real_distribution).
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : engine_(seed), seed_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + unit() * (hi - lo); }

  // Uniform over {0, 1, ..., n-1} by rejection (unbiased).
  uint64_t below(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool coin() { return (next_u64() & 1u) != 0; }

  // Log-uniform magnitude in [lo, hi] with random sign.
  double signed_log_uniform(double lo, double hi);

  // Derive an independent child stream. Mixing is splitmix64-style so
  // labels and indices give well-separated seeds.
  SeededRng fork(uint64_t label, uint64_t index = 0) const;

  static uint64_t mix(uint64_t a, uint64_t b);

 private:
  std::mt19937_64 engine_;
  uint64_t seed_;
};

inline uint64_t SeededRng::mix(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline SeededRng SeededRng::fork(uint64_t label, uint64_t index) const {
  return SeededRng(mix(mix(seed_, label), index));
}

inline double SeededRng::signed_log_uniform(double lo, double hi) {
  double m = lo * std::exp(unit() * std::log(hi / lo));
  return coin() ? m : -m;
}

}  // namespace s2p
