#pragma once

#include <cstdint>
#include <string>

namespace ntw {

// Deterministic RNG helpers. std::uniform_int_distribution is not pinned
// down by the standard, so everything random in the library goes through
// these to keep generated corpora identical across toolchains.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0xd1b54a32d192ed03ull)) {}

  uint64_t next() {
    state_ = splitmix64(state_);
    return state_;
  }

  // Uniform in [0, n); n > 0.
  uint64_t below(uint64_t n) {
    // rejection sampling to avoid modulo bias
    uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
    uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  // Uniform in [lo, hi] inclusive.
  int64_t range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  // Derive an independent stream, e.g. one per site.
  Rng fork(uint64_t salt) const { return Rng(splitmix64(state_ ^ splitmix64(salt))); }

 private:
  uint64_t state_;
};

inline uint64_t hash_str(const std::string& s, uint64_t seed = 0) {
  uint64_t h = splitmix64(seed ^ 0x8f3c9e1d2b4a5c6dull);
  for (unsigned char c : s) h = splitmix64(h ^ c);
  return h;
}

}  // namespace ntw
