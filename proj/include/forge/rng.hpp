#pragma once

#include <cstdint>
#include <random>

namespace forge {

// Seeded deterministic RNG. mt19937_64 output is pinned by the standard, and
// we avoid std distributions (their mappings are implementation-defined), so
// identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next() { return gen_(); }

  uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }

  // In [lo, hi] inclusive.
  uint64_t range(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }

  bool chance(uint32_t numer, uint32_t denom) { return below(denom) < numer; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace forge
