#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace cardframe {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; full 64-bit avalanche.
constexpr uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

constexpr uint64_t kDefaultHashSeed = 0xc2b2ae3d27d4eb4fULL;

// Composite-key hashing for group and join tables. `constant` collapses every
// key into one bucket; full-key comparison stays authoritative, so results
// must not change, only speed.
struct HashSpec {
  uint64_t seed = kDefaultHashSeed;
  bool constant = false;

  uint64_t words(std::span<const uint64_t> w) const {
    if (constant) return seed;
    uint64_t h = seed ^ mix64(uint64_t(w.size()) + kGolden);
    for (uint64_t v : w) h = mix64(h ^ mix64(v + kGolden));
    return h;
  }

  // Incremental form: one key word folded in per grouping column.
  uint64_t combine(uint64_t h, uint64_t word) const {
    if (constant) return seed;
    return mix64(h ^ (mix64(word + kGolden) + kGolden + (h << 6) + (h >> 2)));
  }
};

// Deterministic 64-bit PRNG. std::*_distribution output is
// implementation-defined, which would break byte-identical generation.
struct SplitMix {
  uint64_t state;
  explicit constexpr SplitMix(uint64_t seed) : state(seed) {}
  constexpr uint64_t next() {
    state += kGolden;
    return mix64(state);
  }
  uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }
  int64_t range(int64_t lo, int64_t hi) {  // inclusive bounds
    return lo + int64_t(below(uint64_t(hi - lo) + 1));
  }
  double unit() { return double(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
};

// Order-sensitive content digest (result hashing, file fingerprints).
struct Digest64 {
  uint64_t h = 0x84222325cbf29ce4ULL;
  void add_u64(uint64_t v) { h = mix64(h ^ mix64(v + kGolden)); }
  void add_bytes(std::string_view s) {
    uint64_t f = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : s) f = (f ^ c) * 1099511628211ULL;
    add_u64(f ^ (uint64_t(s.size()) << 1));
  }
};

}  // namespace cardframe
