#include "doctest.h"

#include <set>
#include <vector>

#include "cardframe/hash.hpp"

using namespace cardframe;

TEST_CASE("splitmix is deterministic and well distributed at small scale") {
  SplitMix a(42), b(42);
  for (int i = 0; i < 64; ++i) CHECK(a.next() == b.next());

  SplitMix c(7);
  std::set<uint64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(c.next());
  CHECK(seen.size() == 1000);  // no collisions expected in a tiny sample
}

TEST_CASE("splitmix bounded draws") {
  SplitMix rng(123);
  for (int i = 0; i < 200; ++i) CHECK(rng.below(7) < 7);
  CHECK(rng.below(0) == 0);

  bool lo_seen = false, hi_seen = false;
  for (int i = 0; i < 500; ++i) {
    int64_t v = rng.range(-2, 2);
    CHECK(v >= -2);
    CHECK(v <= 2);
    lo_seen |= v == -2;
    hi_seen |= v == 2;
  }
  CHECK(lo_seen);  // inclusive bounds are reachable
  CHECK(hi_seen);

  for (int i = 0; i < 200; ++i) {
    double u = rng.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK_FALSE(rng.chance(0.0));
  CHECK(rng.chance(2.0));
}

TEST_CASE("mix64 avalanches distinct small inputs") {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 4096; ++i) seen.insert(mix64(i));
  CHECK(seen.size() == 4096);
}

TEST_CASE("hash spec covers all words and the constant mode flattens") {
  HashSpec h;
  std::vector<uint64_t> a = {1, 2, 3};
  std::vector<uint64_t> b = {1, 2, 4};
  std::vector<uint64_t> c = {1, 2};
  CHECK(h.words(a) != h.words(b));
  CHECK(h.words(a) != h.words(c));
  CHECK(h.words(a) == h.words(a));

  // Word order matters.
  std::vector<uint64_t> ab = {1, 2}, ba = {2, 1};
  CHECK(h.words(ab) != h.words(ba));

  HashSpec flat;
  flat.constant = true;
  CHECK(flat.words(a) == flat.seed);
  CHECK(flat.words(b) == flat.seed);
  CHECK(flat.combine(123, 456) == flat.seed);

  uint64_t acc = h.seed;
  uint64_t acc2 = h.combine(acc, 10);
  CHECK(acc2 != h.combine(acc, 11));
  CHECK(h.combine(acc2, 20) != h.combine(acc2, 21));
}

TEST_CASE("digest is order and boundary sensitive") {
  Digest64 d1, d2, d3, d4;
  d1.add_bytes("ab");
  d1.add_bytes("c");
  d2.add_bytes("a");
  d2.add_bytes("bc");
  CHECK(d1.h != d2.h);  // chunk boundaries are part of the digest

  d3.add_u64(1);
  d3.add_u64(2);
  d4.add_u64(2);
  d4.add_u64(1);
  CHECK(d3.h != d4.h);

  Digest64 e1, e2;
  e1.add_bytes("same");
  e2.add_bytes("same");
  CHECK(e1.h == e2.h);
}
