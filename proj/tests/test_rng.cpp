#include "onto/rng.hpp"

#include <cstdint>
#include <vector>

#include "doctest.h"

using namespace onto;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  Rng a(42), b(43);
  int same = 0;
  for (int i = 0; i < 100; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("next_double stays in [0, 1) and is roughly uniform") {
  Rng r(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = r.next_double();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  const double mean = sum / n;
  CHECK(mean > 0.49);
  CHECK(mean < 0.51);
}

TEST_CASE("next_double(lo, hi) respects the interval") {
  Rng r(11);
  for (int i = 0; i < 1000; ++i) {
    const double x = r.next_double(-0.1, 0.1);
    REQUIRE(x >= -0.1);
    REQUIRE(x < 0.1);
  }
}

TEST_CASE("next_below covers the whole range") {
  Rng r(3);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) ++counts[r.next_below(5)];
  for (int c : counts) CHECK(c > 800);
}

TEST_CASE("next_bernoulli matches its probability") {
  Rng r(9);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (r.next_bernoulli(0.25)) ++hits;
  const double rate = static_cast<double>(hits) / n;
  CHECK(rate > 0.24);
  CHECK(rate < 0.26);
}

TEST_CASE("fnv1a64 matches published reference values") {
  // Offset basis and the standard test vector for "a".
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("derive_seed separates stages deterministically") {
  const std::uint64_t base = 42;
  CHECK(derive_seed(base, "pretrain") == derive_seed(base, "pretrain"));
  CHECK(derive_seed(base, "pretrain") != derive_seed(base, "finetune"));
  CHECK(derive_seed(base, "pretrain") == base + fnv1a64("pretrain"));
}
