#include "doctest.h"
#include "helpers.hpp"

using namespace s2p;

TEST_CASE("identical seed gives identical stream") {
  SeededRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("forked streams are independent of consumption order") {
  SeededRng root(9);
  SeededRng c1 = root.fork(1);
  SeededRng c2 = root.fork(2);
  SeededRng c1_again = SeededRng(9).fork(1);
  CHECK(c1.next_u64() == c1_again.next_u64());
  CHECK(c1.next_u64() != c2.next_u64());
}

TEST_CASE("unit stays in [0,1) and below is unbiased at the edges") {
  SeededRng rng(3);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
  for (int c : counts) CHECK(std::fabs(c - 10000) < 600);
}

TEST_CASE("signed_log_uniform covers the magnitude range with both signs") {
  SeededRng rng(4);
  bool pos = false, neg = false;
  for (int i = 0; i < 1000; ++i) {
    double v = rng.signed_log_uniform(1e-2, 1e2);
    double m = std::fabs(v);
    CHECK(m >= 1e-2);
    CHECK(m <= 1e2 * (1 + 1e-12));
    (v > 0 ? pos : neg) = true;
  }
  CHECK(pos);
  CHECK(neg);
}
