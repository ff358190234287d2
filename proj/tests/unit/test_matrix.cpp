#include "doctest.h"
#include "helpers.hpp"

using namespace s2p;

TEST_CASE("matrix shape and finite checks") {
  Matrix m(2, 3);
  CHECK(m.rows() == 2);
  CHECK(m.size() == 6);
  CHECK(m.all_finite());

  CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);

  Matrix bad(1, 1, {std::numeric_limits<double>::infinity()});
  CHECK_FALSE(bad.all_finite());
  CHECK_THROWS_AS(bad.require_finite("x"), std::invalid_argument);
}

TEST_CASE("matrix arithmetic against the index-order oracle") {
  SeededRng rng(7);
  Matrix a = test::random_matrix(3, 4, rng);
  Matrix b = test::random_matrix(4, 2, rng);
  Matrix got = mul(a, b);
  Matrix want = test::oracle_matmul(a, b);
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(test::rel_err(got.elems()[i], want.elems()[i]) < 16 * kUlp);

  Matrix t = transpose(a);
  CHECK(t.rows() == 4);
  CHECK(t(1, 2) == a(2, 1));

  CHECK_THROWS_AS(mul(a, a), std::invalid_argument);
  CHECK_THROWS_AS(add(a, b), std::invalid_argument);
}

TEST_CASE("wire layout round trip is bit exact") {
  SeededRng rng(11);
  Matrix m = test::random_matrix(3, 4, rng, -1e100, 1e100);
  std::vector<uint8_t> buf;
  encode_matrix(m, buf);
  CHECK(buf.size() == 8 + 12 * 8);
  std::size_t used = 0;
  Matrix back = decode_matrix(buf.data(), buf.size(), &used);
  CHECK(used == buf.size());
  REQUIRE(back.same_shape(m));
  for (std::size_t i = 0; i < m.size(); ++i) {
    uint64_t b1, b2;
    std::memcpy(&b1, &m.elems()[i], 8);
    std::memcpy(&b2, &back.elems()[i], 8);
    CHECK(b1 == b2);
  }
}

TEST_CASE("decode rejects truncation") {
  std::vector<uint8_t> buf = {1, 0, 0, 0, 2};
  CHECK_THROWS_AS(decode_matrix(buf.data(), buf.size(), nullptr), TransportError);
}
