#include <Eigen/Dense>

#include "doctest.h"
#include "helpers.hpp"

using namespace s2p;

namespace {

// Numerical rank via singular values, threshold 1e-9 * sigma_max.
std::size_t svd_rank(const Matrix& m) {
  Eigen::MatrixXd em(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) em(i, j) = m(i, j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(em);
  auto sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  double tol = 1e-9 * sv(0);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return rank;
}

}  // namespace

TEST_CASE("split_scalar obeys sum and sign contracts") {
  SeededRng rng(1);
  SplitParams p2(2, SplitMode::SignConsistent, 1e4);

  Vector z = split_scalar(0.0, p2, rng);
  CHECK(z == Vector{0.0, 0.0});

  Vector s6 = split_scalar(6.0, p2, rng);
  CHECK(s6.size() == 2);
  CHECK(s6[0] > 0);
  CHECK(s6[1] > 0);
  CHECK(test::rel_err(s6[0] + s6[1], 6.0) <= 4 * kUlp);

  SplitParams p3(3, SplitMode::SignConsistent, 1e4);
  Vector sm = split_scalar(-2.5, p3, rng);
  double sum = 0;
  for (double x : sm) {
    CHECK(x <= 0);
    sum += x;
  }
  CHECK(test::rel_err(sum, -2.5) <= 4 * kUlp);

  CHECK_THROWS_AS(split_scalar(std::nan(""), p2, rng), std::invalid_argument);
}

TEST_CASE("split reconstruction over nine orders of magnitude") {
  SeededRng rng(2);
  for (int rho = 2; rho <= 4; ++rho) {
    SplitParams p(rho, SplitMode::SignConsistent, 1e4);
    for (int trial = 0; trial < 100000 / 3; ++trial) {
      double mag = std::pow(10.0, rng.uniform(-8.0, 8.0));
      double a = rng.coin() ? mag : -mag;
      Vector s = split_scalar(a, p, rng);
      double sum = 0;
      for (double x : s) sum += x;
      CHECK(test::rel_err(sum, a) <= 4 * kUlp);
    }
  }
}

TEST_CASE("range-expanded splits reconstruct within the theta-scaled bound") {
  SeededRng rng(3);
  SplitParams p(3, SplitMode::RangeExpanded, 1e4);
  for (int trial = 0; trial < 1000; ++trial) {
    double a = rng.uniform(-5.0, 5.0);
    Vector s = split_scalar(a, p, rng);
    double sum = 0;
    for (double x : s) sum += x;
    CHECK(test::rel_err(sum, a) <= 4 * kUlp * p.theta * p.rho);
  }
}

TEST_CASE("ra2a rows are rho copies of one split") {
  SeededRng rng(4);
  SplitParams p(2, SplitMode::SignConsistent, 1e4);
  Matrix m = ra2a({6.0}, p, rng);
  REQUIRE(m.rows() == 1);
  REQUIRE(m.cols() == 4);
  CHECK(m(0, 0) == m(0, 2));
  CHECK(m(0, 1) == m(0, 3));
  CHECK(test::rel_err(m(0, 0) + m(0, 1), 6.0) <= 4 * kUlp);

  Matrix zeros = ra2a({0.0, 0.0}, p, rng);
  for (double x : zeros.elems()) CHECK(x == 0.0);

  // Row sums equal rho * a_i.
  Vector a = test::random_vector(20, rng, -3.0, 3.0);
  Matrix big = ra2a(a, p, rng);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double sum = 0;
    for (std::size_t j = 0; j < big.cols(); ++j) sum += big(i, j);
    CHECK(test::rel_err(sum, p.rho * a[i]) <= 8 * kUlp);
  }
}

TEST_CASE("rb2b columns are permutation tables with constant column sums") {
  SeededRng rng(5);
  for (int rho = 2; rho <= 4; ++rho) {
    SplitParams p(rho, SplitMode::SignConsistent, 1e4);
    Vector b = test::random_vector(16, rng, -2.0, 2.0);
    Matrix m = rb2b(b, p, rng);
    REQUIRE(m.rows() == static_cast<std::size_t>(rho) * rho);
    REQUIRE(m.cols() == b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      // Column i of m is T_i flattened row-major; every T column must sum
      // to b_i (each piece appears exactly once per T column).
      for (int tcol = 0; tcol < rho; ++tcol) {
        double sum = 0;
        for (int trow = 0; trow < rho; ++trow)
          sum += m(static_cast<std::size_t>(trow) * rho + tcol, i);
        CHECK(test::rel_err(sum, b[i]) <= 8 * kUlp);
      }
    }
  }
}

TEST_CASE("rb2b single element matches the worked example") {
  SeededRng rng(6);
  SplitParams p(2, SplitMode::SignConsistent, 1e4);
  Matrix m = rb2b({3.0}, p, rng);
  // Column is a rearrangement of the two pieces, each appearing twice.
  Vector col = {m(0, 0), m(1, 0), m(2, 0), m(3, 0)};
  CHECK(test::rel_err(col[0] + col[1], 3.0) <= 8 * kUlp);   // T row 0
  CHECK(test::rel_err(col[2] + col[3], 3.0) <= 8 * kUlp);   // T row 1
  CHECK(test::rel_err(col[0] + col[2], 3.0) <= 8 * kUlp);   // T col 0
  CHECK(test::rel_err(col[1] + col[3], 3.0) <= 8 * kUlp);   // T col 1
}

TEST_CASE("diag2v and v2diag") {
  SeededRng rng(7);
  CHECK(diag2v(Matrix::identity(3)) == Vector{1, 1, 1});
  CHECK(diag2v(Matrix(2, 2, {1, 2, 3, 4})) == Vector{1, 4});
  CHECK_THROWS_AS(diag2v(Matrix(2, 3)), std::invalid_argument);

  Vector v = {5.0};
  Matrix m1 = v2diag(v, rng);
  CHECK(m1.rows() == 1);
  CHECK(m1(0, 0) == 5.0);

  Vector v2 = test::random_vector(6, rng, -4.0, 4.0);
  CHECK(diag2v(v2diag(v2, rng)) == v2);  // bit-exact round trip
}

TEST_CASE("diagonal identity: diag(ra2a x rb2b) = a .* b within 1.25 rho^2 u") {
  SeededRng rng(8);
  for (int rho : {2, 3}) {
    SplitParams p(rho, SplitMode::SignConsistent, 1e4);
    for (int trial = 0; trial < 200; ++trial) {
      Vector a = test::random_vector(8, rng, -5.0, 5.0);
      Vector b = test::random_vector(8, rng, -5.0, 5.0);
      Matrix prod = mul(ra2a(a, p, rng), rb2b(b, p, rng));
      Vector diag = diag2v(prod);
      for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(test::rel_err(diag[i], a[i] * b[i]) <= 1.25 * rho * rho * kUlp);
    }
  }
}

TEST_CASE("gen_rank_deficient produces the documented rank bound") {
  SeededRng rng(9);
  Matrix m22 = gen_rank_deficient(2, 2, {0.5, 1.0}, 1e4, rng);
  CHECK(svd_rank(m22) <= 1);

  Matrix m44 = gen_rank_deficient(4, 4, {0.5, 1.0}, 1e4, rng);
  CHECK(svd_rank(m44) <= 3);
  CHECK(max_abs(m44) <= 1e4 * (1 + 1e-12));

  CHECK_THROWS_AS(gen_rank_deficient(1, 4, {0.5, 1.0}, 1e4, rng), std::invalid_argument);
  CHECK_THROWS_AS(gen_rank_deficient(4, 4, {0.5, 1.0}, 0.5, rng), std::invalid_argument);
}

TEST_CASE("mask pairs from preprocessing stay rank deficient in the shared dimension") {
  SeededRng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + rng.below(6), s = 2 + rng.below(6), m = 1 + rng.below(6);
    TripleSpec spec{static_cast<uint32_t>(n), static_cast<uint32_t>(s), static_cast<uint32_t>(m),
                    1.0, 1.0};
    auto [ta, tb] = cs_preprocess(spec, rng);
    CHECK(svd_rank(ta.R) < s);
    CHECK(svd_rank(tb.R) < s);
  }
}
