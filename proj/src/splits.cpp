#include "s2p/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace s2p {

Vector split_scalar(double a, const SplitParams& params, SeededRng& rng) {
  require(std::isfinite(a), "split_scalar: non-finite input");
  const int rho = params.rho;
  Vector pieces(rho, 0.0);
  if (a == 0.0) return pieces;  // sign undefined; the sum constraint wins

  if (params.mode == SplitMode::SignConsistent) {
    // Stick-breaking: positive weights normalized to 1, scaled by a.
    double total = 0.0;
    for (int j = 0; j < rho; ++j) {
      double w;
      do {
        w = rng.unit();
      } while (w < 1e-9);
      pieces[j] = w;
      total += w;
    }
    for (int j = 0; j < rho; ++j) pieces[j] = a * (pieces[j] / total);
  } else {
    double bound = params.theta * std::fabs(a);
    double partial = 0.0;
    for (int j = 0; j + 1 < rho; ++j) {
      pieces[j] = rng.uniform(-bound, bound);
      partial += pieces[j];
    }
    pieces[rho - 1] = a - partial;
  }
  return pieces;
}

Matrix ra2a(const Vector& a, const SplitParams& params, SeededRng& rng) {
  require(all_finite(a), "ra2a: non-finite input");
  const std::size_t n = a.size();
  const int rho = params.rho;
  Matrix m(n, static_cast<std::size_t>(rho) * rho);
  for (std::size_t i = 0; i < n; ++i) {
    Vector pieces = split_scalar(a[i], params, rng);
    for (int copy = 0; copy < rho; ++copy)
      for (int j = 0; j < rho; ++j) m(i, static_cast<std::size_t>(copy) * rho + j) = pieces[j];
  }
  return m;
}

Matrix rb2b(const Vector& b, const SplitParams& params, SeededRng& rng) {
  require(all_finite(b), "rb2b: non-finite input");
  const std::size_t n = b.size();
  const int rho = params.rho;
  Matrix m(static_cast<std::size_t>(rho) * rho, n);
  std::vector<int> perm(rho);
  for (std::size_t i = 0; i < n; ++i) {
    Vector pieces = split_scalar(b[i], params, rng);
    std::iota(perm.begin(), perm.end(), 0);
    for (int j = rho - 1; j > 0; --j)
      std::swap(perm[j], perm[rng.below(static_cast<uint64_t>(j) + 1)]);
    // Row r of T_i is perm cyclically shifted by r; columns then cover
    // every piece exactly once.
    for (int r = 0; r < rho; ++r)
      for (int c = 0; c < rho; ++c)
        m(static_cast<std::size_t>(r) * rho + c, i) = pieces[perm[(c + r) % rho]];
  }
  return m;
}

Vector diag2v(const Matrix& m) {
  require(m.rows() == m.cols(), "diag2v: matrix not square");
  Vector v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, i);
  return v;
}

Matrix v2diag(const Vector& v, SeededRng& rng) {
  require(all_finite(v), "v2diag: non-finite input");
  const std::size_t n = v.size();
  double scale = std::max(1.0, max_abs(v));
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = i == j ? v[i] : rng.uniform(-scale, scale);
  return m;
}

Matrix low_rank_uniform(std::size_t rows, std::size_t cols, std::size_t k, double scale,
                        SeededRng& rng) {
  require(k >= 1 && k <= std::min(rows, cols), "low_rank_uniform: bad rank bound");
  for (;;) {
    Matrix left(rows, k), right(k, cols);
    for (double& x : left.elems()) x = rng.uniform(-1.0, 1.0);
    for (double& x : right.elems()) x = rng.uniform(-1.0, 1.0);
    Matrix m = mul(left, right);
    double top = max_abs(m);
    if (top == 0.0) continue;  // vanishing draw; resample
    scale_inplace(m, scale / top);
    return m;
  }
}

Matrix gen_rank_deficient(std::size_t rows, std::size_t cols, MagnitudeBand data_range,
                          double theta, SeededRng& rng) {
  require(std::min(rows, cols) >= 2,
          "gen_rank_deficient: min dimension >= 2 (a 1-d rank-deficient mask is zero)");
  require(theta >= 1.0, "gen_rank_deficient: theta >= 1");
  return low_rank_uniform(rows, cols, std::min(rows, cols) - 1, theta * data_range.hi, rng);
}

}  // namespace s2p
