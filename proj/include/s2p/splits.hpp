#pragma once

#include "s2p/matrix.hpp"
#include "s2p/rng.hpp"

namespace s2p {

enum class SplitMode {
  // Stick-breaking: all pieces carry the sign of the value, so the masked
  // dot products satisfy |x|^T|y| == |x^T y| and the relative error bound
  // 1.25*rho^2*u applies. Default.
  SignConsistent,
  // First rho-1 pieces uniform in [-theta|a|, theta|a|], last piece is the
  // residual. Wider disguise range, but the residual construction costs
  // ~u*theta*rho of relative reconstruction accuracy.
  RangeExpanded,
};

struct SplitParams {
  int rho = 2;
  SplitMode mode = SplitMode::SignConsistent;
  double theta = 1e4;

  SplitParams() = default;
  SplitParams(int rho_, SplitMode mode_, double theta_) : rho(rho_), mode(mode_), theta(theta_) {
    require(rho >= 2, "SplitParams: rho >= 2");
    require(theta >= 1.0, "SplitParams: theta >= 1");
  }
};

// Splits a into rho pieces that sum back to a. Zero splits to all zeros.
Vector split_scalar(double a, const SplitParams& params, SeededRng& rng);

// Lifts a length-n vector into the n x rho^2 left operand: row i is rho
// concatenated copies of a split of a_i, so each row sums to rho*a_i.
Matrix ra2a(const Vector& a, const SplitParams& params, SeededRng& rng);

// Lifts into the rho^2 x n right operand: column i is the row-major
// flattening of a rho x rho table whose rows are cyclic shifts of one
// random permutation of a split of b_i. Every column of the table then
// holds each piece exactly once and sums to b_i, which is what makes
// diag(ra2a(a) x rb2b(b)) = a .* b for arbitrary splits of a.
Matrix rb2b(const Vector& b, const SplitParams& params, SeededRng& rng);

Vector diag2v(const Matrix& m);  // rejects non-square input

// Square matrix with the given diagonal and random finite off-diagonals.
Matrix v2diag(const Vector& v, SeededRng& rng);

// Random matrix with numerical rank <= min(rows, cols) - 1, entries spanning
// data_range scaled by theta. Built as a product of uniform low-rank factors,
// then linearly rescaled (a shift would raise the rank).
Matrix gen_rank_deficient(std::size_t rows, std::size_t cols, MagnitudeBand data_range,
                          double theta, SeededRng& rng);

// Generalized form used by the preprocessing service: rank <= k, entries in
// [-scale, scale]. k >= 1, k <= min(rows, cols).
Matrix low_rank_uniform(std::size_t rows, std::size_t cols, std::size_t k, double scale,
                        SeededRng& rng);

}  // namespace s2p
