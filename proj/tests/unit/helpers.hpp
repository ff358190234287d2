#pragma once

#include <cmath>

#include "s2p/runtime.hpp"

namespace s2p::test {

inline double rel_err(double got, double want) {
  if (want == 0.0) return std::fabs(got);
  return std::fabs(got - want) / std::fabs(want);
}

inline double max_rel_err(const Vector& got, const Vector& want) {
  double m = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) m = std::max(m, rel_err(got[i], want[i]));
  return m;
}

// Plaintext matrix product, independent of the library path (index order
// and accumulation differ from mul()).
inline Matrix oracle_matmul(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      r(i, j) = acc;
    }
  return r;
}

inline Vector random_vector(std::size_t n, SeededRng& rng, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, SeededRng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(r, c);
  for (double& x : m.elems()) x = rng.uniform(lo, hi);
  return m;
}

// Session config with data-matched masking, the setting under which the
// elementwise precision contracts hold.
inline ProtocolConfig precision_cfg(MagnitudeBand band = {0x1.0p-8, 1.0}, int l = 4) {
  ProtocolConfig cfg;
  cfg.mask_policy = MaskPolicy::BelowData;
  cfg.input_band = band;
  cfg.verify_rounds = l;
  return cfg;
}

inline RunOptions mem_run(ProtocolConfig cfg, uint64_t seed) {
  RunOptions opts;
  opts.cfg = cfg;
  opts.transport = Transport::Mem;
  opts.seed = seed;
  return opts;
}

}  // namespace s2p::test
