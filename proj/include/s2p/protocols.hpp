#pragma once

#include "s2p/s2pm.hpp"

namespace s2p {

// Additive shares: v_a + v_b reconstructs the target vector.
struct AddShares {
  Vector v_a, v_b;
};

// Multiplicative shares: v_a .* v_b reconstructs; v_a is nonzero by
// construction.
struct MulShares {
  Vector v_a, v_b;
};

// Per-protocol declared operand bands, threaded through so every mask and
// blinding scale is config-derived. sum_lo/hi bound |a_i + b_i| where a
// protocol divides by the shared sum.
struct VectorBands {
  MagnitudeBand a{1e-4, 1e4};
  MagnitudeBand b{1e-4, 1e4};
  double sum_lo = 0.0;  // 0 = derive from eps_den
  double sum_hi = 0.0;  // 0 = derive as a.hi + b.hi
};

VectorBands bands_from_config(const ProtocolConfig& cfg);

// Hadamard product: v_a + v_b = a .* b. Lifts a into n x rho^2, b into
// rho^2 x n, runs one S2PM, keeps the product diagonal.
Vector s2php_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands);
Vector s2php_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands);

// Addition-to-product conversion: v_a .* v_b = a + b. v_a is drawn
// log-uniform in magnitude (nonzero), one extra message carries t.
Vector s2patp_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands);
Vector s2patp_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands);

// Reciprocal of a shared sum: v_a + v_b = 1 ./ (a + b). Requires
// |a_i + b_i| >= eps_den; Bob detects degenerate denominators.
Vector s2pr_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands);
Vector s2pr_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands);

// Exact sigmoid on a shared sum: v_a + v_b = 1 / (1 + e^-(a+b)).
// Shares are clamped to +-sigmoid_clamp before exponentiation so every
// intermediate product stays finite; sigma is constant far beyond the
// clamp to well below machine precision.
Vector s2ps_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands);
Vector s2ps_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands);

// Triple plans matching the execution order of the party functions above.
std::vector<TripleSpec> plan_s2php(const ProtocolConfig& cfg, std::size_t n,
                                   const VectorBands& bands);
std::vector<TripleSpec> plan_s2patp(const ProtocolConfig& cfg, std::size_t n,
                                    const VectorBands& bands);
std::vector<TripleSpec> plan_s2pr(const ProtocolConfig& cfg, std::size_t n,
                                  const VectorBands& bands);
std::vector<TripleSpec> plan_s2ps(const ProtocolConfig& cfg, std::size_t n,
                                  const VectorBands& bands);

double effective_sigmoid_clamp(const ProtocolConfig& cfg);

}  // namespace s2p
