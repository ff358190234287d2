#pragma once

#include "s2p/session.hpp"

namespace s2p {

// Joint view of a secure multiplication's output, used by in-process
// runners and tests; in a deployment each party only ever holds its half.
struct PairShares {
  Matrix V_a, V_b;
};

struct VerifyBundle {
  Matrix VF_self, VF_peer, St;
  int l = 1;
};

enum class VerifyOutcome { Accepted, Rejected };

// Random 0/1-probe residual check. The residual VF_a + VF_b - S_t equals
// V_a + V_b - A x B algebraically, so honest runs stay below eps_v (float
// slack in place of the exact-zero test; the two residual paths round
// differently) and a corrupted entry survives a round only when its probe
// bit draws zero.
VerifyOutcome s2pm_verify(const VerifyBundle& bundle, SeededRng& rng, double eps_v);

// eps_v = slack * u * s * m * noise_scale, where noise_scale is the largest
// magnitude among the verification inputs (they carry the product scale).
double verify_epsilon(const ProtocolConfig& cfg, std::size_t s, std::size_t m,
                      double noise_scale);

// One party's run of the online + verification stages. "Left" owns the
// n x s operand and plays the masked-A role; "right" owns s x m and the
// masked-B role. Throws VerificationError on a rejected run.
Matrix s2pm_left(PartyCtx& ctx, const Matrix& A, const MaskTriple& triple);
Matrix s2pm_right(PartyCtx& ctx, const Matrix& B, const MaskTriple& triple, double share_scale);

// Hybrid multiplication (A1 + B1) x (A2 + B2): local products plus two
// S2PM sub-runs, the second with the operand roles swapped.
Matrix s2phm_alice(PartyCtx& ctx, const Matrix& A1, const Matrix& A2, MagnitudeBand band_left,
                   MagnitudeBand band_right);
Matrix s2phm_bob(PartyCtx& ctx, const Matrix& B1, const Matrix& B2, MagnitudeBand band_left,
                 MagnitudeBand band_right);

// Triple plan for one hybrid multiplication of (n x s) by (s x m).
std::vector<TripleSpec> plan_s2phm(const ProtocolConfig& cfg, std::size_t n, std::size_t s,
                                   std::size_t m, MagnitudeBand band_left,
                                   MagnitudeBand band_right);
TripleSpec s2pm_spec(const ProtocolConfig& cfg, std::size_t n, std::size_t s, std::size_t m,
                     MagnitudeBand band_left, MagnitudeBand band_right);

MagnitudeBand product_band(MagnitudeBand a, MagnitudeBand b);

}  // namespace s2p
