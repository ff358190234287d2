#pragma once

#include <functional>

#include "s2p/triples.hpp"

namespace s2p {

// How mask / blinding magnitudes relate to the declared operand band.
//
// ThetaExpanded follows the masking-range security analysis: masks span
// theta times the data range, so an observer of a masked value cannot
// shrink the operand's interval except with probability 2/(theta+1).
// Rounding then happens at mask scale, which costs ~u*theta^2 of relative
// accuracy on the unmasked result.
//
// BelowData places masks and blinding values a fixed factor (2^-16) below
// the smallest declared operand magnitude. Masking then cancels out of the
// float computation exactly up to rounding at data scale, which is what
// the elementwise error bounds (1.25*rho^2*u and friends) require. The two
// goals are mutually exclusive in one run; pick per session.
enum class MaskPolicy { ThetaExpanded, BelowData };

inline constexpr double kBelowDataFactor = 0x1.0p-16;

struct ProtocolConfig {
  int rho = 2;
  SplitMode split_mode = SplitMode::SignConsistent;
  double theta = 1e4;
  MaskPolicy mask_policy = MaskPolicy::ThetaExpanded;
  MagnitudeBand input_band{1e-4, 1e4};  // declared |element| band of protocol inputs
  int verify_rounds = 20;
  double verify_slack = 1024.0;  // eps_v = slack * u * s * m * noise_scale
  double eps_den = 1e-12;        // reciprocal degeneracy guard on |a+b|
  bool batch_triples = true;
  double atp_mag_lo = 1e-2, atp_mag_hi = 1e2;  // S2PATP blinding magnitudes
  double sigmoid_clamp = 350.0;  // per-share exponent clamp; e^(2*clamp) stays finite

  SplitParams split_params() const { return SplitParams(rho, split_mode, theta); }
};

double mask_scale_for(const ProtocolConfig& cfg, MagnitudeBand operand_band);
double share_scale_for(const ProtocolConfig& cfg, MagnitudeBand product_band);

struct PhaseTimes {
  double offline_s = 0, online_s = 0, verify_s = 0;
  double total() const { return offline_s + online_s + verify_s; }
};

// Per-party protocol state: one logical thread drives one ctx through a
// session. All randomness comes from the ctx rng; values are immutable
// once sent.
struct PartyCtx {
  Role role = Role::Alice;
  ProtocolConfig cfg;
  SeededRng rng;
  Channel* peer = nullptr;
  TripleClient* triples = nullptr;
  PhaseTimes phases;
  uint64_t invocation_counter = 0;

  // Test hook: corrupts VF_b after Bob computes it (the stored copy and
  // the sent copy are both affected, modelling a computation anomaly).
  std::function<void(Matrix&)> tamper_vf_right;

  PartyCtx(Role r, ProtocolConfig c, SeededRng g) : role(r), cfg(std::move(c)), rng(g) {}

  // Registers the triple plan of one top-level protocol invocation; with
  // batching on this is where the single CS round-trip happens.
  void plan_invocation(std::vector<TripleSpec> specs);
  MaskTriple fetch_triple();
};

}  // namespace s2p
