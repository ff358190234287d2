#pragma once

#include <functional>
#include <memory>

#include "s2p/protocols.hpp"

namespace s2p {

enum class Transport { Mem, Tcp };

struct RunOptions {
  ProtocolConfig cfg;
  Transport transport = Transport::Mem;
  double latency_ms = 0.0;
  double timeout_s = 30.0;
  uint64_t seed = 1;
  std::function<void(Matrix&)> tamper_vf_right;  // applied at the right party
};

// Aggregated view of one session. Rounds and payload bits follow the
// one-way-message convention (counted at the sender, CS deliveries
// included, control frames excluded).
struct SessionStats {
  uint64_t rounds = 0;
  uint64_t payload_bits = 0;
  PhaseTimes alice, bob;
  double alice_comm_s = 0, bob_comm_s = 0;
  double cs_offline_s = 0;
  std::vector<Transcript> transcripts;  // alice/peer, alice/cs, bob/peer, bob/cs, cs/alice, cs/bob

  uint64_t digest() const;       // canonical, timestamp-free
  bool cs_clean() const;         // CS endpoints carry only preprocessing tags
  const Transcript& by_name(const std::string& name) const;
};

// Runs Alice and Bob bodies concurrently against a fresh CS, over in-process
// queues or TCP loopback, and aggregates transcripts. The bodies receive a
// ready PartyCtx (peer channel, triple client, seeded rng).
using PartyBody = std::function<void(PartyCtx&)>;
SessionStats run_session(const RunOptions& opts, PartyBody alice, PartyBody bob);

struct VecPairResult {
  Vector v_a, v_b;
  SessionStats stats;
};

struct MatPairResult {
  Matrix V_a, V_b;
  SessionStats stats;
};

VecPairResult run_s2php(const Vector& a, const Vector& b, const RunOptions& opts);
VecPairResult run_s2patp(const Vector& a, const Vector& b, const RunOptions& opts);
VecPairResult run_s2pr(const Vector& a, const Vector& b, const RunOptions& opts);
VecPairResult run_s2ps(const Vector& a, const Vector& b, const RunOptions& opts);

MatPairResult run_s2pm(const Matrix& A, const Matrix& B, const RunOptions& opts);
MatPairResult run_s2phm(const Matrix& A1, const Matrix& A2, const Matrix& B1, const Matrix& B2,
                        const RunOptions& opts);

Vector reconstruct_sum(const Vector& a, const Vector& b);

}  // namespace s2p
