#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace s2p {

// Unit roundoff convention used throughout: machine epsilon of binary64.
inline constexpr double kUlp = 2.220446049250313e-16;  // 2^-52

// Declared magnitude band for protocol operands: 0 < lo <= |v| <= hi.
// This is public session configuration (part of the protocol config, like
// rho and l), never computed from operand values.
struct MagnitudeBand {
  double lo = 1.0;
  double hi = 1.0;

  MagnitudeBand() = default;
  MagnitudeBand(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
      throw std::invalid_argument("MagnitudeBand: need 0 < lo <= hi < inf");
  }
};

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Result verification (the l-round random-probe check) rejected a run.
struct VerificationError : ProtocolError {
  using ProtocolError::ProtocolError;
};

// A reciprocal was requested on a shared sum too close to zero.
struct DegenerateDenominator : ProtocolError {
  using ProtocolError::ProtocolError;
};

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace s2p
