#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "s2p/rng.hpp"
#include "s2p/splits.hpp"
#include "s2p/transport.hpp"

namespace s2p {

// One party's preprocessing bundle. R is the private mask (R_a or R_b),
// r an additive share of St, and St = R_a x R_b is known to both parties.
struct MaskTriple {
  Matrix R;
  Matrix r;
  Matrix St;
};

// Shape and config-derived sampling scales for one multiplication
// (n x s) x (s x m). Scales come from the declared magnitude bands in the
// protocol config, never from operand values, so requests carry no
// operand-derived information.
struct TripleSpec {
  uint32_t n = 0, s = 0, m = 0;
  double mask_scale_left = 1.0;
  double mask_scale_right = 1.0;

  bool operator==(const TripleSpec&) const = default;
};

// Generates a consistent pair of bundles: masks rank-deficient against the
// shared dimension s, St = R_a x R_b, r_a + r_b = St. Rejects s < 2 (the
// mask product would be invertible down to a scalar relation).
std::pair<MaskTriple, MaskTriple> cs_preprocess(const TripleSpec& spec, SeededRng& rng);
std::pair<MaskTriple, MaskTriple> cs_preprocess(std::size_t n, std::size_t s, std::size_t m,
                                                MagnitudeBand data_range, double theta,
                                                SeededRng& rng);

std::vector<uint8_t> encode_triple_request(uint64_t invocation, Role side,
                                           const std::vector<TripleSpec>& specs);
struct TripleRequest {
  uint64_t invocation = 0;
  Role side = Role::Alice;
  std::vector<TripleSpec> specs;
};
TripleRequest decode_triple_request(const std::vector<uint8_t>& payload);

// The commodity-server node. Only ever sees shapes, scales and counts;
// generation is keyed on (session, invocation) so the two parties can ask
// in either order and still receive halves of the same generation.
class CsServer {
 public:
  explicit CsServer(uint64_t seed) : seed_(seed) {}

  // Serves triple requests on one link until the peer closes. Refuses any
  // non-preprocessing frame.
  void serve(Channel& ch, SessionId session);

  std::vector<MaskTriple> halves_for(SessionId session, const TripleRequest& req);

  double offline_seconds() const { return offline_s_; }

 private:
  struct Pending {
    std::vector<TripleSpec> specs;
    std::vector<MaskTriple> alice, bob;
    int served = 0;
  };

  uint64_t seed_;
  std::mutex mu_;
  std::map<std::pair<std::pair<uint64_t, uint64_t>, uint64_t>, Pending> cache_;
  double offline_s_ = 0.0;
};

// Party-side triple source. A composite protocol invocation plans the list
// of triples it will consume; with batching on, all of them arrive in one
// bundle frame, otherwise each take() performs its own request.
class TripleClient {
 public:
  TripleClient(Channel* cs, Role side, bool batching) : cs_(cs), side_(side), batching_(batching) {}

  void begin_invocation(uint64_t invocation, std::vector<TripleSpec> specs);
  MaskTriple take();
  bool exhausted() const { return next_ >= specs_.size(); }

 private:
  Channel* cs_;
  Role side_;
  bool batching_;
  uint64_t invocation_ = 0;
  std::vector<TripleSpec> specs_;
  std::vector<MaskTriple> fetched_;
  std::size_t next_ = 0;
};

}  // namespace s2p
