#include "s2p/session.hpp"

#include <chrono>

namespace s2p {

namespace {
double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}
}  // namespace

double mask_scale_for(const ProtocolConfig& cfg, MagnitudeBand operand_band) {
  if (cfg.mask_policy == MaskPolicy::ThetaExpanded) return cfg.theta * operand_band.hi;
  return operand_band.lo * kBelowDataFactor;
}

double share_scale_for(const ProtocolConfig& cfg, MagnitudeBand product_band) {
  if (cfg.mask_policy == MaskPolicy::ThetaExpanded) return cfg.theta * product_band.hi;
  return product_band.lo * kBelowDataFactor;
}

void PartyCtx::plan_invocation(std::vector<TripleSpec> specs) {
  require(triples != nullptr, "PartyCtx: no triple source");
  double t0 = now_s();
  triples->begin_invocation(invocation_counter++, std::move(specs));
  phases.offline_s += now_s() - t0;
}

MaskTriple PartyCtx::fetch_triple() {
  require(triples != nullptr, "PartyCtx: no triple source");
  double t0 = now_s();
  MaskTriple t = triples->take();
  phases.offline_s += now_s() - t0;
  return t;
}

}  // namespace s2p
