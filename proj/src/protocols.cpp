#include "s2p/protocols.hpp"

#include <cmath>

namespace s2p {

namespace {

MagnitudeBand recip_band(MagnitudeBand b) { return MagnitudeBand(1.0 / b.hi, 1.0 / b.lo); }

MagnitudeBand atp_blind_band(const ProtocolConfig& cfg) {
  return MagnitudeBand(cfg.atp_mag_lo, cfg.atp_mag_hi);
}

struct SumBand {
  double lo, hi;
};

SumBand sum_band(const ProtocolConfig& cfg, const VectorBands& bands) {
  double lo = bands.sum_lo > 0 ? bands.sum_lo : cfg.eps_den;
  double hi = bands.sum_hi > 0 ? bands.sum_hi : bands.a.hi + bands.b.hi;
  return {lo, hi};
}

TripleSpec php_spec(const ProtocolConfig& cfg, std::size_t n, MagnitudeBand ba,
                    MagnitudeBand bb) {
  std::size_t rho2 = static_cast<std::size_t>(cfg.rho) * cfg.rho;
  return s2pm_spec(cfg, n, rho2, n, ba, bb);
}

// Bands of the reciprocal stage of S2PR: t_a = 1/u_a stays in the inverse
// blind band, t_b = 1/u_b in the inverse of t_a .* (a+b).
struct RecipBands {
  MagnitudeBand ta, tb;
};

RecipBands s2pr_bands(const ProtocolConfig& cfg, const VectorBands& bands) {
  SumBand sum = sum_band(cfg, bands);
  MagnitudeBand blind = atp_blind_band(cfg);
  MagnitudeBand vb_band(sum.lo / blind.hi, sum.hi / blind.lo);
  return {recip_band(blind), recip_band(vb_band)};
}

// Bands of the sigmoid chain; the reciprocal runs on u_a* = u_a + 1 and
// Bob's near-noise share u_b, with the shared sum 1 + e^-(a+b) >= 1.
struct SigmoidBands {
  double clamp_a, clamp_b;
  MagnitudeBand ta, tb;
  VectorBands rec;
};

SigmoidBands sigmoid_bands(const ProtocolConfig& cfg, const VectorBands& bands) {
  SigmoidBands sb{};
  sb.clamp_a = std::min(effective_sigmoid_clamp(cfg), bands.a.hi);
  sb.clamp_b = std::min(effective_sigmoid_clamp(cfg), bands.b.hi);
  sb.ta = MagnitudeBand(std::exp(-sb.clamp_a), std::exp(sb.clamp_a));
  sb.tb = MagnitudeBand(std::exp(-sb.clamp_b), std::exp(sb.clamp_b));
  MagnitudeBand prod = product_band(sb.ta, sb.tb);
  double share1 = std::max(share_scale_for(cfg, prod), 5e-324);
  sb.rec.a = MagnitudeBand(0.5, 1.0 + prod.hi);
  sb.rec.b = MagnitudeBand(std::max(share1 * kBelowDataFactor, 5e-324), share1);
  sb.rec.sum_lo = 1.0;
  sb.rec.sum_hi = 1.0 + prod.hi;
  return sb;
}

Vector recip_elem(const Vector& v) {
  Vector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = 1.0 / v[i];
  return r;
}

Vector php_core_alice(PartyCtx& ctx, const Vector& a) {
  require(!a.empty(), "s2php: empty vector");
  require(all_finite(a), "s2php: non-finite input");
  Matrix lifted = ra2a(a, ctx.cfg.split_params(), ctx.rng);
  Matrix v = s2pm_left(ctx, lifted, ctx.fetch_triple());
  return diag2v(v);
}

Vector php_core_bob(PartyCtx& ctx, const Vector& b, MagnitudeBand ba, MagnitudeBand bb) {
  require(!b.empty(), "s2php: empty vector");
  require(all_finite(b), "s2php: non-finite input");
  Matrix lifted = rb2b(b, ctx.cfg.split_params(), ctx.rng);
  double share_scale = share_scale_for(ctx.cfg, product_band(ba, bb));
  Matrix v = s2pm_right(ctx, lifted, ctx.fetch_triple(), share_scale);
  return diag2v(v);
}

// S2PATP core. Alice ends with the blinding vector (her multiplicative
// share); Bob ends with t_a .* (a + b).
Vector atp_core_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands) {
  (void)bands;
  Vector v_a(a.size());
  for (double& x : v_a) x = ctx.rng.signed_log_uniform(ctx.cfg.atp_mag_lo, ctx.cfg.atp_mag_hi);
  Vector t_a = recip_elem(v_a);
  Vector a_hat(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) a_hat[i] = a[i] * t_a[i];

  Vector u_a = php_core_alice(ctx, t_a);
  Vector t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = a_hat[i] + u_a[i];
  ctx.peer->send_matrices(tag::kAtpT, {Matrix::column(t)});
  return v_a;
}

Vector atp_core_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands) {
  Vector u_b = php_core_bob(ctx, b, recip_band(atp_blind_band(ctx.cfg)), bands.b);
  Vector t = ctx.peer->expect_matrices(tag::kAtpT)[0].as_vector();
  require(t.size() == b.size(), "s2patp: length mismatch");
  Vector v_b(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) v_b[i] = u_b[i] + t[i];
  return v_b;
}

Vector s2pr_core_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands) {
  Vector u_a = atp_core_alice(ctx, a, bands);
  Vector t_a = recip_elem(u_a);  // |u_a| in the blind band, never degenerate
  return php_core_alice(ctx, t_a);
}

Vector s2pr_core_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands) {
  RecipBands rb = s2pr_bands(ctx.cfg, bands);
  Vector u_b = atp_core_bob(ctx, b, bands);
  double guard = ctx.cfg.eps_den * ctx.cfg.atp_mag_lo;
  Vector t_b(u_b.size());
  for (std::size_t i = 0; i < u_b.size(); ++i) {
    if (!std::isfinite(u_b[i]) || std::fabs(u_b[i]) < guard)
      throw DegenerateDenominator("s2pr: shared sum within eps_den of zero at index " +
                                  std::to_string(i));
    t_b[i] = 1.0 / u_b[i];
  }
  return php_core_bob(ctx, t_b, rb.ta, rb.tb);
}

Vector clamp_exp_neg(const Vector& v, double clamp) {
  Vector t(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double x = v[i];
    if (x > clamp) x = clamp;
    if (x < -clamp) x = -clamp;
    t[i] = std::exp(-x);
  }
  return t;
}

}  // namespace

VectorBands bands_from_config(const ProtocolConfig& cfg) {
  VectorBands b;
  b.a = cfg.input_band;
  b.b = cfg.input_band;
  return b;
}

double effective_sigmoid_clamp(const ProtocolConfig& cfg) {
  // Theta-expanded masks sit on top of e^clamp operands; keep the masked
  // products far from the binary64 overflow edge in that mode.
  if (cfg.mask_policy == MaskPolicy::ThetaExpanded)
    return std::min(cfg.sigmoid_clamp, 150.0);
  return std::min(cfg.sigmoid_clamp, 350.0);
}

std::vector<TripleSpec> plan_s2php(const ProtocolConfig& cfg, std::size_t n,
                                   const VectorBands& bands) {
  return {php_spec(cfg, n, bands.a, bands.b)};
}

std::vector<TripleSpec> plan_s2patp(const ProtocolConfig& cfg, std::size_t n,
                                    const VectorBands& bands) {
  return {php_spec(cfg, n, recip_band(atp_blind_band(cfg)), bands.b)};
}

std::vector<TripleSpec> plan_s2pr(const ProtocolConfig& cfg, std::size_t n,
                                  const VectorBands& bands) {
  RecipBands rb = s2pr_bands(cfg, bands);
  std::vector<TripleSpec> specs = plan_s2patp(cfg, n, bands);
  specs.push_back(php_spec(cfg, n, rb.ta, rb.tb));
  return specs;
}

std::vector<TripleSpec> plan_s2ps(const ProtocolConfig& cfg, std::size_t n,
                                  const VectorBands& bands) {
  SigmoidBands sb = sigmoid_bands(cfg, bands);
  std::vector<TripleSpec> specs = {php_spec(cfg, n, sb.ta, sb.tb)};
  auto rest = plan_s2pr(cfg, n, sb.rec);
  specs.insert(specs.end(), rest.begin(), rest.end());
  return specs;
}

Vector s2php_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands) {
  ctx.plan_invocation(plan_s2php(ctx.cfg, a.size(), bands));
  return php_core_alice(ctx, a);
}

Vector s2php_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands) {
  ctx.plan_invocation(plan_s2php(ctx.cfg, b.size(), bands));
  return php_core_bob(ctx, b, bands.a, bands.b);
}

Vector s2patp_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands) {
  ctx.plan_invocation(plan_s2patp(ctx.cfg, a.size(), bands));
  return atp_core_alice(ctx, a, bands);
}

Vector s2patp_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands) {
  ctx.plan_invocation(plan_s2patp(ctx.cfg, b.size(), bands));
  return atp_core_bob(ctx, b, bands);
}

Vector s2pr_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands) {
  ctx.plan_invocation(plan_s2pr(ctx.cfg, a.size(), bands));
  return s2pr_core_alice(ctx, a, bands);
}

Vector s2pr_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands) {
  ctx.plan_invocation(plan_s2pr(ctx.cfg, b.size(), bands));
  return s2pr_core_bob(ctx, b, bands);
}

Vector s2ps_alice(PartyCtx& ctx, const Vector& a, const VectorBands& bands) {
  ctx.plan_invocation(plan_s2ps(ctx.cfg, a.size(), bands));
  SigmoidBands sb = sigmoid_bands(ctx.cfg, bands);
  Vector t_a = clamp_exp_neg(a, sb.clamp_a);
  Vector u_a = php_core_alice(ctx, t_a);
  for (double& x : u_a) x += 1.0;  // u_a* = u_a + 1
  return s2pr_core_alice(ctx, u_a, sb.rec);
}

Vector s2ps_bob(PartyCtx& ctx, const Vector& b, const VectorBands& bands) {
  ctx.plan_invocation(plan_s2ps(ctx.cfg, b.size(), bands));
  SigmoidBands sb = sigmoid_bands(ctx.cfg, bands);
  Vector t_b = clamp_exp_neg(b, sb.clamp_b);
  Vector u_b = php_core_bob(ctx, t_b, sb.ta, sb.tb);
  return s2pr_core_bob(ctx, u_b, sb.rec);
}

}  // namespace s2p
