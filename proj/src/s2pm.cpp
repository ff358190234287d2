#include "s2p/s2pm.hpp"

#include <chrono>
#include <cmath>

namespace s2p {

namespace {

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct PhaseScope {
  double& sink;
  double t0 = now_s();
  explicit PhaseScope(double& s) : sink(s) {}
  ~PhaseScope() { sink += now_s() - t0; }
};

double noise_scale_of(const Matrix& vf_self, const Matrix& vf_peer, const Matrix& st) {
  return std::max(max_abs(vf_self), std::max(max_abs(vf_peer), max_abs(st)));
}

void run_verification(PartyCtx& ctx, const Matrix& vf_self, const Matrix& vf_peer,
                      const Matrix& st, std::size_t s, const char* who) {
  PhaseScope t(ctx.phases.verify_s);
  if (ctx.cfg.verify_rounds <= 0) return;  // explicit opt-out (l = 0)
  double eps = verify_epsilon(ctx.cfg, s, st.cols(), noise_scale_of(vf_self, vf_peer, st));
  VerifyBundle bundle{vf_self, vf_peer, st, ctx.cfg.verify_rounds};
  if (s2pm_verify(bundle, ctx.rng, eps) == VerifyOutcome::Rejected)
    throw VerificationError(std::string("s2pm verification rejected at ") + who);
}

}  // namespace

double verify_epsilon(const ProtocolConfig& cfg, std::size_t s, std::size_t m,
                      double noise_scale) {
  return cfg.verify_slack * kUlp * static_cast<double>(s) * static_cast<double>(m) * noise_scale;
}

VerifyOutcome s2pm_verify(const VerifyBundle& bundle, SeededRng& rng, double eps_v) {
  require(bundle.VF_self.same_shape(bundle.VF_peer) && bundle.VF_self.same_shape(bundle.St),
          "s2pm_verify: shape mismatch");
  require(bundle.l >= 1, "s2pm_verify: l >= 1");
  const std::size_t n = bundle.St.rows(), m = bundle.St.cols();
  Matrix h = sub(add(bundle.VF_self, bundle.VF_peer), bundle.St);
  std::vector<uint8_t> probe(m);
  for (int round = 0; round < bundle.l; ++round) {
    for (std::size_t j = 0; j < m; ++j) probe[j] = rng.coin() ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      const double* row = &h.elems()[i * m];
      for (std::size_t j = 0; j < m; ++j)
        if (probe[j]) acc += row[j];
      if (!(std::fabs(acc) <= eps_v)) return VerifyOutcome::Rejected;
    }
  }
  return VerifyOutcome::Accepted;
}

Matrix s2pm_left(PartyCtx& ctx, const Matrix& A, const MaskTriple& triple) {
  require(ctx.peer != nullptr, "s2pm_left: no peer channel");
  require(A.rows() == triple.R.rows() && A.cols() == triple.R.cols(),
          "s2pm_left: operand/mask shape mismatch");
  A.require_finite("s2pm_left: A");
  const std::size_t s = A.cols();

  Matrix vf_a, vf_b, v_a;
  {
    PhaseScope t(ctx.phases.online_s);
    Matrix a_hat = add(A, triple.R);
    ctx.peer->send_matrices(tag::kMaskedLeft, {a_hat});
    Matrix b_hat = ctx.peer->expect_matrices(tag::kMaskedRight)[0];
    std::vector<Matrix> vfb_t = ctx.peer->expect_matrices(tag::kVfRightT);
    require(vfb_t.size() == 2, "s2pm_left: expected VF_b and T");
    vf_b = std::move(vfb_t[0]);
    Matrix ra_bhat = mul(triple.R, b_hat);
    v_a = sub(add(vfb_t[1], triple.r), ra_bhat);
    vf_a = add(v_a, ra_bhat);
    ctx.peer->send_matrices(tag::kVfLeft, {vf_a});
  }
  run_verification(ctx, vf_a, vf_b, triple.St, s, "left party");
  return v_a;
}

Matrix s2pm_right(PartyCtx& ctx, const Matrix& B, const MaskTriple& triple, double share_scale) {
  require(ctx.peer != nullptr, "s2pm_right: no peer channel");
  require(B.rows() == triple.R.rows() && B.cols() == triple.R.cols(),
          "s2pm_right: operand/mask shape mismatch");
  B.require_finite("s2pm_right: B");
  const std::size_t s = B.rows();

  Matrix v_b, vf_b;
  {
    PhaseScope t(ctx.phases.online_s);
    Matrix b_hat = add(B, triple.R);
    ctx.peer->send_matrices(tag::kMaskedRight, {b_hat});
    Matrix a_hat = ctx.peer->expect_matrices(tag::kMaskedLeft)[0];

    v_b = Matrix(a_hat.rows(), B.cols());
    for (double& x : v_b.elems()) x = ctx.rng.uniform(-share_scale, share_scale);
    vf_b = sub(v_b, mul(a_hat, B));
    Matrix t_mat = sub(triple.r, vf_b);
    if (ctx.tamper_vf_right) ctx.tamper_vf_right(vf_b);  // anomaly injection point
    ctx.peer->send_matrices(tag::kVfRightT, {vf_b, t_mat});
  }
  Matrix vf_a = ctx.peer->expect_matrices(tag::kVfLeft)[0];
  run_verification(ctx, vf_b, vf_a, triple.St, s, "right party");
  return v_b;
}

MagnitudeBand product_band(MagnitudeBand a, MagnitudeBand b) {
  double lo = a.lo * b.lo;
  if (lo == 0.0) lo = 5e-324;  // keep the band valid if the product underflows
  return MagnitudeBand(lo, a.hi * b.hi);
}

TripleSpec s2pm_spec(const ProtocolConfig& cfg, std::size_t n, std::size_t s, std::size_t m,
                     MagnitudeBand band_left, MagnitudeBand band_right) {
  TripleSpec spec;
  spec.n = static_cast<uint32_t>(n);
  spec.s = static_cast<uint32_t>(s);
  spec.m = static_cast<uint32_t>(m);
  spec.mask_scale_left = mask_scale_for(cfg, band_left);
  spec.mask_scale_right = mask_scale_for(cfg, band_right);
  return spec;
}

std::vector<TripleSpec> plan_s2phm(const ProtocolConfig& cfg, std::size_t n, std::size_t s,
                                   std::size_t m, MagnitudeBand band_left,
                                   MagnitudeBand band_right) {
  return {s2pm_spec(cfg, n, s, m, band_left, band_right),
          s2pm_spec(cfg, n, s, m, band_left, band_right)};
}

Matrix s2phm_alice(PartyCtx& ctx, const Matrix& A1, const Matrix& A2, MagnitudeBand band_left,
                   MagnitudeBand band_right) {
  double share_scale = share_scale_for(
      ctx.cfg, product_band(product_band(band_left, band_right),
                            MagnitudeBand(1.0, static_cast<double>(A1.cols()))));
  Matrix v0 = mul(A1, A2);
  Matrix v1 = s2pm_left(ctx, A1, ctx.fetch_triple());
  Matrix v2 = s2pm_right(ctx, A2, ctx.fetch_triple(), share_scale);
  return add(add(v0, v1), v2);
}

Matrix s2phm_bob(PartyCtx& ctx, const Matrix& B1, const Matrix& B2, MagnitudeBand band_left,
                 MagnitudeBand band_right) {
  double share_scale = share_scale_for(
      ctx.cfg, product_band(product_band(band_left, band_right),
                            MagnitudeBand(1.0, static_cast<double>(B1.cols()))));
  Matrix v0 = mul(B1, B2);
  Matrix v1 = s2pm_right(ctx, B2, ctx.fetch_triple(), share_scale);
  Matrix v2 = s2pm_left(ctx, B1, ctx.fetch_triple());
  return add(add(v0, v1), v2);
}

}  // namespace s2p
