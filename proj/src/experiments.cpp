#include "s2p/experiments.hpp"

#include <cmath>
#include <future>

#include "json.hpp"

namespace s2p {

using ordered_json = nlohmann::ordered_json;

namespace {
constexpr const char* kSchema = "s2p-report/1";
constexpr uint64_t kMantissaScale = 1000000000000000ull;  // 10^15
}  // namespace

double delta_range_value(int x, SeededRng& rng) {
  uint64_t digits = rng.below(kMantissaScale);
  double mantissa = 1.0 + static_cast<double>(digits) / static_cast<double>(kMantissaScale);
  int delta = rng.uniform_int(-x, x);
  double v = mantissa * std::pow(10.0, delta);
  return rng.coin() ? v : -v;
}

Vector delta_range_vector(std::size_t n, int x, SeededRng& rng) {
  Vector v(n);
  for (double& e : v) e = delta_range_value(x, rng);
  return v;
}

VecProtocol protocol_from_name(const std::string& name) {
  if (name == "s2php") return VecProtocol::S2php;
  if (name == "s2patp") return VecProtocol::S2patp;
  if (name == "s2pr") return VecProtocol::S2pr;
  if (name == "s2ps") return VecProtocol::S2ps;
  throw std::invalid_argument("unknown protocol: " + name);
}

const char* protocol_name(VecProtocol p) {
  switch (p) {
    case VecProtocol::S2php: return "s2php";
    case VecProtocol::S2patp: return "s2patp";
    case VecProtocol::S2pr: return "s2pr";
    case VecProtocol::S2ps: return "s2ps";
  }
  return "?";
}

ProtocolConfig precision_config(VecProtocol p, int delta_x) {
  ProtocolConfig cfg;
  cfg.rho = 2;
  cfg.split_mode = SplitMode::SignConsistent;
  cfg.mask_policy = MaskPolicy::BelowData;
  cfg.verify_rounds = 4;
  double lo = std::pow(10.0, -delta_x);
  double hi = 2.0 * std::pow(10.0, delta_x);
  if (p == VecProtocol::S2ps) hi = std::min(hi, cfg.sigmoid_clamp);
  cfg.input_band = MagnitudeBand(std::min(lo, hi), hi);
  return cfg;
}

namespace {

struct PrecisionAccum {
  double mre = 0, mre_cond = 0, are_sum = 0, worst_kappa = 1;
  std::size_t elements = 0, resamples = 0;

  void merge(const PrecisionAccum& o) {
    mre = std::max(mre, o.mre);
    mre_cond = std::max(mre_cond, o.mre_cond);
    are_sum += o.are_sum;
    worst_kappa = std::max(worst_kappa, o.worst_kappa);
    elements += o.elements;
    resamples += o.resamples;
  }
};

PrecisionAccum precision_trial(VecProtocol p, int delta_x, std::size_t n, uint64_t trial_seed) {
  PrecisionAccum acc;
  ProtocolConfig cfg = precision_config(p, delta_x);
  SeededRng gen(SeededRng::mix(trial_seed, 0xDA7A));
  Vector a = delta_range_vector(n, delta_x, gen);
  Vector b = delta_range_vector(n, delta_x, gen);

  if (p == VecProtocol::S2ps) {
    double clamp = effective_sigmoid_clamp(cfg);
    for (double& v : a) v = std::min(clamp, std::max(-clamp, v));
    for (double& v : b) v = std::min(clamp, std::max(-clamp, v));
  }
  if (p == VecProtocol::S2pr) {
    for (std::size_t i = 0; i < n; ++i)
      while (std::fabs(a[i] + b[i]) < cfg.eps_den) {
        a[i] = delta_range_value(delta_x, gen);
        b[i] = delta_range_value(delta_x, gen);
        ++acc.resamples;
      }
  }

  RunOptions opts;
  opts.cfg = cfg;
  opts.transport = Transport::Mem;
  opts.seed = SeededRng::mix(trial_seed, 0x5e55);

  Vector va, vb;
  switch (p) {
    case VecProtocol::S2php: {
      auto r = run_s2php(a, b, opts);
      va = r.v_a, vb = r.v_b;
      break;
    }
    case VecProtocol::S2patp: {
      auto r = run_s2patp(a, b, opts);
      va = r.v_a, vb = r.v_b;
      break;
    }
    case VecProtocol::S2pr: {
      auto r = run_s2pr(a, b, opts);
      va = r.v_a, vb = r.v_b;
      break;
    }
    case VecProtocol::S2ps: {
      auto r = run_s2ps(a, b, opts);
      va = r.v_a, vb = r.v_b;
      break;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    double oracle, recon, kappa = 1.0;
    switch (p) {
      case VecProtocol::S2php:
        oracle = a[i] * b[i];
        recon = va[i] + vb[i];
        break;
      case VecProtocol::S2patp:
        oracle = a[i] + b[i];
        recon = va[i] * vb[i];
        kappa = (std::fabs(a[i]) + std::fabs(b[i])) / std::fabs(oracle);
        break;
      case VecProtocol::S2pr:
        oracle = 1.0 / (a[i] + b[i]);
        recon = va[i] + vb[i];
        kappa = (std::fabs(a[i]) + std::fabs(b[i])) / std::fabs(a[i] + b[i]);
        break;
      case VecProtocol::S2ps:
        oracle = plain_sigmoid(a[i] + b[i]);
        recon = va[i] + vb[i];
        break;
    }
    double rel = std::fabs(recon - oracle) / std::fabs(oracle);
    acc.mre = std::max(acc.mre, rel);
    if (kappa <= 1e3) acc.mre_cond = std::max(acc.mre_cond, rel);
    acc.worst_kappa = std::max(acc.worst_kappa, kappa);
    acc.are_sum += rel;
    ++acc.elements;
  }
  return acc;
}

}  // namespace

PrecisionReport precision_experiment(VecProtocol p, int delta_x, std::size_t n,
                                     std::size_t trials, uint64_t seed, int threads) {
  require(trials >= 1, "precision_experiment: trials >= 1");
  require(delta_x >= 0, "precision_experiment: delta_x >= 0");

  PrecisionAccum total;
  if (threads <= 1) {
    for (std::size_t t = 0; t < trials; ++t)
      total.merge(precision_trial(p, delta_x, n, SeededRng::mix(seed, t)));
  } else {
    std::size_t nblocks = std::min<std::size_t>(threads, trials);
    std::vector<std::future<PrecisionAccum>> futs;
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
      futs.push_back(std::async(std::launch::async, [=] {
        PrecisionAccum acc;
        for (std::size_t t = blk; t < trials; t += nblocks)
          acc.merge(precision_trial(p, delta_x, n, SeededRng::mix(seed, t)));
        return acc;
      }));
    }
    for (auto& f : futs) total.merge(f.get());
  }

  PrecisionReport r;
  r.protocol = p;
  r.delta_x = delta_x;
  r.n = n;
  r.trials = trials;
  r.seed = seed;
  r.elements = total.elements;
  r.mre = total.mre;
  r.mre_conditioned = total.mre_cond;
  r.worst_condition = total.worst_kappa;
  r.are = total.elements ? total.are_sum / static_cast<double>(total.elements) : 0.0;
  r.resamples = total.resamples;
  return r;
}

ThetaReport security_theta_probability(double theta, std::size_t trials, uint64_t seed) {
  require(theta >= 1.0, "security_theta_probability: theta >= 1");
  require(trials >= 1, "security_theta_probability: trials >= 1");
  // Data interval [-1/2, 1/2] (L1 = 1), mask interval theta times wider.
  const double l1 = -0.5, r1 = 0.5;
  const double l2 = -theta / 2, r2 = theta / 2;
  SeededRng rng(seed);
  std::size_t safe = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    double a_hat = rng.uniform(l1 + l2, r1 + r2);
    if (a_hat >= l2 + r1 && a_hat <= l1 + r2) ++safe;
  }
  ThetaReport r;
  r.theta = theta;
  r.trials = trials;
  r.seed = seed;
  r.analytic = 1.0 - 2.0 / (theta + 1.0);
  r.empirical = static_cast<double>(safe) / static_cast<double>(trials);
  r.sigma = std::sqrt(std::max(r.analytic * (1 - r.analytic), 1e-12) /
                      static_cast<double>(trials));
  return r;
}

double digit_loss_analytic(std::size_t n, int d) {
  return (1.0 - std::pow(1.0 - std::pow(10.0, -d), static_cast<double>(n))) / 2.0;
}

DigitLossReport digit_loss_probability(std::size_t n, int d, std::size_t trials, uint64_t seed) {
  require(n >= 1 && d >= 1, "digit_loss_probability: n >= 1, d >= 1");
  SeededRng rng(seed);
  std::size_t hits = 0;
  // Threshold on the 15-digit integer mantissa difference: losing >= d
  // leading digits means the difference fits in 15 - d digits.
  uint64_t limit = kMantissaScale;
  for (int k = 0; k < d; ++k) limit /= 10;
  for (std::size_t t = 0; t < trials; ++t) {
    bool lost = false;
    for (std::size_t i = 0; i < n && !lost; ++i) {
      uint64_t m1 = rng.below(kMantissaScale);
      uint64_t m2 = rng.below(kMantissaScale);
      bool opposite = rng.coin();
      if (!opposite) continue;
      uint64_t diff = m1 > m2 ? m1 - m2 : m2 - m1;
      if (diff < limit) lost = true;
    }
    if (lost) ++hits;
  }
  DigitLossReport r;
  r.n = n;
  r.d = d;
  r.trials = trials;
  r.seed = seed;
  r.analytic = digit_loss_analytic(n, d);
  r.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  return r;
}

VerifyFailReport verification_failure_experiment(int l, double tamper, std::size_t trials,
                                                 uint64_t seed) {
  require(l >= 1, "verification_failure_experiment: l >= 1");
  require(trials >= 1, "verification_failure_experiment: trials >= 1");
  const std::size_t n = 4, s = 4, m = 4;

  ProtocolConfig cfg;
  cfg.mask_policy = MaskPolicy::BelowData;
  cfg.input_band = MagnitudeBand(0x1.0p-10, 1.0);
  cfg.verify_rounds = l;

  VerifyFailReport rep;
  rep.l = l;
  rep.tamper = tamper;
  rep.trials = trials;
  rep.seed = seed;
  rep.bound = std::pow(4.0, -l);
  rep.sigma = std::sqrt(rep.bound * (1 - rep.bound) / static_cast<double>(trials));
  rep.honest_trials = trials;

  TripleSpec spec = s2pm_spec(cfg, n, s, m, cfg.input_band, cfg.input_band);
  double share_scale = share_scale_for(cfg, product_band(cfg.input_band, cfg.input_band));

  std::size_t misses = 0, alice_misses = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    SeededRng rng(SeededRng::mix(seed, t));
    auto [ta, tb] = cs_preprocess(spec, rng);
    Matrix A(n, s), B(s, m);
    for (double& x : A.elems()) x = rng.uniform(-1.0, 1.0);
    for (double& x : B.elems()) x = rng.uniform(-1.0, 1.0);

    Matrix a_hat = add(A, ta.R);
    Matrix b_hat = add(B, tb.R);
    Matrix v_b(n, m);
    for (double& x : v_b.elems()) x = rng.uniform(-share_scale, share_scale);
    Matrix vf_b = sub(v_b, mul(a_hat, B));
    Matrix t_mat = sub(tb.r, vf_b);
    Matrix ra_bhat = mul(ta.R, b_hat);
    Matrix v_a = sub(add(t_mat, ta.r), ra_bhat);
    Matrix vf_a = add(v_a, ra_bhat);

    // Honest control first: both parties must accept.
    double eps = verify_epsilon(cfg, s, m,
                                std::max(max_abs(vf_a), std::max(max_abs(vf_b), max_abs(ta.St))));
    SeededRng rng_a = rng.fork(0xA);
    SeededRng rng_b = rng.fork(0xB);
    bool ha = s2pm_verify({vf_a, vf_b, ta.St, l}, rng_a, eps) == VerifyOutcome::Accepted;
    bool hb = s2pm_verify({vf_b, vf_a, tb.St, l}, rng_b, eps) == VerifyOutcome::Accepted;
    if (ha && hb) ++rep.honest_accepts;

    std::size_t ti = rng.below(n), tj = rng.below(m);
    vf_b(ti, tj) += tamper;
    SeededRng rng_a2 = rng.fork(0xA2);
    SeededRng rng_b2 = rng.fork(0xB2);
    bool aa = s2pm_verify({vf_a, vf_b, ta.St, l}, rng_a2, eps) == VerifyOutcome::Accepted;
    bool ab = s2pm_verify({vf_b, vf_a, tb.St, l}, rng_b2, eps) == VerifyOutcome::Accepted;
    if (aa) ++alice_misses;
    if (aa && ab) ++misses;
  }
  rep.miss_rate = static_cast<double>(misses) / static_cast<double>(trials);
  rep.per_party_rate = static_cast<double>(alice_misses) / static_cast<double>(trials);
  return rep;
}

std::vector<ProportionRow> verification_proportion(const std::string& protocol,
                                                   const std::vector<std::size_t>& dims,
                                                   const std::vector<int>& l_values,
                                                   std::size_t reps, uint64_t seed) {
  require(protocol == "s2ps" || protocol == "s2phm", "verification_proportion: s2ps or s2phm");
  std::vector<ProportionRow> rows;
  for (std::size_t dim : dims) {
    for (int l : l_values) {
      ProportionRow row;
      row.protocol = protocol;
      row.dim = dim;
      row.l = l;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        ProtocolConfig cfg;
        cfg.mask_policy = MaskPolicy::BelowData;
        cfg.input_band = MagnitudeBand(0x1.0p-10, 1.0);
        cfg.verify_rounds = l;
        RunOptions opts;
        opts.cfg = cfg;
        opts.seed = SeededRng::mix(seed, dim * 1000 + static_cast<std::size_t>(l) * 31 + rep);
        SeededRng gen(SeededRng::mix(opts.seed, 0xD1));
        SessionStats stats;
        if (protocol == "s2ps") {
          Vector a(dim), b(dim);
          for (double& x : a) x = gen.uniform(-1.0, 1.0);
          for (double& x : b) x = gen.uniform(-1.0, 1.0);
          stats = run_s2ps(a, b, opts).stats;
        } else {
          Matrix m1(dim, dim), m2(dim, dim), m3(dim, dim), m4(dim, dim);
          for (Matrix* m : {&m1, &m2, &m3, &m4})
            for (double& x : m->elems()) x = gen.uniform(-1.0, 1.0);
          stats = run_s2phm(m1, m2, m3, m4, opts).stats;
        }
        row.offline_s += stats.alice.offline_s + stats.bob.offline_s + stats.cs_offline_s;
        row.online_s += stats.alice.online_s + stats.bob.online_s;
        row.verify_s += stats.alice.verify_s + stats.bob.verify_s;
      }
      double total = row.offline_s + row.online_s + row.verify_s;
      row.verify_share = total > 0 ? row.verify_s / total : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

struct ColumnScaler {
  Vector lo, span;
  void fit(const Matrix& X) {
    lo.assign(X.cols(), 0.0);
    span.assign(X.cols(), 1.0);
    for (std::size_t j = 0; j < X.cols(); ++j) {
      double mn = X(0, j), mx = X(0, j);
      for (std::size_t i = 1; i < X.rows(); ++i) {
        mn = std::min(mn, X(i, j));
        mx = std::max(mx, X(i, j));
      }
      lo[j] = mn;
      span[j] = mx - mn > 0 ? mx - mn : 1.0;
    }
  }
  void apply(Matrix& X) const {
    for (std::size_t j = 0; j < X.cols(); ++j)
      for (std::size_t i = 0; i < X.rows(); ++i) X(i, j) = (X(i, j) - lo[j]) / span[j];
  }
};

}  // namespace

LrBenchResult run_lr_benchmark(const Dataset& train, const Dataset& test, std::size_t split_col,
                               const TrainConfig& tc, const RunOptions& opts, double threshold,
                               bool scale_features, const std::string& dataset_id) {
  require(train.X.cols() == test.X.cols(), "lr benchmark: train/test feature mismatch");
  Matrix Xtr = train.X, Xte = test.X;
  if (scale_features) {
    ColumnScaler scaler;
    scaler.fit(Xtr);
    scaler.apply(Xtr);
    scaler.apply(Xte);
  }
  auto [Xtr_a, Xtr_b] = vertical_partition(Xtr, split_col);
  auto [Xte_a, Xte_b] = vertical_partition(Xte, split_col);

  LrBenchResult out;
  TrainResult tr = run_s2plort(Xtr_a, Xtr_b, train.y, tc, opts);
  out.w_secure = reconstruct_sum(tr.model.w_a, tr.model.w_b);
  out.w_plain = plain_lort(Xtr, train.y, tc);

  VecPairResult pred = run_s2plorp(Xte_a, Xte_b, tr.model, tc, opts);
  Vector secure_scores = reconstruct_sum(pred.v_a, pred.v_b);
  Vector plain_scores = plain_predict(Xte, out.w_plain);

  out.secure = evaluate(test.y, secure_scores, threshold);
  out.plain = evaluate(test.y, plain_scores, threshold);
  out.accuracy_gap = std::fabs(out.secure.accuracy - out.plain.accuracy);

  BenchReport& b = out.bench;
  b.dataset_id = dataset_id;
  b.train_rows = Xtr.rows();
  b.test_rows = Xte.rows();
  b.features = Xtr.cols();
  b.split_col = split_col;
  b.eta = tc.eta;
  b.batch_size = tc.batch_size;
  b.iterations = tc.iterations;
  b.seed = opts.seed;
  b.train_offline_s = tr.stats.alice.offline_s + tr.stats.bob.offline_s + tr.stats.cs_offline_s;
  b.train_online_s = tr.stats.alice.online_s + tr.stats.bob.online_s;
  b.train_verify_s = tr.stats.alice.verify_s + tr.stats.bob.verify_s;
  b.train_comm_s = tr.stats.alice_comm_s + tr.stats.bob_comm_s;
  b.train_total_s = b.train_offline_s + b.train_online_s + b.train_verify_s;
  b.train_rounds = tr.stats.rounds;
  b.train_payload_bits = tr.stats.payload_bits;
  b.predict_total_s = pred.stats.alice.total() + pred.stats.bob.total();
  b.predict_rounds = pred.stats.rounds;
  b.predict_payload_bits = pred.stats.payload_bits;
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

ordered_json metrics_json(const MetricsReport& m) {
  return ordered_json{{"accuracy", m.accuracy}, {"precision", m.precision},
                      {"recall", m.recall},     {"f1", m.f1},
                      {"auc", m.auc},           {"tp", m.tp},
                      {"fp", m.fp},             {"tn", m.tn},
                      {"fn", m.fn},             {"threshold", m.threshold}};
}

}  // namespace

std::string render_json(const PrecisionReport& r) {
  ordered_json j{{"schema", kSchema},
                 {"report", "precision"},
                 {"protocol", protocol_name(r.protocol)},
                 {"delta_x", r.delta_x},
                 {"n", r.n},
                 {"trials", r.trials},
                 {"elements", r.elements},
                 {"seed", r.seed},
                 {"mre", r.mre},
                 {"are", r.are},
                 {"mre_conditioned", r.mre_conditioned},
                 {"worst_condition", r.worst_condition},
                 {"resamples", r.resamples}};
  return j.dump(2);
}

std::string render_json(const ThetaReport& r) {
  ordered_json j{{"schema", kSchema},   {"report", "security-theta"}, {"theta", r.theta},
                 {"trials", r.trials},  {"seed", r.seed},             {"analytic", r.analytic},
                 {"empirical", r.empirical}, {"sigma", r.sigma}};
  return j.dump(2);
}

std::string render_json(const DigitLossReport& r) {
  ordered_json j{{"schema", kSchema}, {"report", "digit-loss"}, {"n", r.n},
                 {"d", r.d},          {"trials", r.trials},     {"seed", r.seed},
                 {"analytic", r.analytic}, {"empirical", r.empirical}};
  return j.dump(2);
}

std::string render_json(const VerifyFailReport& r) {
  ordered_json j{{"schema", kSchema},
                 {"report", "verify-fail"},
                 {"l", r.l},
                 {"tamper", r.tamper},
                 {"trials", r.trials},
                 {"seed", r.seed},
                 {"miss_rate", r.miss_rate},
                 {"per_party_rate", r.per_party_rate},
                 {"bound", r.bound},
                 {"sigma", r.sigma},
                 {"honest_accepts", r.honest_accepts},
                 {"honest_trials", r.honest_trials}};
  return j.dump(2);
}

std::string render_json(const std::vector<ProportionRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const ProportionRow& r : rows)
    arr.push_back(ordered_json{{"protocol", r.protocol},
                               {"dim", r.dim},
                               {"l", r.l},
                               {"offline_s", r.offline_s},
                               {"online_s", r.online_s},
                               {"verify_s", r.verify_s},
                               {"verify_share", r.verify_share}});
  ordered_json j{{"schema", kSchema}, {"report", "verify-proportion"}, {"rows", arr}};
  return j.dump(2);
}

std::string render_json(const LrBenchResult& r) {
  const BenchReport& b = r.bench;
  ordered_json j{{"schema", kSchema},
                 {"report", "bench-lr"},
                 {"dataset", b.dataset_id},
                 {"train_rows", b.train_rows},
                 {"test_rows", b.test_rows},
                 {"features", b.features},
                 {"split_col", b.split_col},
                 {"eta", b.eta},
                 {"batch_size", b.batch_size},
                 {"iterations", b.iterations},
                 {"seed", b.seed},
                 {"train",
                  ordered_json{{"rounds", b.train_rounds},
                               {"payload_bits", b.train_payload_bits},
                               {"offline_s", b.train_offline_s},
                               {"online_s", b.train_online_s},
                               {"verify_s", b.train_verify_s},
                               {"comm_s", b.train_comm_s},
                               {"total_s", b.train_total_s}}},
                 {"predict",
                  ordered_json{{"rounds", b.predict_rounds},
                               {"payload_bits", b.predict_payload_bits},
                               {"total_s", b.predict_total_s}}},
                 {"secure", metrics_json(r.secure)},
                 {"plain", metrics_json(r.plain)},
                 {"accuracy_gap", r.accuracy_gap},
                 {"w_secure", r.w_secure},
                 {"w_plain", r.w_plain}};
  return j.dump(2);
}

std::string render_csv(const PrecisionReport& r) {
  std::string s = "protocol,delta_x,n,trials,mre,are,mre_conditioned,worst_condition,resamples\n";
  s += std::string(protocol_name(r.protocol)) + "," + std::to_string(r.delta_x) + "," +
       std::to_string(r.n) + "," + std::to_string(r.trials) + "," + std::to_string(r.mre) + "," +
       std::to_string(r.are) + "," + std::to_string(r.mre_conditioned) + "," +
       std::to_string(r.worst_condition) + "," + std::to_string(r.resamples) + "\n";
  return s;
}

std::string render_csv(const std::vector<ProportionRow>& rows) {
  std::string s = "protocol,dim,l,offline_s,online_s,verify_s,verify_share\n";
  for (const ProportionRow& r : rows)
    s += r.protocol + "," + std::to_string(r.dim) + "," + std::to_string(r.l) + "," +
         std::to_string(r.offline_s) + "," + std::to_string(r.online_s) + "," +
         std::to_string(r.verify_s) + "," + std::to_string(r.verify_share) + "\n";
  return s;
}

}  // namespace s2p
