#pragma once

#include "s2p/datasets.hpp"
#include "s2p/logreg.hpp"

namespace s2p {

// Test-value generator: +-1.a1...a15 x 10^delta with the 15 fraction
// digits uniform and delta uniform over the integers in [-x, x].
double delta_range_value(int x, SeededRng& rng);
Vector delta_range_vector(std::size_t n, int x, SeededRng& rng);

enum class VecProtocol { S2php, S2patp, S2pr, S2ps };
VecProtocol protocol_from_name(const std::string& name);
const char* protocol_name(VecProtocol p);

// Session config used by the precision paths: sign-consistent splits and
// below-data masking, so the per-element error bounds apply. The declared
// band follows the generator's delta range.
ProtocolConfig precision_config(VecProtocol p, int delta_x);

struct PrecisionReport {
  VecProtocol protocol = VecProtocol::S2php;
  int delta_x = 0;
  std::size_t n = 0, trials = 0, elements = 0;
  uint64_t seed = 0;
  double mre = 0.0, are = 0.0;
  // Same maximum restricted to elements whose cancellation condition
  // factor (|a|+|b|)/|a+b| stays below 1e3; the unconditioned maximum is
  // dominated by the digit-loss events quantified separately.
  double mre_conditioned = 0.0;
  double worst_condition = 1.0;
  std::size_t resamples = 0;
};

PrecisionReport precision_experiment(VecProtocol p, int delta_x, std::size_t n,
                                     std::size_t trials, uint64_t seed, int threads = 1);

struct ThetaReport {
  double theta = 0;
  std::size_t trials = 0;
  uint64_t seed = 0;
  double analytic = 0, empirical = 0, sigma = 0;
};

// Monte Carlo of the masked-value interval game: the masked sum is taken
// uniform over its full reachable interval and the adversary wins when it
// pins the operand below its prior range. Matches 1 - 2/(theta+1).
ThetaReport security_theta_probability(double theta, std::size_t trials, uint64_t seed);

double digit_loss_analytic(std::size_t n, int d);

struct DigitLossReport {
  std::size_t n = 0;
  int d = 0;
  std::size_t trials = 0;
  uint64_t seed = 0;
  double analytic = 0, empirical = 0;
};

// Idealized digit-cancellation model: independent 15-digit mantissas and
// signs; a trial loses >= d digits when any of its n signed additions
// cancels that many leading digits.
DigitLossReport digit_loss_probability(std::size_t n, int d, std::size_t trials, uint64_t seed);

struct VerifyFailReport {
  int l = 1;
  double tamper = 1.0;
  std::size_t trials = 0;
  uint64_t seed = 0;
  double miss_rate = 0;       // both parties accept a tampered run
  double per_party_rate = 0;  // one party accepts
  double bound = 0;           // 4^-l
  double sigma = 0;           // binomial sigma of the bound at `trials`
  std::size_t honest_accepts = 0, honest_trials = 0;
};

VerifyFailReport verification_failure_experiment(int l, double tamper, std::size_t trials,
                                                 uint64_t seed);

struct ProportionRow {
  std::string protocol;
  std::size_t dim = 0;
  int l = 0;
  double offline_s = 0, online_s = 0, verify_s = 0;
  double verify_share = 0;
};

// Phase-time decomposition across dimensions and verification rounds for
// the sigmoid and hybrid-multiplication protocols.
std::vector<ProportionRow> verification_proportion(const std::string& protocol,
                                                   const std::vector<std::size_t>& dims,
                                                   const std::vector<int>& l_values,
                                                   std::size_t reps, uint64_t seed);

struct BenchReport {
  std::string dataset_id;
  std::size_t train_rows = 0, test_rows = 0, features = 0, split_col = 0;
  double eta = 0;
  std::size_t batch_size = 0, iterations = 0;
  uint64_t seed = 0;
  double train_offline_s = 0, train_online_s = 0, train_verify_s = 0, train_comm_s = 0,
         train_total_s = 0;
  uint64_t train_rounds = 0, train_payload_bits = 0;
  double predict_total_s = 0;
  uint64_t predict_rounds = 0, predict_payload_bits = 0;
};

struct LrBenchResult {
  BenchReport bench;
  MetricsReport secure, plain;
  double accuracy_gap = 0;
  Vector w_secure, w_plain;
};

LrBenchResult run_lr_benchmark(const Dataset& train, const Dataset& test, std::size_t split_col,
                               const TrainConfig& tc, const RunOptions& opts,
                               double threshold = 0.5, bool scale_features = true,
                               const std::string& dataset_id = "dataset");

// Machine-readable report rendering (stable field order, fixed schema tag).
std::string render_json(const PrecisionReport& r);
std::string render_json(const ThetaReport& r);
std::string render_json(const DigitLossReport& r);
std::string render_json(const VerifyFailReport& r);
std::string render_json(const std::vector<ProportionRow>& rows);
std::string render_json(const LrBenchResult& r);
std::string render_csv(const PrecisionReport& r);
std::string render_csv(const std::vector<ProportionRow>& rows);

}  // namespace s2p
