// Command-line front end: experiment drivers, training/prediction, and the
// four-node runtime.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "s2p/experiments.hpp"
#include "s2p/node.hpp"

namespace {

using s2p::Vector;
using ordered_json = nlohmann::ordered_json;

void write_out(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text << "\n";
  std::cerr << "wrote " << path << "\n";
}

std::string csv_sibling(const std::string& json_path) {
  if (json_path.empty() || json_path == "-") return "";
  auto pos = json_path.rfind(".json");
  return pos == std::string::npos ? json_path + ".csv" : json_path.substr(0, pos) + ".csv";
}

struct ProtoFlags {
  int rho = 2;
  int l = 20;
  double theta = 1e4;
  std::string mask_policy = "below-data";
  double band_lo = 1e-4, band_hi = 1e4;
  bool no_batch = false;
  std::string split_mode = "sign-consistent";
  std::string transport = "mem";
  double latency_ms = 0.0;
  uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--rho", rho, "split factor (>= 2)");
    app->add_option("--l", l, "verification rounds");
    app->add_option("--theta", theta, "mask range expansion factor");
    app->add_option("--mask-policy", mask_policy, "below-data | theta-expanded")
        ->check(CLI::IsMember({"below-data", "theta-expanded"}));
    app->add_option("--band-lo", band_lo, "declared smallest |element|");
    app->add_option("--band-hi", band_hi, "declared largest |element|");
    app->add_flag("--no-batch", no_batch, "one CS request per multiplication");
    app->add_option("--split-mode", split_mode, "sign-consistent | range-expanded")
        ->check(CLI::IsMember({"sign-consistent", "range-expanded"}));
    app->add_option("--transport", transport, "mem | tcp")
        ->check(CLI::IsMember({"mem", "tcp"}));
    app->add_option("--latency-ms", latency_ms, "injected per-message delay");
    app->add_option("--seed", seed, "master seed");
  }

  s2p::ProtocolConfig config() const {
    s2p::ProtocolConfig cfg;
    cfg.rho = rho;
    cfg.verify_rounds = l;
    cfg.theta = theta;
    cfg.mask_policy = mask_policy == "below-data" ? s2p::MaskPolicy::BelowData
                                                  : s2p::MaskPolicy::ThetaExpanded;
    cfg.input_band = s2p::MagnitudeBand(band_lo, band_hi);
    cfg.batch_triples = !no_batch;
    cfg.split_mode = split_mode == "sign-consistent" ? s2p::SplitMode::SignConsistent
                                                     : s2p::SplitMode::RangeExpanded;
    return cfg;
  }

  s2p::RunOptions run_options() const {
    s2p::RunOptions opts;
    opts.cfg = config();
    opts.transport = transport == "mem" ? s2p::Transport::Mem : s2p::Transport::Tcp;
    opts.latency_ms = latency_ms;
    opts.seed = seed;
    return opts;
  }
};

s2p::Dataset slice_rows(const s2p::Dataset& ds, std::size_t begin, std::size_t count) {
  s2p::Dataset out;
  out.feature_names = ds.feature_names;
  out.X = s2p::Matrix(count, ds.X.cols());
  out.y.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < ds.X.cols(); ++j) out.X(i, j) = ds.X(begin + i, j);
    out.y[i] = ds.y[begin + i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secure 2-party computation toolkit"};
  app.require_subcommand(1);

  // --- precision -----------------------------------------------------------
  auto* precision = app.add_subcommand("precision", "protocol precision sweep vs plaintext");
  ProtoFlags pf_precision;
  std::string prec_protocol = "s2php", prec_out;
  int prec_x = 4;
  std::size_t prec_n = 500, prec_trials = 100;
  int prec_threads = 1;
  precision->add_option("--protocol", prec_protocol, "s2php|s2patp|s2pr|s2ps")
      ->check(CLI::IsMember({"s2php", "s2patp", "s2pr", "s2ps"}));
  precision->add_option("--range", prec_x, "delta exponent bound x (delta in [-x, x])");
  precision->add_option("--n", prec_n, "vector length");
  precision->add_option("--trials", prec_trials, "number of trials");
  precision->add_option("--threads", prec_threads, "worker threads");
  precision->add_option("--seed", pf_precision.seed, "master seed");
  precision->add_option("--out", prec_out, "output JSON path (- for stdout)");

  // --- security-theta ------------------------------------------------------
  auto* theta_cmd = app.add_subcommand("security-theta", "masking-range security law");
  double theta_value = 1e4;
  std::size_t theta_trials = 100000;
  uint64_t theta_seed = 1;
  std::string theta_out;
  theta_cmd->add_option("--theta", theta_value, "expansion factor (>= 1)");
  theta_cmd->add_option("--trials", theta_trials, "Monte Carlo trials");
  theta_cmd->add_option("--seed", theta_seed, "seed");
  theta_cmd->add_option("--out", theta_out, "output JSON path");

  // --- digit-loss ----------------------------------------------------------
  auto* digit_cmd = app.add_subcommand("digit-loss", "leading-digit cancellation law");
  std::size_t digit_n = 500, digit_trials = 20000;
  int digit_d = 3;
  uint64_t digit_seed = 1;
  std::string digit_out;
  digit_cmd->add_option("--n", digit_n, "vector length");
  digit_cmd->add_option("--d", digit_d, "digits lost");
  digit_cmd->add_option("--trials", digit_trials, "Monte Carlo trials");
  digit_cmd->add_option("--seed", digit_seed, "seed");
  digit_cmd->add_option("--out", digit_out, "output JSON path");

  // --- verify-fail ---------------------------------------------------------
  auto* vf_cmd = app.add_subcommand("verify-fail", "verification miss-rate Monte Carlo");
  int vf_l = 4;
  double vf_tamper = 1.0;
  std::size_t vf_trials = 10000;
  uint64_t vf_seed = 1;
  std::string vf_out;
  vf_cmd->add_option("--l", vf_l, "verification rounds");
  vf_cmd->add_option("--tamper", vf_tamper, "injected single-entry magnitude");
  vf_cmd->add_option("--trials", vf_trials, "trials");
  vf_cmd->add_option("--seed", vf_seed, "seed");
  vf_cmd->add_option("--out", vf_out, "output JSON path");

  // --- verify-proportion ---------------------------------------------------
  auto* vp_cmd = app.add_subcommand("verify-proportion", "verification share of runtime");
  std::string vp_protocol = "s2ps", vp_out;
  std::vector<std::size_t> vp_dims = {50, 100, 200};
  std::vector<int> vp_ls = {0, 5, 10, 20};
  std::size_t vp_reps = 3;
  uint64_t vp_seed = 1;
  vp_cmd->add_option("--protocol", vp_protocol, "s2ps | s2phm")
      ->check(CLI::IsMember({"s2ps", "s2phm"}));
  vp_cmd->add_option("--dims", vp_dims, "dimensions to probe");
  vp_cmd->add_option("--l-values", vp_ls, "verification round counts");
  vp_cmd->add_option("--reps", vp_reps, "repetitions per cell");
  vp_cmd->add_option("--seed", vp_seed, "seed");
  vp_cmd->add_option("--out", vp_out, "output JSON path");

  // --- bench-lr ------------------------------------------------------------
  auto* bench = app.add_subcommand("bench-lr", "secure vs plaintext logistic regression");
  ProtoFlags pf_bench;
  pf_bench.band_lo = 0x1.0p-20;
  pf_bench.band_hi = 16.0;
  pf_bench.attach(bench);
  std::string bench_data, bench_out, bench_id = "dataset";
  std::size_t bench_train_rows = 0, bench_split = SIZE_MAX;
  double bench_eta = 0.05, bench_threshold = 0.5;
  std::size_t bench_batch = 32, bench_iters = 5;
  bool bench_no_scale = false;
  bench->add_option("--data", bench_data, "dataset CSV (header, final column `label`)")
      ->required();
  bench->add_option("--train-rows", bench_train_rows, "rows used for training (default 80%)");
  bench->add_option("--split-col", bench_split, "vertical split column (default d/2)");
  bench->add_option("--eta", bench_eta, "learning rate");
  bench->add_option("--batch", bench_batch, "batch size");
  bench->add_option("--iters", bench_iters, "training iterations");
  bench->add_option("--threshold", bench_threshold, "classification threshold");
  bench->add_flag("--no-scale", bench_no_scale, "skip min-max feature scaling");
  bench->add_option("--id", bench_id, "dataset id echoed into the report");
  bench->add_option("--out", bench_out, "output JSON path");

  // --- train ---------------------------------------------------------------
  auto* train = app.add_subcommand("train", "secure 2-party training; exports model shares");
  ProtoFlags pf_train;
  pf_train.band_lo = 0x1.0p-20;
  pf_train.band_hi = 16.0;
  pf_train.attach(train);
  std::string train_data, train_out = "model.json";
  std::size_t train_split = SIZE_MAX, train_batch = 32, train_iters = 5;
  double train_eta = 0.05;
  bool train_no_scale = false;
  train->add_option("--data", train_data, "training CSV")->required();
  train->add_option("--split-col", train_split, "vertical split column (default d/2)");
  train->add_option("--eta", train_eta, "learning rate");
  train->add_option("--batch", train_batch, "batch size");
  train->add_option("--iters", train_iters, "iterations");
  train->add_flag("--no-scale", train_no_scale, "skip min-max feature scaling");
  train->add_option("--out", train_out, "model JSON path");

  // --- predict -------------------------------------------------------------
  auto* predict = app.add_subcommand("predict", "secure prediction with exported model shares");
  ProtoFlags pf_predict;
  pf_predict.band_lo = 0x1.0p-20;
  pf_predict.band_hi = 16.0;
  pf_predict.attach(predict);
  std::string predict_data, predict_model = "model.json", predict_out;
  double predict_threshold = 0.5;
  predict->add_option("--data", predict_data, "CSV to score")->required();
  predict->add_option("--model", predict_model, "model JSON from `train`");
  predict->add_option("--threshold", predict_threshold, "classification threshold");
  predict->add_option("--out", predict_out, "output JSON path");

  // --- make-dataset --------------------------------------------------------
  auto* mk = app.add_subcommand("make-dataset", "synthesize a logistic dataset CSV");
  std::size_t mk_rows = 900, mk_features = 7;
  uint64_t mk_seed = 7;
  double mk_sharpness = 4.0, mk_margin = 0.0;
  std::string mk_out = "dataset.csv";
  mk->add_option("--rows", mk_rows, "rows");
  mk->add_option("--features", mk_features, "feature count");
  mk->add_option("--seed", mk_seed, "seed");
  mk->add_option("--sharpness", mk_sharpness, "label sharpness (higher = more separable)");
  mk->add_option("--margin", mk_margin, "hidden-logit margin filter");
  mk->add_option("--out", mk_out, "CSV path");

  // --- node ----------------------------------------------------------------
  auto* node = app.add_subcommand("node", "run one node of the 4-node runtime");
  ProtoFlags pf_node;
  std::string node_role, node_bind = "127.0.0.1:0", node_peer, node_cs, node_alice, node_bob;
  std::string node_session = "1", node_input, node_protocol = "s2php";
  std::size_t node_len = 8;
  int node_serve = 2;
  node->add_option("--role", node_role, "cs | alice | bob | client")
      ->required()
      ->check(CLI::IsMember({"cs", "alice", "bob", "client"}));
  node->add_option("--bind", node_bind, "listen address host:port");
  node->add_option("--peer", node_peer, "bob: alice address");
  node->add_option("--cs", node_cs, "parties: cs address");
  node->add_option("--alice", node_alice, "client: alice address");
  node->add_option("--bob", node_bob, "client: bob address");
  node->add_option("--session", node_session, "session id (hex, up to 32 digits)");
  node->add_option("--input", node_input, "party input vector file (one value per line)");
  node->add_option("--protocol", node_protocol, "client job protocol")
      ->check(CLI::IsMember({"s2php", "s2patp", "s2pr", "s2ps"}));
  node->add_option("--len", node_len, "client job vector length");
  node->add_option("--serve-count", node_serve, "cs: connections before exit");
  pf_node.attach(node);

  CLI11_PARSE(app, argc, argv);

  try {
    if (precision->parsed()) {
      auto rep = s2p::precision_experiment(s2p::protocol_from_name(prec_protocol), prec_x,
                                           prec_n, prec_trials, pf_precision.seed, prec_threads);
      write_out(s2p::render_json(rep), prec_out);
      if (!csv_sibling(prec_out).empty()) write_out(s2p::render_csv(rep), csv_sibling(prec_out));
    } else if (theta_cmd->parsed()) {
      write_out(s2p::render_json(s2p::security_theta_probability(theta_value, theta_trials,
                                                                 theta_seed)),
                theta_out);
    } else if (digit_cmd->parsed()) {
      write_out(
          s2p::render_json(s2p::digit_loss_probability(digit_n, digit_d, digit_trials, digit_seed)),
          digit_out);
    } else if (vf_cmd->parsed()) {
      write_out(s2p::render_json(
                    s2p::verification_failure_experiment(vf_l, vf_tamper, vf_trials, vf_seed)),
                vf_out);
    } else if (vp_cmd->parsed()) {
      auto rows = s2p::verification_proportion(vp_protocol, vp_dims, vp_ls, vp_reps, vp_seed);
      write_out(s2p::render_json(rows), vp_out);
      if (!csv_sibling(vp_out).empty()) write_out(s2p::render_csv(rows), csv_sibling(vp_out));
    } else if (bench->parsed()) {
      s2p::Dataset ds = s2p::load_csv(bench_data);
      std::size_t train_rows =
          bench_train_rows > 0 ? bench_train_rows : ds.X.rows() - ds.X.rows() / 5;
      s2p::require(train_rows >= 1 && train_rows < ds.X.rows(),
                   "bench-lr: train rows must leave a test split");
      std::size_t split = bench_split == SIZE_MAX ? (ds.X.cols() + 1) / 2 : bench_split;
      s2p::TrainConfig tc;
      tc.eta = bench_eta;
      tc.batch_size = bench_batch;
      tc.iterations = bench_iters;
      auto result = s2p::run_lr_benchmark(slice_rows(ds, 0, train_rows),
                                          slice_rows(ds, train_rows, ds.X.rows() - train_rows),
                                          split, tc, pf_bench.run_options(), bench_threshold,
                                          !bench_no_scale, bench_id);
      write_out(s2p::render_json(result), bench_out);
    } else if (train->parsed()) {
      s2p::Dataset ds = s2p::load_csv(train_data);
      if (!train_no_scale) s2p::min_max_scale(ds.X);
      std::size_t split = train_split == SIZE_MAX ? (ds.X.cols() + 1) / 2 : train_split;
      auto [Xa, Xb] = s2p::vertical_partition(ds.X, split);
      s2p::TrainConfig tc;
      tc.eta = train_eta;
      tc.batch_size = train_batch;
      tc.iterations = train_iters;
      auto result = s2p::run_s2plort(Xa, Xb, ds.y, tc, pf_train.run_options());
      ordered_json model{{"schema", "s2p-model/1"},
                         {"w_a", result.model.w_a},
                         {"w_b", result.model.w_b},
                         {"w", s2p::reconstruct_sum(result.model.w_a, result.model.w_b)},
                         {"config", ordered_json{{"eta", tc.eta},
                                                 {"batch_size", tc.batch_size},
                                                 {"iterations", tc.iterations},
                                                 {"split_col", split},
                                                 {"scaled", !train_no_scale},
                                                 {"rho", pf_train.rho},
                                                 {"l", pf_train.l},
                                                 {"seed", pf_train.seed}}},
                         {"rounds", result.stats.rounds},
                         {"payload_bits", result.stats.payload_bits}};
      write_out(model.dump(2), train_out);
    } else if (predict->parsed()) {
      s2p::Dataset ds = s2p::load_csv(predict_data);
      std::ifstream min(predict_model);
      if (!min) throw std::runtime_error("cannot open model: " + predict_model);
      nlohmann::json mj = nlohmann::json::parse(min);
      s2p::ModelShares model{mj.at("w_a").get<Vector>(), mj.at("w_b").get<Vector>()};
      bool scaled = mj.at("config").at("scaled").get<bool>();
      if (scaled) s2p::min_max_scale(ds.X);
      std::size_t split = mj.at("config").at("split_col").get<std::size_t>();
      auto [Xa, Xb] = s2p::vertical_partition(ds.X, split);
      s2p::TrainConfig tc;
      auto result = s2p::run_s2plorp(Xa, Xb, model, tc, pf_predict.run_options());
      Vector scores = s2p::reconstruct_sum(result.v_a, result.v_b);
      ordered_json out{{"schema", "s2p-report/1"},
                       {"report", "predict"},
                       {"scores", scores},
                       {"rounds", result.stats.rounds},
                       {"payload_bits", result.stats.payload_bits}};
      bool have_labels = !ds.y.empty();
      if (have_labels) {
        auto m = s2p::evaluate(ds.y, scores, predict_threshold);
        out["metrics"] = nlohmann::json::parse(
            ordered_json{{"accuracy", m.accuracy},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"auc", m.auc}}
                .dump());
      }
      write_out(out.dump(2), predict_out);
    } else if (mk->parsed()) {
      s2p::Dataset ds = s2p::synth_logistic(mk_rows, mk_features, mk_seed, mk_sharpness, mk_margin);
      s2p::save_csv(ds, mk_out);
      std::cerr << "wrote " << mk_out << " (" << mk_rows << "x" << mk_features << ")\n";
    } else if (node->parsed()) {
      s2p::NodeConfig nc;
      nc.role = node_role == "cs"      ? s2p::Role::Cs
                : node_role == "alice" ? s2p::Role::Alice
                : node_role == "bob"   ? s2p::Role::Bob
                                       : s2p::Role::Client;
      auto [bh, bp] = [&]() -> std::pair<std::string, int> {
        auto pos = node_bind.rfind(':');
        return {node_bind.substr(0, pos), std::stoi(node_bind.substr(pos + 1))};
      }();
      nc.bind_host = bh;
      nc.bind_port = bp;
      nc.peer_addr = node_peer;
      nc.cs_addr = node_cs;
      nc.alice_addr = node_alice;
      nc.bob_addr = node_bob;
      nc.session = s2p::parse_session_id(node_session);
      nc.latency_ms = pf_node.latency_ms;
      nc.seed = pf_node.seed;
      nc.input_csv = node_input;
      nc.protocol = node_protocol;
      nc.n = node_len;
      nc.cfg = pf_node.config();
      nc.serve_count = node_serve;
      return s2p::run_node(nc);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
