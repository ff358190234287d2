#include "s2p/node.hpp"

#include <fstream>
#include <iostream>
#include <thread>

#include "json.hpp"
#include "s2p/metrics.hpp"

namespace s2p {

namespace {

using ordered_json = nlohmann::ordered_json;

std::pair<std::string, int> split_addr(const std::string& addr) {
  auto pos = addr.rfind(':');
  require(pos != std::string::npos, "address must be host:port, got " + addr);
  return {addr.substr(0, pos), std::stoi(addr.substr(pos + 1))};
}

Vector load_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  Vector v;
  double x;
  while (in >> x) v.push_back(x);
  require(!v.empty(), "vector file is empty: " + path);
  return v;
}

ordered_json config_json(const ProtocolConfig& cfg, const std::string& protocol, std::size_t n,
                         uint64_t seed) {
  return ordered_json{{"protocol", protocol},
                      {"n", n},
                      {"seed", seed},
                      {"rho", cfg.rho},
                      {"l", cfg.verify_rounds},
                      {"theta", cfg.theta},
                      {"mask_policy", cfg.mask_policy == MaskPolicy::BelowData ? "below-data"
                                                                               : "theta-expanded"},
                      {"band_lo", cfg.input_band.lo},
                      {"band_hi", cfg.input_band.hi},
                      {"batch_triples", cfg.batch_triples},
                      {"split_mode", cfg.split_mode == SplitMode::SignConsistent
                                         ? "sign-consistent"
                                         : "range-expanded"}};
}

struct Job {
  std::string protocol;
  std::size_t n;
  uint64_t seed;
  ProtocolConfig cfg;
};

Job job_from_json(const nlohmann::json& j) {
  Job job;
  job.protocol = j.at("protocol").get<std::string>();
  job.n = j.at("n").get<std::size_t>();
  job.seed = j.at("seed").get<uint64_t>();
  job.cfg.rho = j.at("rho").get<int>();
  job.cfg.verify_rounds = j.at("l").get<int>();
  job.cfg.theta = j.at("theta").get<double>();
  job.cfg.mask_policy = j.at("mask_policy").get<std::string>() == "below-data"
                            ? MaskPolicy::BelowData
                            : MaskPolicy::ThetaExpanded;
  job.cfg.input_band = MagnitudeBand(j.at("band_lo").get<double>(), j.at("band_hi").get<double>());
  job.cfg.batch_triples = j.at("batch_triples").get<bool>();
  job.cfg.split_mode = j.at("split_mode").get<std::string>() == "sign-consistent"
                           ? SplitMode::SignConsistent
                           : SplitMode::RangeExpanded;
  return job;
}

int run_cs_node(const NodeConfig& config) {
  TcpListener listener(config.bind_port);
  std::cerr << "cs: listening on " << config.bind_host << ":" << listener.port() << "\n";
  CsServer server(config.seed);
  std::vector<std::thread> workers;
  for (int i = 0; i < config.serve_count; ++i) {
    auto link = listener.accept(config.latency_ms, config.timeout_s);
    workers.emplace_back([link = std::move(link), &server]() mutable {
      Channel ch(std::move(link), "cs/peer");
      auto [role, session] = ch.accept_handshake_any(Role::Cs);
      if (role != Role::Alice && role != Role::Bob) {
        std::cerr << "cs: refusing non-party peer\n";
        return;
      }
      try {
        server.serve(ch, session);
      } catch (const std::exception& e) {
        std::cerr << "cs: session ended: " << e.what() << "\n";
      }
    });
  }
  for (auto& w : workers) w.join();
  std::cerr << "cs: preprocessing served, exiting\n";
  return 0;
}

Vector party_input(const NodeConfig& config, const Job& job, Role self) {
  if (!config.input_csv.empty()) {
    Vector v = load_vector_file(config.input_csv);
    require(v.size() == job.n, "input length does not match job n");
    return v;
  }
  SeededRng rng(SeededRng::mix(job.seed, self == Role::Alice ? 0xA : 0xB));
  Vector v(job.n);
  for (double& x : v) {
    double mag = rng.uniform(job.cfg.input_band.lo, std::max(job.cfg.input_band.lo, 1.0));
    x = rng.coin() ? mag : -mag;
  }
  return v;
}

Vector run_party_protocol(PartyCtx& ctx, const Job& job, const Vector& input, bool is_alice) {
  VectorBands bands = bands_from_config(ctx.cfg);
  if (job.protocol == "s2php") return is_alice ? s2php_alice(ctx, input, bands) : s2php_bob(ctx, input, bands);
  if (job.protocol == "s2patp")
    return is_alice ? s2patp_alice(ctx, input, bands) : s2patp_bob(ctx, input, bands);
  if (job.protocol == "s2pr") return is_alice ? s2pr_alice(ctx, input, bands) : s2pr_bob(ctx, input, bands);
  if (job.protocol == "s2ps") return is_alice ? s2ps_alice(ctx, input, bands) : s2ps_bob(ctx, input, bands);
  throw std::invalid_argument("node job: unknown protocol " + job.protocol);
}

int run_party_node(const NodeConfig& config) {
  const bool is_alice = config.role == Role::Alice;
  const Role self = config.role;

  TcpListener listener(config.bind_port);
  std::cerr << role_name(self) << ": listening on " << config.bind_host << ":" << listener.port()
            << "\n";

  std::unique_ptr<Channel> client, peer;
  int expected = is_alice ? 2 : 1;  // alice also accepts bob
  for (int i = 0; i < expected; ++i) {
    auto ch = std::make_unique<Channel>(listener.accept(config.latency_ms, config.timeout_s),
                                        "party/accept");
    auto [role, session] = ch->accept_handshake_any(self);
    require(session == config.session, "node: session mismatch on accepted link");
    if (role == Role::Client) {
      ch->transcript().name = std::string(role_name(self)) + "/client";
      client = std::move(ch);
    } else if (role == Role::Bob && is_alice) {
      ch->transcript().name = "alice/peer";
      peer = std::move(ch);
    } else {
      throw TransportError("node: unexpected peer role");
    }
  }
  require(client != nullptr, "node: no client connected");

  Frame jobf = client->expect(tag::kJob);
  Job job = job_from_json(nlohmann::json::parse(std::string(jobf.payload.begin(), jobf.payload.end())));

  if (!is_alice) {
    auto [host, port] = split_addr(config.peer_addr);
    peer = std::make_unique<Channel>(
        TcpLink::connect(host, port, config.latency_ms, config.timeout_s), "bob/peer");
    peer->handshake(Role::Bob, Role::Alice, config.session);
  }
  auto [cs_host, cs_port] = split_addr(config.cs_addr);
  Channel cs(TcpLink::connect(cs_host, cs_port, config.latency_ms, config.timeout_s),
             std::string(role_name(self)) + "/cs");
  cs.handshake(self, Role::Cs, config.session);

  PartyCtx ctx(self, job.cfg, SeededRng(SeededRng::mix(config.seed, job.seed)));
  TripleClient triples(&cs, self, job.cfg.batch_triples);
  ctx.peer = peer.get();
  ctx.triples = &triples;

  Vector input = party_input(config, job, self);
  Vector share;
  std::string error;
  try {
    share = run_party_protocol(ctx, job, input, is_alice);
  } catch (const std::exception& e) {
    error = e.what();
  }

  Frame result;
  result.tag = tag::kResult;
  ordered_json payload;
  if (error.empty()) {
    payload = ordered_json{{"status", "ok"},
                           {"rounds", ctx.peer->transcript().sent_rounds() +
                                          cs.transcript().sent_rounds()},
                           {"share", share}};
  } else {
    payload = ordered_json{{"status", "error"}, {"detail", error}};
  }
  std::string text = payload.dump();
  result.payload.assign(text.begin(), text.end());
  client->send(result);
  cs.close();
  peer->close();
  std::cerr << role_name(self) << ": done\n";
  return error.empty() ? 0 : 1;
}

int run_client_node(const NodeConfig& config) {
  auto [ah, ap] = split_addr(config.alice_addr);
  auto [bh, bp] = split_addr(config.bob_addr);
  Channel alice(TcpLink::connect(ah, ap, config.latency_ms, config.timeout_s), "client/alice");
  alice.handshake(Role::Client, Role::Alice, config.session);
  Channel bob(TcpLink::connect(bh, bp, config.latency_ms, config.timeout_s), "client/bob");
  bob.handshake(Role::Client, Role::Bob, config.session);

  ordered_json jobj = config_json(config.cfg, config.protocol, config.n, config.seed);
  Frame jobf;
  jobf.tag = tag::kJob;
  std::string text = jobj.dump();
  jobf.payload.assign(text.begin(), text.end());
  alice.send(jobf);
  bob.send(jobf);

  auto read_result = [](Channel& ch) {
    Frame f = ch.expect(tag::kResult);
    return nlohmann::json::parse(std::string(f.payload.begin(), f.payload.end()));
  };
  nlohmann::json ra = read_result(alice);
  nlohmann::json rb = read_result(bob);

  ordered_json out{{"schema", "s2p-report/1"}, {"report", "node-run"}, {"job", jobj}};
  bool ok = ra.at("status") == "ok" && rb.at("status") == "ok";
  out["status"] = ok ? "ok" : "error";
  if (ok) {
    Vector va = ra.at("share").get<Vector>();
    Vector vb = rb.at("share").get<Vector>();
    if (config.protocol == "s2patp") {
      Vector prod(va.size());
      for (std::size_t i = 0; i < va.size(); ++i) prod[i] = va[i] * vb[i];
      out["reconstructed"] = prod;
    } else {
      out["reconstructed"] = reconstruct_sum(va, vb);
    }
  } else {
    out["alice"] = ra;
    out["bob"] = rb;
  }
  std::cout << out.dump(2) << "\n";
  return ok ? 0 : 1;
}

}  // namespace

SessionId parse_session_id(const std::string& hex) {
  require(!hex.empty() && hex.size() <= 32, "session id: up to 32 hex digits");
  SessionId id;
  std::string padded = std::string(32 - hex.size(), '0') + hex;
  auto nibble = [](char c) -> uint64_t {
    if (c >= '0' && c <= '9') return static_cast<uint64_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<uint64_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<uint64_t>(c - 'A' + 10);
    throw std::invalid_argument("session id: bad hex digit");
  };
  for (int i = 0; i < 16; ++i) id.hi = id.hi << 4 | nibble(padded[i]);
  for (int i = 16; i < 32; ++i) id.lo = id.lo << 4 | nibble(padded[i]);
  return id;
}

int run_node(const NodeConfig& config) {
  switch (config.role) {
    case Role::Cs: return run_cs_node(config);
    case Role::Alice:
    case Role::Bob: return run_party_node(config);
    case Role::Client: return run_client_node(config);
  }
  return 2;
}

}  // namespace s2p
