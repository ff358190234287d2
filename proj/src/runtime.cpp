#include "s2p/runtime.hpp"

#include <thread>

namespace s2p {

namespace {

SessionId session_from_seed(uint64_t seed) {
  return SessionId{SeededRng::mix(seed, 0x5e55u), SeededRng::mix(seed, 0x1d) | 1};
}

struct Endpoints {
  std::unique_ptr<Channel> alice_peer, alice_cs;
  std::unique_ptr<Channel> bob_peer, bob_cs;
  std::unique_ptr<Channel> cs_alice, cs_bob;
};

Endpoints make_mem_endpoints(const RunOptions& opts) {
  Endpoints e;
  auto [a_side, b_side] = make_mem_pair(opts.latency_ms, opts.timeout_s);
  auto [a2cs, cs2a] = make_mem_pair(opts.latency_ms, opts.timeout_s);
  auto [b2cs, cs2b] = make_mem_pair(opts.latency_ms, opts.timeout_s);
  e.alice_peer = std::make_unique<Channel>(std::move(a_side), "alice/peer");
  e.bob_peer = std::make_unique<Channel>(std::move(b_side), "bob/peer");
  e.alice_cs = std::make_unique<Channel>(std::move(a2cs), "alice/cs");
  e.cs_alice = std::make_unique<Channel>(std::move(cs2a), "cs/alice");
  e.bob_cs = std::make_unique<Channel>(std::move(b2cs), "bob/cs");
  e.cs_bob = std::make_unique<Channel>(std::move(cs2b), "cs/bob");
  return e;
}

// TCP loopback topology: CS and Alice listen, Bob dials Alice, both
// parties dial CS. Accept order at the CS is disambiguated by handshake.
Endpoints make_tcp_endpoints(const RunOptions& opts) {
  Endpoints e;
  TcpListener cs_listener(0);
  TcpListener alice_listener(0);
  int cs_port = cs_listener.port();
  int alice_port = alice_listener.port();

  std::exception_ptr err;
  std::thread dialer([&] {
    try {
      auto bob_peer = TcpLink::connect("127.0.0.1", alice_port, opts.latency_ms, opts.timeout_s);
      auto alice_cs = TcpLink::connect("127.0.0.1", cs_port, opts.latency_ms, opts.timeout_s);
      auto bob_cs = TcpLink::connect("127.0.0.1", cs_port, opts.latency_ms, opts.timeout_s);
      e.bob_peer = std::make_unique<Channel>(std::move(bob_peer), "bob/peer");
      e.alice_cs = std::make_unique<Channel>(std::move(alice_cs), "alice/cs");
      e.bob_cs = std::make_unique<Channel>(std::move(bob_cs), "bob/cs");
    } catch (...) {
      err = std::current_exception();
    }
  });
  e.alice_peer =
      std::make_unique<Channel>(alice_listener.accept(opts.latency_ms, opts.timeout_s), "alice/peer");
  e.cs_alice = std::make_unique<Channel>(cs_listener.accept(opts.latency_ms, opts.timeout_s), "cs/alice");
  e.cs_bob = std::make_unique<Channel>(cs_listener.accept(opts.latency_ms, opts.timeout_s), "cs/bob");
  dialer.join();
  if (err) std::rethrow_exception(err);
  return e;
}

// Party ends dial in (send hello, await reply); alice's peer end and the
// CS ends accept. The two CS connections are classified by the peer role
// in their hello and relabeled if they arrived swapped.
void do_handshakes(Endpoints& e, SessionId session) {
  std::exception_ptr errs[3];
  auto guarded = [](std::exception_ptr& slot, auto fn) {
    return [&slot, fn] {
      try {
        fn();
      } catch (...) {
        slot = std::current_exception();
      }
    };
  };
  std::thread d1(guarded(errs[0], [&] { e.bob_peer->handshake(Role::Bob, Role::Alice, session); }));
  std::thread d2(guarded(errs[1], [&] { e.alice_cs->handshake(Role::Alice, Role::Cs, session); }));
  std::thread d3(guarded(errs[2], [&] { e.bob_cs->handshake(Role::Bob, Role::Cs, session); }));
  Role peer = e.alice_peer->accept_handshake(Role::Alice, session);
  if (peer != Role::Bob) throw TransportError("alice: expected bob on peer link");
  Role r1 = e.cs_alice->accept_handshake(Role::Cs, session);
  Role r2 = e.cs_bob->accept_handshake(Role::Cs, session);
  d1.join();
  d2.join();
  d3.join();
  for (auto& err : errs)
    if (err) std::rethrow_exception(err);
  if (r1 == Role::Bob && r2 == Role::Alice) {
    std::swap(e.cs_alice, e.cs_bob);
    e.cs_alice->transcript().name = "cs/alice";
    e.cs_bob->transcript().name = "cs/bob";
  } else if (!(r1 == Role::Alice && r2 == Role::Bob)) {
    throw TransportError("cs: unexpected peer roles");
  }
}

}  // namespace

uint64_t SessionStats::digest() const {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const Transcript& t : transcripts) t.fold_digest(h);
  return h;
}

bool SessionStats::cs_clean() const {
  for (const Transcript& t : transcripts) {
    if (t.name.rfind("cs/", 0) != 0) continue;
    for (const TranscriptEntry& e : t.entries)
      if (e.tag != tag::kTripleRequest && e.tag != tag::kTripleBundle &&
          e.tag != tag::kHandshake)
        return false;
  }
  return true;
}

const Transcript& SessionStats::by_name(const std::string& name) const {
  for (const Transcript& t : transcripts)
    if (t.name == name) return t;
  throw std::out_of_range("no transcript named " + name);
}

SessionStats run_session(const RunOptions& opts, PartyBody alice_body, PartyBody bob_body) {
  SessionId session = session_from_seed(opts.seed);
  Endpoints e =
      opts.transport == Transport::Mem ? make_mem_endpoints(opts) : make_tcp_endpoints(opts);
  do_handshakes(e, session);

  CsServer cs(SeededRng::mix(opts.seed, 0xc5));
  SeededRng root(opts.seed);

  PartyCtx alice(Role::Alice, opts.cfg, root.fork(0xA11CE));
  PartyCtx bob(Role::Bob, opts.cfg, root.fork(0xB0B));
  alice.peer = e.alice_peer.get();
  bob.peer = e.bob_peer.get();
  TripleClient alice_triples(e.alice_cs.get(), Role::Alice, opts.cfg.batch_triples);
  TripleClient bob_triples(e.bob_cs.get(), Role::Bob, opts.cfg.batch_triples);
  alice.triples = &alice_triples;
  bob.triples = &bob_triples;
  bob.tamper_vf_right = opts.tamper_vf_right;

  std::exception_ptr alice_err, bob_err, cs_a_err, cs_b_err;
  std::thread cs_a([&] {
    try {
      cs.serve(*e.cs_alice, session);
    } catch (...) {
      cs_a_err = std::current_exception();
    }
  });
  std::thread cs_b([&] {
    try {
      cs.serve(*e.cs_bob, session);
    } catch (...) {
      cs_b_err = std::current_exception();
    }
  });
  std::thread ta([&] {
    try {
      alice_body(alice);
    } catch (...) {
      alice_err = std::current_exception();
    }
    e.alice_peer->close();
    e.alice_cs->close();
  });
  std::thread tb([&] {
    try {
      bob_body(bob);
    } catch (...) {
      bob_err = std::current_exception();
    }
    e.bob_peer->close();
    e.bob_cs->close();
  });
  ta.join();
  tb.join();
  cs_a.join();
  cs_b.join();

  if (alice_err) std::rethrow_exception(alice_err);
  if (bob_err) std::rethrow_exception(bob_err);
  if (cs_a_err) std::rethrow_exception(cs_a_err);
  if (cs_b_err) std::rethrow_exception(cs_b_err);

  SessionStats stats;
  stats.alice = alice.phases;
  stats.bob = bob.phases;
  stats.alice_comm_s = e.alice_peer->io_seconds() + e.alice_cs->io_seconds();
  stats.bob_comm_s = e.bob_peer->io_seconds() + e.bob_cs->io_seconds();
  stats.cs_offline_s = cs.offline_seconds();
  for (Channel* ch : {e.alice_peer.get(), e.alice_cs.get(), e.bob_peer.get(), e.bob_cs.get(),
                      e.cs_alice.get(), e.cs_bob.get()}) {
    stats.rounds += ch->transcript().sent_rounds();
    stats.payload_bits += ch->transcript().sent_payload_bits();
    stats.transcripts.push_back(ch->transcript());
  }
  return stats;
}

Vector reconstruct_sum(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "reconstruct: length mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

namespace {

VecPairResult run_vec(const RunOptions& opts, const Vector& a, const Vector& b,
                      Vector (*alice_fn)(PartyCtx&, const Vector&, const VectorBands&),
                      Vector (*bob_fn)(PartyCtx&, const Vector&, const VectorBands&)) {
  require(a.size() == b.size(), "vector protocol: length mismatch");
  VecPairResult out;
  VectorBands bands = bands_from_config(opts.cfg);
  out.stats = run_session(
      opts, [&](PartyCtx& ctx) { out.v_a = alice_fn(ctx, a, bands); },
      [&](PartyCtx& ctx) { out.v_b = bob_fn(ctx, b, bands); });
  return out;
}

}  // namespace

VecPairResult run_s2php(const Vector& a, const Vector& b, const RunOptions& opts) {
  return run_vec(opts, a, b, s2php_alice, s2php_bob);
}
VecPairResult run_s2patp(const Vector& a, const Vector& b, const RunOptions& opts) {
  return run_vec(opts, a, b, s2patp_alice, s2patp_bob);
}
VecPairResult run_s2pr(const Vector& a, const Vector& b, const RunOptions& opts) {
  return run_vec(opts, a, b, s2pr_alice, s2pr_bob);
}
VecPairResult run_s2ps(const Vector& a, const Vector& b, const RunOptions& opts) {
  return run_vec(opts, a, b, s2ps_alice, s2ps_bob);
}

MatPairResult run_s2pm(const Matrix& A, const Matrix& B, const RunOptions& opts) {
  require(A.cols() == B.rows(), "run_s2pm: inner dimension mismatch");
  MatPairResult out;
  const ProtocolConfig& cfg = opts.cfg;
  TripleSpec spec = s2pm_spec(cfg, A.rows(), A.cols(), B.cols(), cfg.input_band, cfg.input_band);
  double share_scale = share_scale_for(
      cfg, product_band(product_band(cfg.input_band, cfg.input_band),
                        MagnitudeBand(1.0, static_cast<double>(A.cols()))));
  out.stats = run_session(
      opts,
      [&](PartyCtx& ctx) {
        ctx.plan_invocation({spec});
        out.V_a = s2pm_left(ctx, A, ctx.fetch_triple());
      },
      [&](PartyCtx& ctx) {
        ctx.plan_invocation({spec});
        out.V_b = s2pm_right(ctx, B, ctx.fetch_triple(), share_scale);
      });
  return out;
}

MatPairResult run_s2phm(const Matrix& A1, const Matrix& A2, const Matrix& B1, const Matrix& B2,
                        const RunOptions& opts) {
  require(A1.same_shape(B1) && A2.same_shape(B2) && A1.cols() == A2.rows(),
          "run_s2phm: shape mismatch");
  MatPairResult out;
  const ProtocolConfig& cfg = opts.cfg;
  auto plan = plan_s2phm(cfg, A1.rows(), A1.cols(), A2.cols(), cfg.input_band, cfg.input_band);
  out.stats = run_session(
      opts,
      [&](PartyCtx& ctx) {
        ctx.plan_invocation(plan);
        out.V_a = s2phm_alice(ctx, A1, A2, cfg.input_band, cfg.input_band);
      },
      [&](PartyCtx& ctx) {
        ctx.plan_invocation(plan);
        out.V_b = s2phm_bob(ctx, B1, B2, cfg.input_band, cfg.input_band);
      });
  return out;
}

}  // namespace s2p
