#include "s2p/triples.hpp"

#include <chrono>
#include <cstring>

namespace s2p {

namespace {

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<uint8_t>(v >> (8 * b)));
}
void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<uint8_t>(v >> (8 * b)));
}
void put_f64(std::vector<uint8_t>& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}
uint32_t get_u32(const uint8_t* p) {
  uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<uint32_t>(p[b]) << (8 * b);
  return v;
}
uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<uint64_t>(p[b]) << (8 * b);
  return v;
}
double get_f64(const uint8_t* p) {
  uint64_t bits = get_u64(p);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

std::pair<MaskTriple, MaskTriple> cs_preprocess(const TripleSpec& spec, SeededRng& rng) {
  require(spec.s >= 2, "cs_preprocess: shared dimension s >= 2 (s = 1 leaks the masked operand)");
  require(spec.n >= 1 && spec.m >= 1, "cs_preprocess: empty shape");

  // rank(R) < s always; when a side is shorter than s its natural rank
  // bound min(dim, s) - adjusted construction already satisfies that.
  std::size_t ka = std::min<std::size_t>(spec.n, spec.s - 1);
  std::size_t kb = std::min<std::size_t>(spec.m, spec.s - 1);
  Matrix Ra = low_rank_uniform(spec.n, spec.s, ka, spec.mask_scale_left, rng);
  Matrix Rb = low_rank_uniform(spec.s, spec.m, kb, spec.mask_scale_right, rng);
  Matrix St = mul(Ra, Rb);

  double c = max_abs(St);
  Matrix ra(spec.n, spec.m);
  for (double& x : ra.elems()) x = rng.uniform(-c, c);
  Matrix rb = sub(St, ra);

  return {MaskTriple{std::move(Ra), std::move(ra), St},
          MaskTriple{std::move(Rb), std::move(rb), St}};
}

std::pair<MaskTriple, MaskTriple> cs_preprocess(std::size_t n, std::size_t s, std::size_t m,
                                                MagnitudeBand data_range, double theta,
                                                SeededRng& rng) {
  require(theta >= 1.0, "cs_preprocess: theta >= 1");
  TripleSpec spec{static_cast<uint32_t>(n), static_cast<uint32_t>(s), static_cast<uint32_t>(m),
                  theta * data_range.hi, theta * data_range.hi};
  return cs_preprocess(spec, rng);
}

std::vector<uint8_t> encode_triple_request(uint64_t invocation, Role side,
                                           const std::vector<TripleSpec>& specs) {
  std::vector<uint8_t> out;
  put_u64(out, invocation);
  out.push_back(static_cast<uint8_t>(side));
  put_u32(out, static_cast<uint32_t>(specs.size()));
  for (const TripleSpec& s : specs) {
    put_u32(out, s.n);
    put_u32(out, s.s);
    put_u32(out, s.m);
    put_f64(out, s.mask_scale_left);
    put_f64(out, s.mask_scale_right);
  }
  return out;
}

TripleRequest decode_triple_request(const std::vector<uint8_t>& p) {
  if (p.size() < 13) throw TransportError("triple request: truncated");
  TripleRequest req;
  req.invocation = get_u64(p.data());
  req.side = static_cast<Role>(p[8]);
  uint32_t count = get_u32(p.data() + 9);
  std::size_t off = 13;
  if (p.size() != off + static_cast<std::size_t>(count) * 28)
    throw TransportError("triple request: bad length");
  for (uint32_t i = 0; i < count; ++i) {
    TripleSpec s;
    s.n = get_u32(p.data() + off);
    s.s = get_u32(p.data() + off + 4);
    s.m = get_u32(p.data() + off + 8);
    s.mask_scale_left = get_f64(p.data() + off + 12);
    s.mask_scale_right = get_f64(p.data() + off + 20);
    req.specs.push_back(s);
    off += 28;
  }
  return req;
}

std::vector<MaskTriple> CsServer::halves_for(SessionId session, const TripleRequest& req) {
  require(req.side == Role::Alice || req.side == Role::Bob, "triple request: bad side");
  double t0 = now_s();
  std::lock_guard<std::mutex> lk(mu_);
  auto key = std::make_pair(std::make_pair(session.hi, session.lo), req.invocation);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    // Generation is keyed on (session, invocation) content, not arrival
    // order, so either party may ask first.
    Pending p;
    p.specs = req.specs;
    SeededRng rng(SeededRng::mix(SeededRng::mix(seed_, session.hi),
                                 SeededRng::mix(session.lo, req.invocation)));
    for (const TripleSpec& s : req.specs) {
      auto [a, b] = cs_preprocess(s, rng);
      p.alice.push_back(std::move(a));
      p.bob.push_back(std::move(b));
    }
    it = cache_.emplace(key, std::move(p)).first;
  } else if (!(it->second.specs == req.specs)) {
    throw ProtocolError("cs: parties disagree on triple specs for invocation " +
                        std::to_string(req.invocation));
  }
  std::vector<MaskTriple> out = req.side == Role::Alice ? it->second.alice : it->second.bob;
  if (++it->second.served == 2) cache_.erase(it);
  offline_s_ += now_s() - t0;
  return out;
}

void CsServer::serve(Channel& ch, SessionId session) {
  for (;;) {
    Frame f;
    try {
      f = ch.recv();
    } catch (const TransportError&) {
      return;  // peer closed; CS exits after preprocessing
    }
    if (f.tag != tag::kTripleRequest) {
      Frame err;
      err.tag = tag::kError;
      const char* msg = "cs accepts only preprocessing requests";
      err.payload.assign(msg, msg + std::strlen(msg));
      ch.send(err);
      throw ProtocolError(std::string("cs: refused frame ") + tag_name(f.tag));
    }
    TripleRequest req = decode_triple_request(f.payload);
    std::vector<MaskTriple> halves = halves_for(session, req);
    std::vector<Matrix> ms;
    ms.reserve(halves.size() * 3);
    for (MaskTriple& t : halves) {
      ms.push_back(std::move(t.R));
      ms.push_back(std::move(t.r));
      ms.push_back(std::move(t.St));
    }
    ch.send_matrices(tag::kTripleBundle, ms);
  }
}

void TripleClient::begin_invocation(uint64_t invocation, std::vector<TripleSpec> specs) {
  require(exhausted(), "triple client: previous invocation not fully consumed");
  invocation_ = invocation;
  specs_ = std::move(specs);
  fetched_.clear();
  next_ = 0;
  if (batching_ && !specs_.empty()) {
    Frame f;
    f.tag = tag::kTripleRequest;
    f.payload = encode_triple_request(invocation_, side_, specs_);
    cs_->send(f);
    std::vector<Matrix> ms = cs_->expect_matrices(tag::kTripleBundle);
    require(ms.size() == specs_.size() * 3, "triple client: short bundle");
    for (std::size_t i = 0; i < specs_.size(); ++i)
      fetched_.push_back(MaskTriple{std::move(ms[3 * i]), std::move(ms[3 * i + 1]),
                                    std::move(ms[3 * i + 2])});
  }
}

MaskTriple TripleClient::take() {
  require(next_ < specs_.size(), "triple client: plan exhausted");
  if (batching_) return std::move(fetched_[next_++]);
  // One request per multiplication; sub-id keeps the pair generation keyed.
  uint64_t sub = (invocation_ << 16) | next_;
  Frame f;
  f.tag = tag::kTripleRequest;
  f.payload = encode_triple_request(sub, side_, {specs_[next_]});
  cs_->send(f);
  std::vector<Matrix> ms = cs_->expect_matrices(tag::kTripleBundle);
  require(ms.size() == 3, "triple client: short bundle");
  ++next_;
  return MaskTriple{std::move(ms[0]), std::move(ms[1]), std::move(ms[2])};
}

}  // namespace s2p
