#include "s2p/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <thread>

namespace s2p {

namespace {

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void sleep_ms(double ms) {
  if (ms > 0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

}  // namespace

bool tag_known(uint32_t t) {
  switch (t) {
    case tag::kHandshake:
    case tag::kMaskedLeft:
    case tag::kMaskedRight:
    case tag::kVfRightT:
    case tag::kVfLeft:
    case tag::kAtpT:
    case tag::kTripleBundle:
    case tag::kTripleRequest:
    case tag::kJob:
    case tag::kResult:
    case tag::kError:
      return true;
    default:
      return false;
  }
}

bool tag_accounted(uint32_t t) {
  return t >= tag::kMaskedLeft && t <= tag::kTripleBundle && t != tag::kTripleRequest;
}

const char* tag_name(uint32_t t) {
  switch (t) {
    case tag::kHandshake: return "handshake";
    case tag::kMaskedLeft: return "masked_left";
    case tag::kMaskedRight: return "masked_right";
    case tag::kVfRightT: return "vf_right_t";
    case tag::kVfLeft: return "vf_left";
    case tag::kAtpT: return "atp_t";
    case tag::kTripleBundle: return "triple_bundle";
    case tag::kTripleRequest: return "triple_request";
    case tag::kJob: return "job";
    case tag::kResult: return "result";
    case tag::kError: return "error";
    default: return "unknown";
  }
}

const char* role_name(Role r) {
  switch (r) {
    case Role::Client: return "client";
    case Role::Alice: return "alice";
    case Role::Bob: return "bob";
    case Role::Cs: return "cs";
  }
  return "?";
}

std::vector<uint8_t> frame_encode(uint32_t t, const std::vector<uint8_t>& payload) {
  std::vector<uint8_t> out;
  out.reserve(12 + payload.size());
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<uint8_t>(t >> (8 * b)));
  uint64_t len = payload.size();
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<uint8_t>(len >> (8 * b)));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Frame frame_decode(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 12) throw TransportError("frame_decode: truncated header");
  uint32_t t = 0;
  for (int b = 0; b < 4; ++b) t |= static_cast<uint32_t>(bytes[b]) << (8 * b);
  uint64_t len = 0;
  for (int b = 0; b < 8; ++b) len |= static_cast<uint64_t>(bytes[4 + b]) << (8 * b);
  if (!tag_known(t)) throw TransportError("frame_decode: unknown tag");
  if (bytes.size() < 12 + len) throw TransportError("frame_decode: truncated payload");
  Frame f;
  f.tag = t;
  f.payload.assign(bytes.begin() + 12, bytes.begin() + 12 + static_cast<std::ptrdiff_t>(len));
  return f;
}

uint64_t Transcript::sent_rounds() const {
  uint64_t n = 0;
  for (const auto& e : entries)
    if (e.sent && tag_accounted(e.tag)) ++n;
  return n;
}

uint64_t Transcript::sent_payload_bits() const {
  uint64_t n = 0;
  for (const auto& e : entries)
    if (e.sent && tag_accounted(e.tag)) n += e.data_bits;
  return n;
}

bool Transcript::has_tag(uint32_t t) const {
  for (const auto& e : entries)
    if (e.tag == t) return true;
  return false;
}

void Transcript::fold_digest(uint64_t& h) const {
  auto fold = [&h](uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& e : entries) {
    fold(e.sent ? 1 : 0);
    fold(e.tag);
    fold(e.payload_bytes);
    fold(e.data_bits);
  }
}

void MemLink::send(const Frame& f) {
  sleep_ms(latency_ms_);
  std::lock_guard<std::mutex> lk(out_->mu);
  if (out_->closed) throw TransportError("mem link: send on closed link");
  out_->q.push_back(f);
  out_->cv.notify_all();
}

Frame MemLink::recv() {
  std::unique_lock<std::mutex> lk(in_->mu);
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(timeout_s_));
  while (in_->q.empty()) {
    if (in_->closed) throw TransportError("mem link: peer closed");
    if (in_->cv.wait_until(lk, deadline) == std::cv_status::timeout && in_->q.empty())
      throw TransportError("mem link: recv timeout");
  }
  Frame f = std::move(in_->q.front());
  in_->q.pop_front();
  return f;
}

void MemLink::close() {
  for (auto& side : {in_, out_}) {
    std::lock_guard<std::mutex> lk(side->mu);
    side->closed = true;
    side->cv.notify_all();
  }
}

std::pair<std::unique_ptr<MemLink>, std::unique_ptr<MemLink>> make_mem_pair(double latency_ms,
                                                                            double timeout_s) {
  auto q1 = std::make_shared<MemQueue>();
  auto q2 = std::make_shared<MemQueue>();
  return {std::make_unique<MemLink>(q1, q2, latency_ms, timeout_s),
          std::make_unique<MemLink>(q2, q1, latency_ms, timeout_s)};
}

TcpLink::TcpLink(int fd, double latency_ms, double timeout_s) : fd_(fd), latency_ms_(latency_ms) {
  int one = 1;
  setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  timeval tv{};
  tv.tv_sec = static_cast<long>(timeout_s);
  tv.tv_usec = static_cast<long>((timeout_s - static_cast<double>(tv.tv_sec)) * 1e6);
  setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

void TcpLink::send(const Frame& f) {
  sleep_ms(latency_ms_);
  std::vector<uint8_t> bytes = frame_encode(f.tag, f.payload);
  // data_elems rides in a trailer so accounting survives the wire.
  for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<uint8_t>(f.data_elems >> (8 * b)));
  std::lock_guard<std::mutex> lk(send_mu_);
  std::size_t off = 0;
  while (off < bytes.size()) {
    ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n <= 0) throw TransportError("tcp link: send failed");
    off += static_cast<std::size_t>(n);
  }
}

Frame TcpLink::recv() {
  auto read_exact = [this](uint8_t* dst, std::size_t len) {
    std::size_t off = 0;
    while (off < len) {
      ssize_t n = ::recv(fd_, dst + off, len - off, 0);
      if (n == 0) throw TransportError("tcp link: peer closed");
      if (n < 0) throw TransportError("tcp link: recv failed/timeout");
      off += static_cast<std::size_t>(n);
    }
  };
  std::vector<uint8_t> head(12);
  read_exact(head.data(), head.size());
  uint64_t len = 0;
  for (int b = 0; b < 8; ++b) len |= static_cast<uint64_t>(head[4 + b]) << (8 * b);
  std::vector<uint8_t> rest(len + 8);
  read_exact(rest.data(), rest.size());
  std::vector<uint8_t> whole = std::move(head);
  whole.insert(whole.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(len));
  Frame f = frame_decode(whole);
  uint64_t elems = 0;
  for (int b = 0; b < 8; ++b) elems |= static_cast<uint64_t>(rest[len + b]) << (8 * b);
  f.data_elems = elems;
  return f;
}

void TcpLink::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

std::unique_ptr<TcpLink> TcpLink::connect(const std::string& host, int port, double latency_ms,
                                          double timeout_s) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError("tcp: socket failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw TransportError("tcp: bad address " + host);
  }
  // Retry briefly so callers can race server startup.
  for (int attempt = 0;; ++attempt) {
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) break;
    if (attempt > 200) {
      ::close(fd);
      throw TransportError("tcp: connection refused " + host + ":" + std::to_string(port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return std::make_unique<TcpLink>(fd, latency_ms, timeout_s);
}

TcpListener::TcpListener(int port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError("tcp: socket failed");
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
    throw TransportError("tcp: bind failed on port " + std::to_string(port));
  if (listen(fd_, 16) != 0) throw TransportError("tcp: listen failed");
  socklen_t len = sizeof addr;
  getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpLink> TcpListener::accept(double latency_ms, double timeout_s) {
  int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw TransportError("tcp: accept failed");
  return std::make_unique<TcpLink>(fd, latency_ms, timeout_s);
}

namespace {

Frame hello_frame(Role self, SessionId session) {
  Frame f;
  f.tag = tag::kHandshake;
  f.payload.resize(18);
  f.payload[0] = kWireVersion;
  f.payload[1] = static_cast<uint8_t>(self);
  for (int b = 0; b < 8; ++b) {
    f.payload[2 + b] = static_cast<uint8_t>(session.hi >> (8 * b));
    f.payload[10 + b] = static_cast<uint8_t>(session.lo >> (8 * b));
  }
  return f;
}

std::pair<Role, SessionId> parse_hello(const Frame& peer) {
  if (peer.tag != tag::kHandshake || peer.payload.size() != 18)
    throw TransportError("handshake: bad frame");
  if (peer.payload[0] != kWireVersion) throw TransportError("handshake: version mismatch");
  SessionId got;
  for (int b = 0; b < 8; ++b) {
    got.hi |= static_cast<uint64_t>(peer.payload[2 + b]) << (8 * b);
    got.lo |= static_cast<uint64_t>(peer.payload[10 + b]) << (8 * b);
  }
  return {static_cast<Role>(peer.payload[1]), got};
}

Role check_hello(const Frame& peer, SessionId session) {
  auto [role, got] = parse_hello(peer);
  if (!(got == session)) throw TransportError("handshake: session mismatch");
  return role;
}

}  // namespace

void Channel::handshake(Role self, Role expected_peer, SessionId session) {
  send(hello_frame(self, session));
  Role got = check_hello(recv(), session);
  if (got != expected_peer)
    throw TransportError(std::string("handshake: role mismatch, expected ") +
                         role_name(expected_peer) + ", got " + role_name(got));
}

Role Channel::accept_handshake(Role self, SessionId session) {
  Role got = check_hello(recv(), session);
  send(hello_frame(self, session));
  return got;
}

std::pair<Role, SessionId> Channel::accept_handshake_any(Role self) {
  auto got = parse_hello(recv());
  send(hello_frame(self, got.second));
  return got;
}

void Channel::send(const Frame& f) {
  double t0 = now_s();
  link_->send(f);
  double t1 = now_s();
  io_s_ += t1 - t0;
  log_.entries.push_back({true, f.tag, f.data_elems * 64, f.payload.size(), t1});
}

Frame Channel::recv() {
  double t0 = now_s();
  Frame f = link_->recv();
  double t1 = now_s();
  io_s_ += t1 - t0;
  if (f.tag == tag::kError)
    throw ProtocolError("peer abort: " + std::string(f.payload.begin(), f.payload.end()));
  log_.entries.push_back({false, f.tag, f.data_elems * 64, f.payload.size(), t1});
  return f;
}

Frame Channel::expect(uint32_t t) {
  Frame f = recv();
  if (f.tag != t)
    throw TransportError(std::string("expected frame ") + tag_name(t) + ", got " +
                         tag_name(f.tag));
  return f;
}

void Channel::send_matrices(uint32_t t, const std::vector<Matrix>& ms) {
  Frame f;
  f.tag = t;
  f.payload = encode_matrices(ms);
  for (const Matrix& m : ms) f.data_elems += m.size();
  send(f);
}

std::vector<Matrix> Channel::expect_matrices(uint32_t t) {
  Frame f = expect(t);
  return decode_matrices(f.payload);
}

}  // namespace s2p
