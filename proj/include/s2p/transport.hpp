#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "s2p/matrix.hpp"

namespace s2p {

// Wire tags. Frames 0x01..0x10 carry protocol data and count toward the
// round/payload accounting; the rest are control plane (handshake,
// preprocessing requests, job dispatch) and are excluded, which is the
// convention under which the documented per-protocol round counts hold.
namespace tag {
inline constexpr uint32_t kHandshake = 0x00;
inline constexpr uint32_t kMaskedLeft = 0x01;   // A + R_a
inline constexpr uint32_t kMaskedRight = 0x02;  // B + R_b
inline constexpr uint32_t kVfRightT = 0x03;     // VF_b || T
inline constexpr uint32_t kVfLeft = 0x04;       // VF_a
inline constexpr uint32_t kAtpT = 0x05;         // S2PATP t vector
inline constexpr uint32_t kTripleBundle = 0x10;
inline constexpr uint32_t kTripleRequest = 0x11;
inline constexpr uint32_t kJob = 0x20;
inline constexpr uint32_t kResult = 0x21;
inline constexpr uint32_t kError = 0x7F;
}  // namespace tag

bool tag_known(uint32_t t);
bool tag_accounted(uint32_t t);
const char* tag_name(uint32_t t);

inline constexpr uint8_t kWireVersion = 1;

enum class Role : uint8_t { Client = 0, Alice = 1, Bob = 2, Cs = 3 };
const char* role_name(Role r);

struct SessionId {
  uint64_t hi = 0, lo = 0;
  bool operator==(const SessionId&) const = default;
  bool operator<(const SessionId& o) const { return hi != o.hi ? hi < o.hi : lo < o.lo; }
};

struct Frame {
  uint32_t tag = 0;
  std::vector<uint8_t> payload;
  // Number of matrix-element doubles carried (payloads are matrix
  // concatenations; headers are excluded from payload accounting).
  uint64_t data_elems = 0;
};

// Frame layout: tag (LE u32), payload length (LE u64), payload bytes.
std::vector<uint8_t> frame_encode(uint32_t tag, const std::vector<uint8_t>& payload);
Frame frame_decode(const std::vector<uint8_t>& bytes);

// One endpoint's ordered log of a link's traffic. Rounds and payload bits
// follow the one-way-message convention: a message increments the counters
// of its sender only. Wall-clock timestamps are kept for phase reporting
// but excluded from the canonical digest so fixed-seed runs are replayable.
struct TranscriptEntry {
  bool sent = false;
  uint32_t tag = 0;
  uint64_t data_bits = 0;
  uint64_t payload_bytes = 0;
  double time_s = 0.0;
};

struct Transcript {
  std::string name;
  std::vector<TranscriptEntry> entries;

  uint64_t sent_rounds() const;
  uint64_t sent_payload_bits() const;
  bool has_tag(uint32_t t) const;
  void fold_digest(uint64_t& h) const;  // FNV-1a over (dir, tag, size, bits)
};

// Reliable ordered duplex byte link.
class Link {
 public:
  virtual ~Link() = default;
  virtual void send(const Frame& f) = 0;
  virtual Frame recv() = 0;
  virtual void close() = 0;
};

struct MemQueue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Frame> q;
  bool closed = false;
};

class MemLink : public Link {
 public:
  MemLink(std::shared_ptr<MemQueue> in, std::shared_ptr<MemQueue> out, double latency_ms,
          double timeout_s)
      : in_(std::move(in)), out_(std::move(out)), latency_ms_(latency_ms), timeout_s_(timeout_s) {}
  ~MemLink() override { close(); }

  void send(const Frame& f) override;
  Frame recv() override;
  void close() override;

 private:
  std::shared_ptr<MemQueue> in_, out_;
  double latency_ms_;
  double timeout_s_;
};

std::pair<std::unique_ptr<MemLink>, std::unique_ptr<MemLink>> make_mem_pair(
    double latency_ms = 0.0, double timeout_s = 30.0);

class TcpLink : public Link {
 public:
  explicit TcpLink(int fd, double latency_ms = 0.0, double timeout_s = 30.0);
  ~TcpLink() override { close(); }

  void send(const Frame& f) override;
  Frame recv() override;
  void close() override;

  static std::unique_ptr<TcpLink> connect(const std::string& host, int port,
                                          double latency_ms = 0.0, double timeout_s = 30.0);

 private:
  int fd_ = -1;
  double latency_ms_;
  std::mutex send_mu_;
};

class TcpListener {
 public:
  // Binds 127.0.0.1:port; port 0 picks an ephemeral one.
  explicit TcpListener(int port);
  ~TcpListener();
  int port() const { return port_; }
  std::unique_ptr<TcpLink> accept(double latency_ms = 0.0, double timeout_s = 30.0);

 private:
  int fd_ = -1;
  int port_ = 0;
};

// Transcript-keeping wrapper around a link. Performs the version/role
// handshake and tags every event with this endpoint's local order.
class Channel {
 public:
  Channel(std::unique_ptr<Link> link, std::string transcript_name)
      : link_(std::move(link)) {
    log_.name = std::move(transcript_name);
  }

  void handshake(Role self, Role expected_peer, SessionId session);
  // Server-side half: reads the peer's hello first, validates, replies.
  Role accept_handshake(Role self, SessionId session);
  // Daemon variant: accepts whatever session the peer proposes.
  std::pair<Role, SessionId> accept_handshake_any(Role self);

  void send(const Frame& f);
  Frame recv();
  Frame expect(uint32_t tag);

  void send_matrices(uint32_t t, const std::vector<Matrix>& ms);
  std::vector<Matrix> expect_matrices(uint32_t t);

  const Transcript& transcript() const { return log_; }
  Transcript& transcript() { return log_; }
  double io_seconds() const { return io_s_; }
  void close() { link_->close(); }

 private:
  std::unique_ptr<Link> link_;
  Transcript log_;
  double io_s_ = 0.0;
};

}  // namespace s2p
