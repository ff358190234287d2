#pragma once

#include <string>

#include "s2p/runtime.hpp"

namespace s2p {

// One physical node of the decentralized topology. The CS serves
// preprocessing to any party of the session and exits; the data holders
// accept a job from the client, run the requested protocol against each
// other, and return their result shares to the client, which aggregates.
struct NodeConfig {
  Role role = Role::Cs;
  std::string bind_host = "127.0.0.1";
  int bind_port = 0;
  std::string peer_addr;              // bob: alice's host:port
  std::string cs_addr;                // parties: cs host:port
  std::string alice_addr, bob_addr;   // client
  SessionId session{1, 1};
  double latency_ms = 0.0, timeout_s = 30.0;
  uint64_t seed = 1;
  std::string input_csv;  // party: one value per line; absent = generate from job seed
  int serve_count = 2;    // cs: connections to serve before exiting

  // Client-side job description.
  std::string protocol = "s2php";
  std::size_t n = 8;
  ProtocolConfig cfg;
};

SessionId parse_session_id(const std::string& hex);

// Runs the node to completion. The client role prints a JSON result to
// stdout and returns nonzero on protocol failure.
int run_node(const NodeConfig& config);

}  // namespace s2p
