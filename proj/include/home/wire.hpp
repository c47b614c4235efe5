#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "home/env.hpp"

namespace home {

inline constexpr std::string_view kWireVersion = "home-wire/1";
inline constexpr std::uint32_t kMaxPayload = 16u << 20;   // bytes of JSON per message
inline constexpr std::uint64_t kMaxBlobBytes = 256u << 20;  // total blob bytes per message

/// One protocol message: u32 LE payload length, JSON payload
/// {"id","kind","body"}, then the blobs whose sizes body["blobs"] lists.
struct WireMessage {
  std::uint64_t id = 0;
  std::string kind;  // hello|reset|step|spawn|render|close|error|result
  nlohmann::json body = nlohmann::json::object();
  std::vector<std::string> blobs;
};

std::string encode_message(const WireMessage& m);

/// Outcome of decoding a buffer that may hold a partial message.
struct DecodeResult {
  std::optional<WireMessage> message;  // set when a full message was decoded
  std::size_t consumed = 0;
};
/// Throws ProtocolError for malformed input (oversized length, bad JSON,
/// missing fields, bad blob declarations).
DecodeResult decode_message(std::string_view buffer);

/// Blocking I/O on a connected stream socket. read_message returns nullopt
/// on clean EOF before any byte; throws ProtocolError/IoError otherwise.
std::optional<WireMessage> read_message(int fd);
void write_message(int fd, const WireMessage& m);

/// Handles one connection until close/EOF: one Env per connection, every
/// request answered exactly once, malformed input answered with an error.
void serve_connection(int fd, const EnvConfig& base);

/// TCP server on 127.0.0.1 (or `host`); port 0 picks a free port.
class Server {
 public:
  Server(EnvConfig base, std::string host, std::uint16_t port);  // throws BindError
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return port_; }
  /// Accepts until stop(); each connection runs on its own thread.
  void run();
  void stop();

 private:
  EnvConfig base_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
};

/// Minimal synchronous client used by tests and tools.
class WireClient {
 public:
  WireClient(const std::string& host, std::uint16_t port);  // throws IoError
  explicit WireClient(int fd) : fd_(fd) {}
  ~WireClient();
  WireClient(const WireClient&) = delete;
  WireClient& operator=(const WireClient&) = delete;

  WireMessage request(const std::string& kind, nlohmann::json body = nlohmann::json::object());
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
  std::uint64_t next_id_ = 1;
};

/// Body JSON of an encoded step as a parsed object (blob sizes included).
nlohmann::json step_body(const EncodedStep& e);

}  // namespace home
