#include "home/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "home/bytes.hpp"
#include "home/errors.hpp"
#include "home/wire_detail.hpp"

namespace home {

using nlohmann::json;

namespace wire_detail {

WireMessage parse_payload(std::string_view payload) {
  const json doc = json::parse(payload, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::ProtocolError, "payload is not valid JSON");
  if (!doc.is_object()) throw Error(ErrorCode::ProtocolError, "payload must be an object");
  WireMessage m;
  if (!doc.contains("id") || !doc["id"].is_number_unsigned()) throw Error(ErrorCode::ProtocolError, "missing or invalid id");
  m.id = doc["id"].get<std::uint64_t>();
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw Error(ErrorCode::ProtocolError, "missing or invalid kind");
  m.kind = doc["kind"].get<std::string>();
  if (doc.contains("body")) {
    if (!doc["body"].is_object()) throw Error(ErrorCode::ProtocolError, "body must be an object");
    m.body = doc["body"];
  }
  return m;
}

std::vector<std::uint64_t> blob_sizes(const json& body) {
  std::vector<std::uint64_t> sizes;
  if (!body.contains("blobs")) return sizes;
  const json& b = body["blobs"];
  if (!b.is_array()) throw Error(ErrorCode::ProtocolError, "blobs must be an array");
  std::uint64_t total = 0;
  for (const json& s : b) {
    if (!s.is_number_unsigned()) throw Error(ErrorCode::ProtocolError, "blob sizes must be unsigned integers");
    const auto v = s.get<std::uint64_t>();
    if (v > kMaxBlobBytes || total + v > kMaxBlobBytes) throw Error(ErrorCode::ProtocolError, "blobs too large");
    total += v;
    sizes.push_back(v);
  }
  return sizes;
}

bool read_exact(int fd, char* out, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, out + got, n - got, 0);
    if (r == 0) {
      if (got == 0) return false;
      throw Error(ErrorCode::IoError, "connection closed mid-message");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::IoError, std::string("recv: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

void write_all(int fd, std::string_view data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t r = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::IoError, std::string("send: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(r);
  }
}

}  // namespace wire_detail

std::string encode_message(const WireMessage& m) {
  json body = m.body.is_null() ? json::object() : m.body;
  if (!m.blobs.empty() || body.contains("blobs")) {
    json sizes = json::array();
    for (const auto& b : m.blobs) sizes.push_back(b.size());
    body["blobs"] = std::move(sizes);
  }
  const json doc = {{"id", m.id}, {"kind", m.kind}, {"body", std::move(body)}};
  const std::string payload = doc.dump();
  if (payload.size() > kMaxPayload) throw Error(ErrorCode::ProtocolError, "payload too large");
  std::string out;
  put_le(out, static_cast<std::uint32_t>(payload.size()));
  out += payload;
  for (const auto& b : m.blobs) out += b;
  return out;
}

DecodeResult decode_message(std::string_view buffer) {
  if (buffer.size() < 4) return {};
  ByteReader r(buffer.substr(0, 4));
  const auto len = r.get<std::uint32_t>();
  if (len > kMaxPayload) throw Error(ErrorCode::ProtocolError, "payload length exceeds limit");
  if (buffer.size() < 4 + std::size_t{len}) return {};
  WireMessage m = wire_detail::parse_payload(buffer.substr(4, len));
  std::size_t pos = 4 + len;
  for (std::uint64_t s : wire_detail::blob_sizes(m.body)) {
    if (buffer.size() - pos < s) return {};
    m.blobs.emplace_back(buffer.substr(pos, s));
    pos += s;
  }
  return {std::move(m), pos};
}

std::optional<WireMessage> read_message(int fd) {
  char hdr[4];
  if (!wire_detail::read_exact(fd, hdr, 4)) return std::nullopt;
  ByteReader r(std::string_view(hdr, 4));
  const auto len = r.get<std::uint32_t>();
  if (len > kMaxPayload) throw Error(ErrorCode::ProtocolError, "payload length exceeds limit");
  std::string payload(len, '\0');
  if (len > 0 && !wire_detail::read_exact(fd, payload.data(), len))
    throw Error(ErrorCode::IoError, "connection closed mid-message");
  WireMessage m = wire_detail::parse_payload(payload);
  for (std::uint64_t s : wire_detail::blob_sizes(m.body)) {
    std::string blob(s, '\0');
    if (s > 0 && !wire_detail::read_exact(fd, blob.data(), s)) throw Error(ErrorCode::IoError, "connection closed mid-blob");
    m.blobs.push_back(std::move(blob));
  }
  return m;
}

void write_message(int fd, const WireMessage& m) { wire_detail::write_all(fd, encode_message(m)); }

WireClient::WireClient(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
    throw Error(ErrorCode::IoError, "cannot resolve " + host);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  const int rc = fd_ < 0 ? -1 : ::connect(fd_, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::IoError, "cannot connect to " + host + ":" + std::to_string(port));
  }
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

WireClient::~WireClient() {
  if (fd_ >= 0) ::close(fd_);
}

WireMessage WireClient::request(const std::string& kind, json body) {
  WireMessage m;
  m.id = next_id_++;
  m.kind = kind;
  m.body = std::move(body);
  write_message(fd_, m);
  auto reply = read_message(fd_);
  if (!reply) throw Error(ErrorCode::ProtocolError, "server closed the connection");
  if (reply->id != m.id) throw Error(ErrorCode::ProtocolError, "reply id mismatch");
  return std::move(*reply);
}

json step_body(const EncodedStep& e) { return json::parse(e.body); }

}  // namespace home
