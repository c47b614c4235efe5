#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <mutex>
#include <set>
#include <thread>

#include "home/bytes.hpp"
#include "home/config.hpp"
#include "home/errors.hpp"
#include "home/wire.hpp"
#include "home/wire_detail.hpp"

namespace home {

using nlohmann::json;

namespace {

json error_body(ErrorCode code, const std::string& message) {
  return {{"code", std::string(to_string(code))}, {"message", message}};
}

json modality_list(const Modalities& m) {
  json l = json::array();
  if (m.rgb) l.push_back("rgb");
  if (m.depth) l.push_back("depth");
  if (m.segmentation) l.push_back("segmentation");
  if (m.audio) l.push_back("audio");
  if (m.semantics) l.push_back("semantics");
  return l;
}

class Session {
 public:
  explicit Session(const EnvConfig& base) : cfg_(base) {}

  /// Returns the reply; sets `close` after a close request.
  WireMessage handle(const WireMessage& req, bool& close) {
    WireMessage reply;
    reply.id = req.id;
    reply.kind = "result";
    if (req.kind == "hello") {
      if (req.body.contains("config")) {
        if (!req.body["config"].is_object()) throw Error(ErrorCode::ConfigError, "config must be an object");
        json doc = json::parse(config_to_json(cfg_));
        if (req.body["config"].contains("audio")) doc["audio"].erase("air_absorption");
        doc.merge_patch(req.body["config"]);
        cfg_ = config_from_json(doc.dump());
      }
      env_.reset();
      reply.body = {{"version", std::string(kWireVersion)},
                    {"modalities", modality_list(cfg_.modalities)},
                    {"actions", actions()},
                    {"config", json::parse(config_to_json(cfg_))}};
    } else if (req.kind == "reset") {
      std::optional<std::uint64_t> seed;
      if (req.body.contains("seed")) {
        if (!req.body["seed"].is_number_unsigned()) throw Error(ErrorCode::ParamError, "seed must be an unsigned integer");
        seed = req.body["seed"].get<std::uint64_t>();
      }
      const auto obs = env().reset(seed);
      fill(reply, encode_observations(obs, cfg_.modalities));
    } else if (req.kind == "step") {
      std::map<std::uint32_t, Action> actions;
      if (req.body.contains("actions")) {
        const json& a = req.body["actions"];
        if (!a.is_object()) throw Error(ErrorCode::ParamError, "actions must map agent id to action");
        for (const auto& [k, v] : a.items()) {
          std::uint32_t id = 0;
          try {
            std::size_t used = 0;
            const unsigned long parsed = std::stoul(k, &used);
            if (used != k.size() || parsed > 0xFFFFFFFFul) throw std::invalid_argument(k);
            id = static_cast<std::uint32_t>(parsed);
          } catch (const std::logic_error&) {
            throw Error(ErrorCode::UnknownAgent, k);
          }
          if (!v.is_number_integer()) throw Error(ErrorCode::ParamError, "action must be an integer");
          actions[id] = action_from_int(v.get<int>());
        }
      }
      if (!env_ || !env_->active()) throw Error(ErrorCode::NotReset, "step before reset");
      fill(reply, encode_step(env_->step(actions), cfg_.modalities));
    } else if (req.kind == "spawn") {
      if (!env_ || !env_->active()) throw Error(ErrorCode::NotReset, "spawn before reset");
      reply.body = {{"agent", env_->spawn_agent()}};
    } else if (req.kind == "render") {
      if (!env_ || !env_->active()) throw Error(ErrorCode::NotReset, "render before reset");
      if (!req.body.contains("agent") || !req.body["agent"].is_number_unsigned())
        throw Error(ErrorCode::ParamError, "render needs an agent id");
      const auto obs = env_->observe(req.body["agent"].get<std::uint32_t>());
      fill(reply, encode_observations({obs}, cfg_.modalities));
    } else if (req.kind == "close") {
      close = true;
    } else {
      throw Error(ErrorCode::ProtocolError, "unknown kind " + req.kind);
    }
    return reply;
  }

 private:
  static json actions() {
    json a = json::array();
    for (int i = 0; i < kActionCount; ++i) a.push_back(std::string(to_string(static_cast<Action>(i))));
    return a;
  }
  static void fill(WireMessage& reply, EncodedStep e) {
    reply.body = json::parse(e.body);
    reply.blobs = std::move(e.blobs);
  }
  Env& env() {
    if (!env_) env_.emplace(cfg_);
    return *env_;
  }

  EnvConfig cfg_;
  std::optional<Env> env_;
};

}  // namespace

void serve_connection(int fd, const EnvConfig& base) {
  Session session(base);
  std::uint64_t last_id = 0;
  auto send_error = [&](std::uint64_t id, ErrorCode code, const std::string& msg) {
    WireMessage m;
    m.id = id;
    m.kind = "error";
    m.body = error_body(code, msg);
    wire_detail::write_all(fd, encode_message(m));
  };
  try {
    while (true) {
      char hdr[4];
      if (!wire_detail::read_exact(fd, hdr, 4)) return;
      const auto len = ByteReader(std::string_view(hdr, 4)).get<std::uint32_t>();
      if (len > kMaxPayload) {
        send_error(last_id, ErrorCode::ProtocolError, "payload length exceeds limit");
        return;
      }
      std::string payload(len, '\0');
      if (len > 0 && !wire_detail::read_exact(fd, payload.data(), len)) return;

      WireMessage req;
      try {
        req = wire_detail::parse_payload(payload);
      } catch (const Error& e) {
        send_error(last_id, e.code(), e.what());
        continue;
      }
      std::vector<std::uint64_t> sizes;
      try {
        sizes = wire_detail::blob_sizes(req.body);
      } catch (const Error& e) {
        send_error(req.id, e.code(), e.what());
        return;  // cannot find the next envelope
      }
      for (std::uint64_t s : sizes) {
        std::string blob(s, '\0');
        if (s > 0 && !wire_detail::read_exact(fd, blob.data(), s)) return;
        req.blobs.push_back(std::move(blob));
      }
      if (req.id <= last_id) {
        send_error(req.id, ErrorCode::ProtocolError, "request ids must be strictly increasing");
        continue;
      }
      last_id = req.id;

      bool close = false;
      WireMessage reply;
      try {
        reply = session.handle(req, close);
      } catch (const Error& e) {
        send_error(req.id, e.code(), e.what());
        continue;
      } catch (const std::exception& e) {
        send_error(req.id, ErrorCode::ProtocolError, e.what());
        continue;
      }
      wire_detail::write_all(fd, encode_message(reply));
      if (close) return;
    }
  } catch (const Error&) {
    // peer vanished mid-message; nothing left to answer
  }
}

Server::Server(EnvConfig base, std::string host, std::uint16_t port) : base_(std::move(base)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(ErrorCode::BindError, "socket failed");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error(ErrorCode::BindError, "bad address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
    ::close(listen_fd_);
    throw Error(ErrorCode::BindError, host + ":" + std::to_string(port) + " unavailable");
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Server::~Server() {
  stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::stop() { stopping_ = true; }

void Server::run() {
  std::mutex mu;
  std::set<int> open;
  std::vector<std::thread> workers;
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    {
      std::lock_guard lock(mu);
      open.insert(fd);
    }
    workers.emplace_back([this, fd, &mu, &open] {
      serve_connection(fd, base_);
      std::lock_guard lock(mu);
      open.erase(fd);
      ::close(fd);
    });
  }
  {
    std::lock_guard lock(mu);
    for (int fd : open) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : workers) t.join();
}

}  // namespace home
