#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "advsim/viz.hpp"

namespace advsim::stream {

// Wire format: each message is a 4-byte little-endian length followed by
// that many bytes of UTF-8 JSON. Every message carries a "type" field:
//   server -> client: hello{protocol_version}, frame{turn, commands},
//                     action_request{agent, targets}
//   client -> server: hello{protocol_version}, action{agent, target},
//                     camera{cx, cy, hw, hh}
inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxMessageBytes = 64u << 20;

nlohmann::json command_to_json(const RenderCommand& command);
RenderCommand command_from_json(const nlohmann::json& json);

nlohmann::json hello_message();
nlohmann::json frame_message(const Frame& frame);
nlohmann::json action_request_message(const std::string& agent, std::span<const NodeId> targets);
nlohmann::json action_message(const std::string& agent, NodeId target);
nlohmann::json camera_message(const Viewport& viewport);

/// Maps a client message to an input event; hello and unknown types map to nothing.
std::optional<InputEvent> to_input_event(const nlohmann::json& message);

std::string encode(const nlohmann::json& message);

/// Incremental length-prefix decoder.
class Decoder {
 public:
  void feed(const char* data, std::size_t size) { buffer_.append(data, size); }
  /// Next complete message, if any. Throws Error(InvalidArgument) on bad JSON
  /// or an oversized length prefix.
  std::optional<nlohmann::json> next();

 private:
  std::string buffer_;
};

/// "host:port" -> (host, port).
std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& address);

/// TCP listener with one network worker thread. Frames are queued per
/// client; a client lagging `max_lag` frames has further frames dropped.
/// Other messages are never dropped.
class Server {
 public:
  Server(const std::string& host, std::uint16_t port, std::size_t max_lag = 8);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return port_; }
  std::size_t client_count() const;
  /// Increments on every accepted connection.
  std::uint64_t connection_generation() const;
  std::uint64_t dropped_frames() const { return dropped_frames_.load(); }

  void broadcast(const nlohmann::json& message, bool is_frame);

  /// Next inbound client message (hello is handled internally).
  std::optional<nlohmann::json> wait_message(std::chrono::milliseconds timeout);
  std::vector<nlohmann::json> drain_messages();

  /// Waits until at least `count` clients are connected.
  bool wait_for_clients(std::size_t count, std::chrono::milliseconds timeout);

 private:
  struct Outgoing {
    std::string bytes;
    bool is_frame;
  };
  struct Client {
    int fd = -1;
    Decoder decoder;
    std::deque<Outgoing> queue;
    std::size_t offset = 0;  // bytes of queue.front() already sent
    std::size_t queued_frames = 0;
    bool closing = false;
  };

  void run();
  void wake();
  void accept_clients();
  bool read_client(Client& client);
  bool write_client(Client& client);

  int listen_fd_ = -1;
  int wake_pipe_[2] = {-1, -1};
  std::uint16_t port_ = 0;
  std::size_t max_lag_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> dropped_frames_{0};

  mutable std::mutex mutex_;
  std::condition_variable inbound_cv_;
  std::condition_variable clients_cv_;
  std::map<int, Client> clients_;
  std::deque<nlohmann::json> inbound_;
  std::uint64_t generation_ = 0;
  std::thread worker_;
};

/// Blocking client used by tests and scripted front ends.
class Client {
 public:
  Client(const std::string& host, std::uint16_t port);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void send(const nlohmann::json& message);
  /// Next message, or nullopt on timeout or closed connection.
  std::optional<nlohmann::json> receive(std::chrono::milliseconds timeout);
  /// Receives until a message of the given type arrives; others are discarded.
  std::optional<nlohmann::json> receive_type(const std::string& type, std::chrono::milliseconds timeout);
  bool closed() const { return closed_; }
  /// Every message this client sent, for protocol audits.
  const std::vector<std::string>& sent_types() const { return sent_types_; }

 private:
  int fd_ = -1;
  bool closed_ = false;
  Decoder decoder_;
  std::vector<std::string> sent_types_;
};

/// STREAM visualization backend over a Server.
class StreamBackend : public VisualBackend {
 public:
  explicit StreamBackend(std::unique_ptr<Server> server) : server_(std::move(server)) {}

  Server& server() { return *server_; }

  void present(const Frame& frame) override;
  std::vector<InputEvent> poll_input() override;
  NodeId request_action(const std::string& agent, std::span<const NodeId> targets,
                        std::optional<std::chrono::milliseconds> timeout) override;
  std::vector<InputEvent> wait_input(std::chrono::milliseconds timeout) override;

 private:
  std::unique_ptr<Server> server_;
  std::vector<InputEvent> deferred_;
};

}  // namespace advsim::stream
