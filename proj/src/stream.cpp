#include "advsim/stream.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "advsim/error.hpp"
#include "advsim/log.hpp"

namespace advsim::stream {

using nlohmann::json;

namespace {

json color_json(Color c) { return json::array({c.r, c.g, c.b}); }

Color color_from(const json& j) {
  auto channel = [&](int i) {
    const int v = j.at(i).get<int>();
    if (v < 0 || v > 255) throw Error(ErrorKind::InvalidArgument, "color component out of range");
    return static_cast<std::uint8_t>(v);
  };
  return {channel(0), channel(1), channel(2)};
}

std::string errno_text() { return std::strerror(errno); }

}  // namespace

json command_to_json(const RenderCommand& command) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CircleCmd>) {
          return {{"kind", "circle"}, {"x", c.x}, {"y", c.y}, {"radius", c.radius}, {"color", color_json(c.color)}};
        } else if constexpr (std::is_same_v<T, RectangleCmd>) {
          return {{"kind", "rectangle"}, {"x", c.x},           {"y", c.y}, {"width", c.width},
                  {"height", c.height},  {"color", color_json(c.color)}};
        } else if constexpr (std::is_same_v<T, LineCmd>) {
          return {{"kind", "line"},  {"x1", c.x1},       {"y1", c.y1}, {"x2", c.x2},
                  {"y2", c.y2},      {"width", c.width}, {"color", color_json(c.color)}};
        } else {
          return {{"kind", "text"},  {"x", c.x},       {"y", c.y},
                  {"content", c.content}, {"size", c.size}, {"color", color_json(c.color)}};
        }
      },
      command);
}

RenderCommand command_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "circle") {
      return CircleCmd{j.at("x").get<double>(), j.at("y").get<double>(), j.at("radius").get<double>(),
                       color_from(j.at("color"))};
    }
    if (kind == "rectangle") {
      return RectangleCmd{j.at("x").get<double>(), j.at("y").get<double>(), j.at("width").get<double>(),
                          j.at("height").get<double>(), color_from(j.at("color"))};
    }
    if (kind == "line") {
      return LineCmd{j.at("x1").get<double>(), j.at("y1").get<double>(), j.at("x2").get<double>(),
                     j.at("y2").get<double>(), j.at("width").get<double>(), color_from(j.at("color"))};
    }
    if (kind == "text") {
      return TextCmd{j.at("x").get<double>(), j.at("y").get<double>(), j.at("content").get<std::string>(),
                     j.at("size").get<double>(), color_from(j.at("color"))};
    }
    throw Error(ErrorKind::InvalidArgument, "unknown render command kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, e.what());
  }
}

json hello_message() { return {{"type", "hello"}, {"protocol_version", kProtocolVersion}}; }

json frame_message(const Frame& frame) {
  json commands = json::array();
  for (const RenderCommand& c : frame.commands) commands.push_back(command_to_json(c));
  return {{"type", "frame"}, {"turn", frame.turn}, {"commands", std::move(commands)}};
}

json action_request_message(const std::string& agent, std::span<const NodeId> targets) {
  json list = json::array();
  for (NodeId t : targets) list.push_back(raw(t));
  return {{"type", "action_request"}, {"agent", agent}, {"targets", std::move(list)}};
}

json action_message(const std::string& agent, NodeId target) {
  return {{"type", "action"}, {"agent", agent}, {"target", raw(target)}};
}

json camera_message(const Viewport& v) {
  return {{"type", "camera"}, {"cx", v.cx}, {"cy", v.cy}, {"hw", v.half_width}, {"hh", v.half_height}};
}

std::optional<InputEvent> to_input_event(const json& message) {
  try {
    const std::string type = message.at("type").get<std::string>();
    if (type == "action") {
      return HumanAction{message.at("agent").get<std::string>(), NodeId{message.at("target").get<std::uint64_t>()}};
    }
    if (type == "camera") {
      return CameraEvent{Viewport{message.at("cx").get<double>(), message.at("cy").get<double>(),
                                  message.at("hw").get<double>(), message.at("hh").get<double>()}};
    }
  } catch (const json::exception& e) {
    log().warn("ignoring malformed client message: {}", e.what());
  }
  return std::nullopt;
}

std::string encode(const json& message) {
  const std::string body = message.dump();
  std::string out;
  out.reserve(body.size() + 4);
  const auto n = static_cast<std::uint32_t>(body.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  out += body;
  return out;
}

std::optional<json> Decoder::next() {
  if (buffer_.size() < 4) return std::nullopt;
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n |= static_cast<std::uint32_t>(static_cast<unsigned char>(buffer_[i])) << (8 * i);
  if (n > kMaxMessageBytes) throw Error(ErrorKind::InvalidArgument, "message length " + std::to_string(n));
  if (buffer_.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
  std::string body = buffer_.substr(4, n);
  buffer_.erase(0, 4 + static_cast<std::size_t>(n));
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, e.what());
  }
}

std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorKind::ConfigError, "listen address must be HOST:PORT");
  const std::string host = address.substr(0, colon);
  const std::string port = address.substr(colon + 1);
  char* end = nullptr;
  const unsigned long value = std::strtoul(port.c_str(), &end, 10);
  if (port.empty() || *end != '\0' || value > 65535) throw Error(ErrorKind::ConfigError, "bad port '" + port + "'");
  return {host.empty() ? "127.0.0.1" : host, static_cast<std::uint16_t>(value)};
}

Server::Server(const std::string& host, std::uint16_t port, std::size_t max_lag) : max_lag_(max_lag) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  const std::string resolved = host == "localhost" ? "127.0.0.1" : host;
  if (inet_pton(AF_INET, resolved.c_str(), &addr.sin_addr) != 1) {
    throw Error(ErrorKind::ConfigError, "cannot parse listen host '" + host + "'");
  }
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_NONBLOCK | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) throw Error(ErrorKind::Io, "socket: " + errno_text());
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
    const std::string why = errno_text();
    ::close(listen_fd_);
    throw Error(ErrorKind::Io, "cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  if (::pipe2(wake_pipe_, O_NONBLOCK | O_CLOEXEC) != 0) {
    ::close(listen_fd_);
    throw Error(ErrorKind::Io, "pipe: " + errno_text());
  }
  worker_ = std::thread([this] { run(); });
  log().info("stream server listening on {}:{}", host, port_);
}

Server::~Server() {
  stopping_ = true;
  wake();
  if (worker_.joinable()) worker_.join();
  for (auto& [fd, client] : clients_) ::close(fd);
  ::close(listen_fd_);
  ::close(wake_pipe_[0]);
  ::close(wake_pipe_[1]);
}

void Server::wake() {
  const char byte = 1;
  [[maybe_unused]] const auto n = ::write(wake_pipe_[1], &byte, 1);
}

std::size_t Server::client_count() const {
  std::lock_guard lock(mutex_);
  return clients_.size();
}

std::uint64_t Server::connection_generation() const {
  std::lock_guard lock(mutex_);
  return generation_;
}

void Server::broadcast(const json& message, bool is_frame) {
  const std::string bytes = encode(message);
  {
    std::lock_guard lock(mutex_);
    for (auto& [fd, client] : clients_) {
      if (is_frame && client.queued_frames >= max_lag_) {
        ++dropped_frames_;
        continue;
      }
      client.queue.push_back({bytes, is_frame});
      if (is_frame) ++client.queued_frames;
    }
  }
  wake();
}

std::optional<json> Server::wait_message(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  if (!inbound_cv_.wait_for(lock, timeout, [&] { return !inbound_.empty(); })) return std::nullopt;
  json message = std::move(inbound_.front());
  inbound_.pop_front();
  return message;
}

std::vector<json> Server::drain_messages() {
  std::lock_guard lock(mutex_);
  std::vector<json> out(std::make_move_iterator(inbound_.begin()), std::make_move_iterator(inbound_.end()));
  inbound_.clear();
  return out;
}

bool Server::wait_for_clients(std::size_t count, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  return clients_cv_.wait_for(lock, timeout, [&] { return clients_.size() >= count; });
}

void Server::accept_clients() {
  for (;;) {
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_NONBLOCK | SOCK_CLOEXEC);
    if (fd < 0) return;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    Client client;
    client.fd = fd;
    client.queue.push_back({encode(hello_message()), false});
    clients_.emplace(fd, std::move(client));
    ++generation_;
    log().info("stream client connected (fd {})", fd);
  }
}

bool Server::read_client(Client& client) {
  char buffer[16384];
  bool open = true;  // messages sent just before a close are still delivered
  for (;;) {
    const ssize_t n = ::recv(client.fd, buffer, sizeof buffer, 0);
    if (n > 0) {
      client.decoder.feed(buffer, static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) break;
    if (n < 0 && errno == EINTR) continue;
    open = false;
    break;
  }
  try {
    while (auto message = client.decoder.next()) {
      const std::string type = message->value("type", "");
      if (type == "hello") {
        if (message->value("protocol_version", -1) != kProtocolVersion) {
          log().warn("stream client speaks an incompatible protocol version; disconnecting");
          return false;
        }
        continue;
      }
      inbound_.push_back(std::move(*message));
      inbound_cv_.notify_all();
    }
  } catch (const Error& e) {
    log().warn("stream client sent a malformed message: {}", e.what());
    return false;
  }
  return open;
}

bool Server::write_client(Client& client) {
  while (!client.queue.empty()) {
    const Outgoing& front = client.queue.front();
    const ssize_t n = ::send(client.fd, front.bytes.data() + client.offset, front.bytes.size() - client.offset,
                             MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK) return true;
      if (errno == EINTR) continue;
      return false;
    }
    client.offset += static_cast<std::size_t>(n);
    if (client.offset == front.bytes.size()) {
      if (front.is_frame) --client.queued_frames;
      client.queue.pop_front();
      client.offset = 0;
    }
  }
  return true;
}

void Server::run() {
  std::vector<pollfd> fds;
  while (!stopping_) {
    fds.clear();
    fds.push_back({wake_pipe_[0], POLLIN, 0});
    fds.push_back({listen_fd_, POLLIN, 0});
    {
      std::lock_guard lock(mutex_);
      for (const auto& [fd, client] : clients_) {
        fds.push_back({fd, static_cast<short>(POLLIN | (client.queue.empty() ? 0 : POLLOUT)), 0});
      }
    }
    if (::poll(fds.data(), fds.size(), 250) < 0) {
      if (errno == EINTR) continue;
      log().error("stream server poll failed: {}", errno_text());
      return;
    }
    if (fds[0].revents & POLLIN) {
      char drain[64];
      while (::read(wake_pipe_[0], drain, sizeof drain) > 0) {
      }
    }
    std::lock_guard lock(mutex_);
    if (fds[1].revents & POLLIN) accept_clients();
    bool removed = false;
    for (std::size_t i = 2; i < fds.size(); ++i) {
      auto it = clients_.find(fds[i].fd);
      if (it == clients_.end()) continue;
      Client& client = it->second;
      bool alive = !(fds[i].revents & (POLLERR | POLLNVAL));
      if (alive && (fds[i].revents & (POLLIN | POLLHUP))) alive = read_client(client);
      if (alive && (fds[i].revents & POLLOUT)) alive = write_client(client);
      if (!alive) {
        log().info("stream client disconnected (fd {})", client.fd);
        ::close(client.fd);
        clients_.erase(it);
        removed = true;
      }
    }
    if (removed || !clients_.empty()) clients_cv_.notify_all();
  }
}

Client::Client(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  const std::string resolved = host == "localhost" ? "127.0.0.1" : host;
  if (inet_pton(AF_INET, resolved.c_str(), &addr.sin_addr) != 1) {
    throw Error(ErrorKind::InvalidArgument, "cannot parse host '" + host + "'");
  }
  fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw Error(ErrorKind::Io, "socket: " + errno_text());
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string why = errno_text();
    ::close(fd_);
    throw Error(ErrorKind::Io, "connect: " + why);
  }
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

Client::~Client() {
  if (fd_ >= 0) ::close(fd_);
}

void Client::send(const json& message) {
  const std::string bytes = encode(message);
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::Io, "send: " + errno_text());
    }
    sent += static_cast<std::size_t>(n);
  }
  sent_types_.push_back(message.value("type", ""));
}

std::optional<json> Client::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto message = decoder_.next()) return message;
    if (closed_) return std::nullopt;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready <= 0) continue;
    char buffer[16384];
    const ssize_t n = ::recv(fd_, buffer, sizeof buffer, 0);
    if (n <= 0) {
      closed_ = true;
      continue;
    }
    decoder_.feed(buffer, static_cast<std::size_t>(n));
  }
}

std::optional<json> Client::receive_type(const std::string& type, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    auto message = receive(left);
    if (!message) return std::nullopt;
    if (message->value("type", "") == type) return message;
  }
}

void StreamBackend::present(const Frame& frame) { server_->broadcast(frame_message(frame), true); }

std::vector<InputEvent> StreamBackend::poll_input() {
  std::vector<InputEvent> out = std::move(deferred_);
  deferred_.clear();
  for (const json& message : server_->drain_messages()) {
    if (auto event = to_input_event(message)) out.push_back(std::move(*event));
  }
  return out;
}

std::vector<InputEvent> StreamBackend::wait_input(std::chrono::milliseconds timeout) {
  std::vector<InputEvent> out = std::move(deferred_);
  deferred_.clear();
  if (out.empty()) {
    if (auto message = server_->wait_message(timeout)) {
      if (auto event = to_input_event(*message)) out.push_back(std::move(*event));
    }
  }
  for (const json& message : server_->drain_messages()) {
    if (auto event = to_input_event(message)) out.push_back(std::move(*event));
  }
  return out;
}

NodeId StreamBackend::request_action(const std::string& agent, std::span<const NodeId> targets,
                                     std::optional<std::chrono::milliseconds> timeout) {
  using clock = std::chrono::steady_clock;
  const auto deadline = timeout ? std::optional(clock::now() + *timeout) : std::nullopt;
  constexpr auto kSlice = std::chrono::milliseconds(100);
  auto slice = [&] {
    if (!deadline) return kSlice;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - clock::now());
    return std::clamp(left, std::chrono::milliseconds(0), kSlice);
  };
  auto expired = [&] { return deadline && clock::now() >= *deadline; };

  const json request = action_request_message(agent, targets);
  std::optional<std::uint64_t> prompted_generation;
  for (;;) {
    // Answers already queued count even if their sender has left.
    std::optional<json> message = server_->wait_message(std::chrono::milliseconds(0));
    if (!message && server_->client_count() == 0) {
      if (expired()) throw Error(ErrorKind::NoClientConnected, "no stream client answered for '" + agent + "'");
      server_->wait_for_clients(1, slice());
      continue;
    }
    const std::uint64_t generation = server_->connection_generation();
    if (!message && prompted_generation != generation) {
      server_->broadcast(request, false);
      prompted_generation = generation;
    }
    if (!message) message = server_->wait_message(slice());
    if (!message) {
      if (expired()) throw Error(ErrorKind::Timeout, "no action for '" + agent + "'");
      continue;
    }
    auto event = to_input_event(*message);
    if (!event) continue;
    if (const auto* action = std::get_if<HumanAction>(&*event); action && action->agent == agent) {
      if (std::find(targets.begin(), targets.end(), action->target) != targets.end()) return action->target;
      log().warn("human agent '{}': node {} is not a legal target, prompting again", agent, raw(action->target));
      server_->broadcast(request, false);
      continue;
    }
    deferred_.push_back(std::move(*event));
  }
}

}  // namespace advsim::stream
