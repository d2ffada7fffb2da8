#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "advsim/graph.hpp"

namespace advsim {

class Context;

struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Color&, const Color&) = default;
};

// All coordinates are world-frame meters. Rectangles are centered on (x, y).
struct CircleCmd {
  double x = 0, y = 0, radius = 0;
  Color color;
  friend bool operator==(const CircleCmd&, const CircleCmd&) = default;
};
struct RectangleCmd {
  double x = 0, y = 0, width = 0, height = 0;
  Color color;
  friend bool operator==(const RectangleCmd&, const RectangleCmd&) = default;
};
struct LineCmd {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0, width = 1;
  Color color;
  friend bool operator==(const LineCmd&, const LineCmd&) = default;
};
struct TextCmd {
  double x = 0, y = 0;
  std::string content;
  double size = 12;
  Color color;
  friend bool operator==(const TextCmd&, const TextCmd&) = default;
};
using RenderCommand = std::variant<CircleCmd, RectangleCmd, LineCmd, TextCmd>;

struct Box {
  double min_x, min_y, max_x, max_y;
};
/// Conservative world-frame extent; text is estimated at 0.6 * size per glyph.
Box bounding_box(const RenderCommand& command);

struct Viewport {
  double cx = 0, cy = 0, half_width = 0, half_height = 0;
  bool intersects(const Box& box) const;
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct Frame {
  std::uint64_t turn = 0;
  std::optional<Viewport> viewport;  // absent when no camera is registered
  std::vector<RenderCommand> commands;
};

/// Drops commands whose bounding boxes miss the viewport; keeps order.
std::vector<RenderCommand> cull(std::span<const RenderCommand> commands, const Viewport& viewport);

struct HumanAction {
  std::string agent;
  NodeId target{};
};
struct CameraEvent {
  Viewport viewport;
};
struct PauseEvent {};
struct ResumeEvent {};
using InputEvent = std::variant<HumanAction, CameraEvent, PauseEvent, ResumeEvent>;

using Drawer = std::function<void(Context&, const nlohmann::json& data)>;

struct Artist {
  int layer = 0;
  nlohmann::json data = nlohmann::json::object();
  Drawer drawer;
};

inline constexpr int kGraphLayer = 10;
inline constexpr int kSensorLayer = 20;
inline constexpr int kAgentLayer = 30;

/// Where frames go and input comes from in STREAM mode.
class VisualBackend {
 public:
  virtual ~VisualBackend() = default;
  virtual void present(const Frame& frame) = 0;
  virtual std::vector<InputEvent> poll_input() = 0;
  /// Asks connected clients for a move and returns the first legal answer.
  /// Throws NoClientConnected or Timeout.
  virtual NodeId request_action(const std::string& agent, std::span<const NodeId> targets,
                                std::optional<std::chrono::milliseconds> timeout) = 0;
  /// Blocks until some input arrives or the timeout passes.
  virtual std::vector<InputEvent> wait_input(std::chrono::milliseconds timeout) = 0;
};

enum class VisMode { None, Stream };

class VisualEngine {
 public:
  explicit VisualEngine(VisMode mode = VisMode::None) : mode_(mode) {}

  VisMode mode() const { return mode_; }
  void set_mode(VisMode mode) { mode_ = mode; }
  void set_backend(std::unique_ptr<VisualBackend> backend) { backend_ = std::move(backend); }
  VisualBackend* backend() { return backend_.get(); }

  void set_graph_visual(const Context& ctx, double width, double height);
  void set_agent_visual(const Context& ctx, const std::string& agent, Color color, double size);
  void set_sensor_visual(const Context& ctx, const std::string& sensor, Color node_color, Color edge_color);
  void add_artist(const std::string& name, Artist artist);
  void remove_artist(const std::string& name);
  bool has_artist(const std::string& name) const { return artists_.contains(name); }

  // Legal only while a drawer runs.
  void render_circle(double x, double y, double radius, Color color);
  void render_rectangle(double x, double y, double width, double height, Color color);
  void render_line(double x1, double y1, double x2, double y2, double width, Color color);
  void render_text(double x, double y, const std::string& content, double size, Color color);

  /// Runs every artist in (layer, insertion) order and culls to the viewport.
  Frame render_frame(Context& ctx, std::optional<Viewport> viewport);

  /// Per-turn hook. NONE: returns immediately. STREAM: renders, presents,
  /// and drains input into the pending buffer.
  void simulate(Context& ctx);

  /// Blocks for a human move. Throws NoClientConnected (headless or no
  /// client) or Timeout.
  NodeId await_human_action(Context& ctx, const std::string& agent,
                            std::optional<std::chrono::milliseconds> timeout);

  void push_input(InputEvent event);
  std::optional<Viewport> viewport() const { return viewport_; }
  bool paused() const { return paused_; }

  double canvas_width() const { return canvas_width_; }
  double canvas_height() const { return canvas_height_; }
  std::uint64_t drawer_calls() const { return drawer_calls_; }
  std::uint64_t frames_presented() const { return frames_presented_; }

 private:
  struct Entry {
    std::uint64_t sequence;
    Artist artist;
  };

  void apply_input(InputEvent event);
  void emit(RenderCommand command);

  VisMode mode_;
  std::unique_ptr<VisualBackend> backend_;
  std::map<std::string, Entry> artists_;
  std::uint64_t next_sequence_ = 0;
  std::vector<RenderCommand>* frame_in_progress_ = nullptr;
  std::optional<Viewport> viewport_;
  std::deque<HumanAction> pending_actions_;
  bool paused_ = false;
  double canvas_width_ = 800;
  double canvas_height_ = 800;
  std::uint64_t drawer_calls_ = 0;
  std::uint64_t frames_presented_ = 0;
};

}  // namespace advsim
