#include "advsim/viz.hpp"

#include <algorithm>
#include <thread>

#include "advsim/context.hpp"
#include "advsim/error.hpp"
#include "advsim/log.hpp"

namespace advsim {

namespace {

constexpr Color kEdgeColor{170, 170, 170};
constexpr Color kNodeColor{110, 110, 110};
constexpr double kNodeRadius = 1.5;

Color territory_color(const Node& node) {
  auto it = node.meta.find("territory");
  if (it == node.meta.end()) return kNodeColor;
  const auto* team = std::get_if<std::string>(&it->second);
  if (team == nullptr) return kNodeColor;
  if (*team == "red") return {230, 120, 120};
  if (*team == "blue") return {120, 140, 230};
  return kNodeColor;
}

}  // namespace

Box bounding_box(const RenderCommand& command) {
  return std::visit(
      [](const auto& c) -> Box {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CircleCmd>) {
          return {c.x - c.radius, c.y - c.radius, c.x + c.radius, c.y + c.radius};
        } else if constexpr (std::is_same_v<T, RectangleCmd>) {
          return {c.x - c.width / 2, c.y - c.height / 2, c.x + c.width / 2, c.y + c.height / 2};
        } else if constexpr (std::is_same_v<T, LineCmd>) {
          const double pad = c.width / 2;
          return {std::min(c.x1, c.x2) - pad, std::min(c.y1, c.y2) - pad, std::max(c.x1, c.x2) + pad,
                  std::max(c.y1, c.y2) + pad};
        } else {
          const double width = 0.6 * c.size * static_cast<double>(c.content.size());
          return {c.x, c.y, c.x + width, c.y + c.size};
        }
      },
      command);
}

bool Viewport::intersects(const Box& box) const {
  return box.max_x >= cx - half_width && box.min_x <= cx + half_width && box.max_y >= cy - half_height &&
         box.min_y <= cy + half_height;
}

std::vector<RenderCommand> cull(std::span<const RenderCommand> commands, const Viewport& viewport) {
  std::vector<RenderCommand> out;
  out.reserve(commands.size());
  for (const RenderCommand& c : commands) {
    if (viewport.intersects(bounding_box(c))) out.push_back(c);
  }
  return out;
}

void VisualEngine::set_graph_visual(const Context&, double width, double height) {
  canvas_width_ = width;
  canvas_height_ = height;
  Artist artist;
  artist.layer = kGraphLayer;
  artist.drawer = [](Context& ctx, const nlohmann::json&) {
    VisualEngine& v = ctx.visual();
    const Graph& g = ctx.graph();
    for (const auto& [id, edge] : g.edges()) {
      if (edge.linestring.size() >= 2) {
        for (std::size_t i = 1; i < edge.linestring.size(); ++i) {
          const Point& a = edge.linestring[i - 1];
          const Point& b = edge.linestring[i];
          v.render_line(a.x, a.y, b.x, b.y, 1.0, kEdgeColor);
        }
      } else {
        const Node& s = g.node(edge.source);
        const Node& t = g.node(edge.target);
        v.render_line(s.x, s.y, t.x, t.y, 1.0, kEdgeColor);
      }
    }
    for (const auto& [id, node] : g.nodes()) v.render_circle(node.x, node.y, kNodeRadius, territory_color(node));
  };
  remove_artist("graph");
  add_artist("graph", std::move(artist));
}

void VisualEngine::set_agent_visual(const Context& ctx, const std::string& agent, Color color, double size) {
  const std::size_t index = ctx.agents().get(agent).index();
  Artist artist;
  artist.layer = kAgentLayer;
  artist.drawer = [index, color, size](Context& c, const nlohmann::json&) {
    const Pose& pose = c.agents().at(index).pose();
    c.visual().render_circle(pose.x, pose.y, size, color);
  };
  const std::string name = "agent:" + agent;
  remove_artist(name);
  add_artist(name, std::move(artist));
}

void VisualEngine::set_sensor_visual(const Context& ctx, const std::string& sensor, Color node_color,
                                     Color edge_color) {
  ctx.sensors().get(sensor);
  Artist artist;
  artist.layer = kSensorLayer;
  artist.drawer = [sensor, node_color, edge_color](Context& c, const nlohmann::json&) {
    VisualEngine& v = c.visual();
    const Graph& g = c.graph();
    const auto& states = c.last_states();
    for (const Agent& agent : c.agents().all()) {
      if (agent.index() >= states.size()) continue;
      auto it = states[agent.index()].readings.find(sensor);
      if (it == states[agent.index()].readings.end()) continue;
      std::vector<NodeId> nodes;
      if (const auto* arc = std::get_if<ArcReading>(&it->second)) {
        for (EdgeId e : arc->edges) {
          if (!g.has_edge(e)) continue;
          const Node& s = g.node(g.edge(e).source);
          const Node& t = g.node(g.edge(e).target);
          v.render_line(s.x, s.y, t.x, t.y, 2.0, edge_color);
        }
        nodes = arc->nodes;
      } else if (const auto* nbr = std::get_if<NeighborReading>(&it->second)) {
        nodes = nbr->nodes;
      }
      for (NodeId n : nodes) {
        if (g.has_node(n)) v.render_circle(g.node(n).x, g.node(n).y, kNodeRadius * 1.5, node_color);
      }
    }
  };
  const std::string name = "sensor:" + sensor;
  remove_artist(name);
  add_artist(name, std::move(artist));
}

void VisualEngine::add_artist(const std::string& name, Artist artist) {
  if (artists_.contains(name)) throw Error(ErrorKind::DuplicateArtist, name);
  if (!artist.drawer) throw Error(ErrorKind::InvalidArgument, "artist '" + name + "' has no drawer");
  artists_.emplace(name, Entry{next_sequence_++, std::move(artist)});
}

void VisualEngine::remove_artist(const std::string& name) { artists_.erase(name); }

void VisualEngine::emit(RenderCommand command) {
  if (frame_in_progress_ == nullptr) {
    throw Error(ErrorKind::PrimitiveOutsideFrame, "render primitives are only legal inside a drawer");
  }
  frame_in_progress_->push_back(std::move(command));
}

void VisualEngine::render_circle(double x, double y, double radius, Color color) {
  emit(CircleCmd{x, y, radius, color});
}

void VisualEngine::render_rectangle(double x, double y, double width, double height, Color color) {
  emit(RectangleCmd{x, y, width, height, color});
}

void VisualEngine::render_line(double x1, double y1, double x2, double y2, double width, Color color) {
  emit(LineCmd{x1, y1, x2, y2, width, color});
}

void VisualEngine::render_text(double x, double y, const std::string& content, double size, Color color) {
  emit(TextCmd{x, y, content, size, color});
}

Frame VisualEngine::render_frame(Context& ctx, std::optional<Viewport> viewport) {
  std::vector<const Entry*> order;
  order.reserve(artists_.size());
  for (const auto& [name, entry] : artists_) order.push_back(&entry);
  std::sort(order.begin(), order.end(), [](const Entry* a, const Entry* b) {
    return std::pair(a->artist.layer, a->sequence) < std::pair(b->artist.layer, b->sequence);
  });

  Frame frame;
  frame.turn = ctx.turn();
  frame.viewport = viewport;
  struct Guard {
    std::vector<RenderCommand>*& slot;
    ~Guard() { slot = nullptr; }
  } guard{frame_in_progress_};
  frame_in_progress_ = &frame.commands;
  for (const Entry* entry : order) {
    ++drawer_calls_;
    entry->artist.drawer(ctx, entry->artist.data);
  }
  frame_in_progress_ = nullptr;
  if (viewport) frame.commands = cull(frame.commands, *viewport);
  return frame;
}

void VisualEngine::apply_input(InputEvent event) {
  std::visit(
      [&](auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, HumanAction>) {
          pending_actions_.push_back(std::move(e));
        } else if constexpr (std::is_same_v<T, CameraEvent>) {
          viewport_ = e.viewport;
        } else if constexpr (std::is_same_v<T, PauseEvent>) {
          paused_ = true;
        } else {
          paused_ = false;
        }
      },
      event);
}

void VisualEngine::push_input(InputEvent event) { apply_input(std::move(event)); }

void VisualEngine::simulate(Context& ctx) {
  if (mode_ == VisMode::None) return;
  const Frame frame = render_frame(ctx, viewport_);
  if (backend_) {
    backend_->present(frame);
    for (InputEvent& e : backend_->poll_input()) apply_input(std::move(e));
    while (paused_) {
      for (InputEvent& e : backend_->wait_input(std::chrono::milliseconds(100))) apply_input(std::move(e));
    }
  }
  ++frames_presented_;
}

NodeId VisualEngine::await_human_action(Context& ctx, const std::string& agent,
                                        std::optional<std::chrono::milliseconds> timeout) {
  const Agent& who = ctx.agents().get(agent);
  const std::vector<NodeId> targets = sense_neighbors(ctx.graph(), who.current_node()).nodes;
  auto legal = [&](NodeId n) { return std::find(targets.begin(), targets.end(), n) != targets.end(); };

  for (auto it = pending_actions_.begin(); it != pending_actions_.end();) {
    if (it->agent != agent) {
      ++it;
      continue;
    }
    const NodeId target = it->target;
    it = pending_actions_.erase(it);
    if (legal(target)) return target;
    log().warn("human agent '{}': node {} is not a legal target", agent, raw(target));
  }
  if (mode_ == VisMode::None || !backend_) {
    throw Error(ErrorKind::NoClientConnected, "headless mode has no input channel");
  }
  return backend_->request_action(agent, targets, timeout);
}

}  // namespace advsim
