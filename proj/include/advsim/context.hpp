#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "advsim/agents.hpp"
#include "advsim/graph.hpp"
#include "advsim/recorder.hpp"
#include "advsim/rng.hpp"
#include "advsim/sensors.hpp"
#include "advsim/viz.hpp"

namespace advsim {

/// Returned by a rule to end the run. `winner` is a team name, "draw", or
/// empty when the run just stops.
struct Termination {
  std::string winner;
  friend bool operator==(const Termination&, const Termination&) = default;
};

using RuleFn = std::function<std::optional<Termination>(Context&, std::uint64_t turn)>;

struct Rule {
  std::string name;
  int priority = 0;  // ascending execution; ties keep insertion order
  RuleFn apply;
};

struct AllowAll {};
struct RandomPolicy {};
struct PriorityPolicy {
  std::map<std::string, std::int64_t> ranks;  // lower wins; unranked agents lose to ranked ones
};
struct CustomPolicy {
  /// Receives every proposal and returns the ones to commit.
  std::function<std::vector<Proposal>(std::span<const Proposal>)> resolve;
};
using ConflictPolicy = std::variant<AllowAll, RandomPolicy, PriorityPolicy, CustomPolicy>;

/// A conflict is two or more moving ground agents targeting the same node.
/// Losers are rewritten to stay at their current node; aerial agents never
/// conflict. `names` maps proposal agent indices to names.
std::vector<Proposal> resolve_conflicts(std::span<const Proposal> proposals, const ConflictPolicy& policy, Rng& rng,
                                        std::span<const std::string> names);

struct ContextOptions {
  std::uint64_t seed = 0;
  Digest config_digest{};
  rec::Recorder::Mode recording = rec::Recorder::Mode::Buffer;
  VisMode vis = VisMode::None;
  /// Wait limit for human moves in STREAM mode; unset waits indefinitely.
  std::optional<std::chrono::milliseconds> human_timeout;
};

/// Single point of access to the simulation: graph, sensors, agents,
/// recorder, visualization, and the seeded generator.
///
/// All state changes that matter for replay go through apply(), which also
/// records them; live steps and replays therefore share one code path.
class Context {
 public:
  explicit Context(ContextOptions options = {});
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  Graph& graph() { return graph_; }
  const Graph& graph() const { return graph_; }
  SensorEngine& sensors() { return sensors_; }
  const SensorEngine& sensors() const { return sensors_; }
  AgentEngine& agents() { return agents_; }
  const AgentEngine& agents() const { return agents_; }
  VisualEngine& visual() { return visual_; }
  rec::Recorder& recorder() { return recorder_; }
  const rec::Recorder& recorder() const { return recorder_; }
  Rng& rng() { return rng_; }

  Sensor& create_sensor(const std::string& name, SensorKind kind) { return sensors_.create_sensor(name, kind); }
  /// The agent's random stream is split from the context generator.
  Agent& create_agent(const std::string& name, AgentKind kind, NodeId start, MetaMap meta = {});
  void register_sensor(const std::string& agent, const std::string& sensor);
  void register_strategy(const std::string& agent, Strategy strategy);

  void add_rule(Rule rule);
  void set_conflict_policy(ConflictPolicy policy) { policy_ = std::move(policy); }
  const ConflictPolicy& conflict_policy() const { return policy_; }

  std::uint64_t turn() const { return turn_; }
  bool is_terminated() const { return terminated_; }
  /// Idempotent; records a Terminated event the first time.
  void terminate();
  const std::optional<std::string>& outcome() const { return outcome_; }

  /// One full turn: observe, decide, resolve, commit, rules, visualize.
  void step();

  /// Applies one recorded event to the world and records it.
  void apply(const rec::Event& event);

  // Helpers for rules.
  void reset_agent(std::size_t agent, NodeId node) { apply(rec::AgentReset{narrow(agent), node}); }
  void record_custom(const std::string& key, const std::string& payload) { apply(rec::Custom{key, payload}); }

  /// States gathered in the most recent step, by agent index.
  const std::vector<AgentState>& last_states() const { return last_states_; }
  const std::vector<rec::Custom>& custom_events() const { return custom_events_; }

  /// FNV-1a over turn, termination, outcome, and every agent's position.
  /// Headings are left out: they come from libm atan2, which is not
  /// bit-identical across platforms.
  std::uint64_t state_hash() const;

  std::uint64_t seed() const { return options_.seed; }
  const Digest& config_digest() const { return options_.config_digest; }
  const ContextOptions& options() const { return options_; }

  /// Closes the recorder and returns the recording bytes.
  Bytes finish_recording() { return recorder_.finalize(); }

 private:
  static std::uint16_t narrow(std::size_t agent);
  Agent& event_agent(std::uint16_t index);
  const Node& event_node(NodeId id) const;
  NodeId nearest_node(double x, double y) const;
  Action human_action(Agent& agent);

  ContextOptions options_;
  Graph graph_;
  SensorEngine sensors_;
  AgentEngine agents_;
  VisualEngine visual_;
  rec::Recorder recorder_;
  Rng rng_;
  std::vector<Rule> rules_;
  ConflictPolicy policy_ = AllowAll{};
  std::uint64_t turn_ = 0;
  bool terminated_ = false;
  std::optional<std::string> outcome_;
  std::vector<AgentState> last_states_;
  std::vector<rec::Custom> custom_events_;
};

}  // namespace advsim
