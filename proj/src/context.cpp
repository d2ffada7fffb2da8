#include "advsim/context.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "advsim/error.hpp"
#include "advsim/kernels.hpp"
#include "advsim/log.hpp"

namespace advsim {

std::vector<Proposal> resolve_conflicts(std::span<const Proposal> proposals, const ConflictPolicy& policy, Rng& rng,
                                        std::span<const std::string> names) {
  if (const auto* custom = std::get_if<CustomPolicy>(&policy)) {
    const std::vector<Proposal> accepted = custom->resolve(proposals);
    std::vector<Proposal> out(proposals.begin(), proposals.end());
    for (Proposal& p : out) {
      const bool kept = std::any_of(accepted.begin(), accepted.end(), [&](const Proposal& a) { return a == p; });
      if (!kept && !p.aerial) p.to = p.from;
    }
    return out;
  }

  std::vector<Proposal> out(proposals.begin(), proposals.end());
  if (std::holds_alternative<AllowAll>(policy)) return out;

  // Group moving ground proposals by target; map iteration keeps RNG use ordered.
  std::map<NodeId, std::vector<std::size_t>> by_target;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out[i].aerial && out[i].moves()) by_target[out[i].to].push_back(i);
  }
  for (const auto& [target, group] : by_target) {
    if (group.size() < 2) continue;
    std::size_t winner = group.front();
    if (std::holds_alternative<RandomPolicy>(policy)) {
      winner = group[rng.uniform_index(group.size())];
    } else {
      const auto& ranks = std::get<PriorityPolicy>(policy).ranks;
      auto rank_of = [&](std::size_t i) -> std::pair<bool, std::int64_t> {
        auto it = ranks.find(names[out[i].agent]);
        return it == ranks.end() ? std::pair{true, std::int64_t{0}} : std::pair{false, it->second};
      };
      // Group is in proposal (creation) order, so the first minimum wins ties.
      for (std::size_t i : group) {
        if (rank_of(i) < rank_of(winner)) winner = i;
      }
    }
    for (std::size_t i : group) {
      if (i != winner) out[i].to = out[i].from;
    }
  }
  return out;
}

Context::Context(ContextOptions options)
    : options_(std::move(options)), visual_(options_.vis), rng_(options_.seed) {
  recorder_.open({rec::kCurrentVersion, options_.seed, options_.config_digest}, options_.recording);
}

Agent& Context::create_agent(const std::string& name, AgentKind kind, NodeId start, MetaMap meta) {
  if (agents_.contains(name)) throw Error(ErrorKind::DuplicateAgentName, name);
  if (!graph_.has_node(start)) {
    throw Error(ErrorKind::UnknownNode, "agent '" + name + "' start node " + std::to_string(raw(start)));
  }
  Agent& agent = agents_.create_agent(name, kind, start, graph_, std::move(meta), rng_.split());
  last_states_.resize(agents_.size());
  return agent;
}

void Context::register_sensor(const std::string& agent, const std::string& sensor) {
  if (!sensors_.contains(sensor)) throw Error(ErrorKind::UnknownSensor, sensor);
  agents_.get(agent).register_sensor(sensor);
}

void Context::register_strategy(const std::string& agent, Strategy strategy) {
  agents_.get(agent).register_strategy(std::move(strategy));
}

void Context::add_rule(Rule rule) {
  auto pos = std::upper_bound(rules_.begin(), rules_.end(), rule.priority,
                              [](int priority, const Rule& r) { return priority < r.priority; });
  rules_.insert(pos, std::move(rule));
}

void Context::terminate() {
  if (!terminated_) apply(rec::Terminated{static_cast<std::uint32_t>(turn_)});
}

std::uint16_t Context::narrow(std::size_t agent) {
  if (agent > UINT16_MAX) throw Error(ErrorKind::InvalidArgument, "agent index out of range");
  return static_cast<std::uint16_t>(agent);
}

Agent& Context::event_agent(std::uint16_t index) {
  if (index >= agents_.size()) {
    throw Error(ErrorKind::CorruptRecording, "event references unknown agent index " + std::to_string(index));
  }
  return agents_.at(index);
}

const Node& Context::event_node(NodeId id) const {
  if (!graph_.has_node(id)) {
    throw Error(ErrorKind::CorruptRecording, "event references unknown node " + std::to_string(raw(id)));
  }
  return graph_.node(id);
}

NodeId Context::nearest_node(double x, double y) const {
  const auto table = graph_.coordinates();
  return table->ids[kernels::nearest_index(table->xs, table->ys, x, y)];
}

void Context::apply(const rec::Event& event) {
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, rec::TurnBegin>) {
          turn_ = e.turn;
        } else if constexpr (std::is_same_v<T, rec::AgentMoved>) {
          Agent& agent = event_agent(e.agent);
          const Node& from = event_node(e.from);
          const Node& to = event_node(e.to);
          agent.place_at_node(e.to, to, std::atan2(to.y - from.y, to.x - from.x));
        } else if constexpr (std::is_same_v<T, rec::AerialMoved>) {
          Agent& agent = event_agent(e.agent);
          if (!std::isfinite(e.x) || !std::isfinite(e.y)) {
            throw Error(ErrorKind::CorruptRecording, "non-finite aerial position");
          }
          const Pose& before = agent.pose();
          const double dx = e.x - before.x;
          const double dy = e.y - before.y;
          const double heading = (dx != 0.0 || dy != 0.0) ? std::atan2(dy, dx) : before.heading;
          agent.place_at_pose({e.x, e.y, heading}, nearest_node(e.x, e.y));
        } else if constexpr (std::is_same_v<T, rec::AgentReset>) {
          Agent& agent = event_agent(e.agent);
          agent.place_at_node(e.to, event_node(e.to), 0.0);
        } else if constexpr (std::is_same_v<T, rec::Custom>) {
          if (e.key == "outcome") outcome_ = e.payload;
          custom_events_.push_back(e);
        } else {
          terminated_ = true;
        }
      },
      event);
  if (recorder_.is_open()) recorder_.record(event);
}

Action Context::human_action(Agent& agent) {
  try {
    return visual_.await_human_action(*this, agent.name(), options_.human_timeout);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoClientConnected && e.kind() != ErrorKind::Timeout) throw;
    log().warn("human agent '{}' turn {}: {}, staying", agent.name(), turn_ + 1, e.what());
    return Stay{};
  }
}

void Context::step() {
  if (terminated_) throw Error(ErrorKind::Terminated, "step after termination at turn " + std::to_string(turn_));
  const std::uint64_t next_turn = turn_ + 1;
  if (next_turn > UINT32_MAX) throw Error(ErrorKind::InvalidArgument, "turn counter exhausted");

  // Observation and decision. Nothing is committed until every agent is done.
  const auto positions = agents_.positions();
  std::vector<AgentState> states;
  std::vector<Proposal> proposals;
  states.reserve(agents_.size());
  proposals.reserve(agents_.size());
  for (Agent& agent : agents_.all()) {
    AgentState state = agent.get_state(sensors_, graph_, positions, next_turn);
    if (agent.strategy()) {
      agent.strategy()(state);
    } else {
      state.action = human_action(agent);
    }
    proposals.push_back(agent.set_state(graph_, state));
    states.push_back(std::move(state));
  }

  std::vector<std::string> names;
  names.reserve(agents_.size());
  for (const Agent& agent : agents_.all()) names.push_back(agent.name());
  const std::vector<Proposal> committed = resolve_conflicts(proposals, policy_, rng_, names);

  apply(rec::TurnBegin{static_cast<std::uint32_t>(next_turn)});
  last_states_ = std::move(states);
  for (const Proposal& p : committed) {
    const Agent& agent = agents_.at(p.agent);
    if (p.aerial) {
      if (p.destination.x != agent.pose().x || p.destination.y != agent.pose().y) {
        apply(rec::AerialMoved{narrow(p.agent), p.destination.x, p.destination.y});
      }
    } else if (p.from != p.to) {
      apply(rec::AgentMoved{narrow(p.agent), p.from, p.to});
    }
  }

  for (Rule& rule : rules_) {
    if (auto termination = rule.apply(*this, turn_)) {
      if (!termination->winner.empty()) record_custom("outcome", termination->winner);
      terminate();
      break;
    }
  }

  visual_.simulate(*this);
}

std::uint64_t Context::state_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t value, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      h ^= (value >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(turn_, 8);
  mix(terminated_ ? 1 : 0, 1);
  if (outcome_) {
    mix(outcome_->size(), 8);
    for (char c : *outcome_) mix(static_cast<unsigned char>(c), 1);
  }
  for (const Agent& agent : agents_.all()) {
    mix(agent.index(), 2);
    mix(raw(agent.current_node()), 8);
    mix(std::bit_cast<std::uint64_t>(agent.pose().x), 8);
    mix(std::bit_cast<std::uint64_t>(agent.pose().y), 8);
  }
  return h;
}

}  // namespace advsim
