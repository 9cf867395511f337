// Copyright 2026 The fpaxos-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

/*! \file
 *  \brief Fast Paxos role state machines.
 *
 *  Every transition is a pure function (state, input) -> (state, outbox).
 *  A step that changes durable state says so through its `persisted` flag;
 *  the host must make that state durable before sending the outbox.
 */

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fpaxos/common.hpp"
#include "fpaxos/messages.hpp"
#include "fpaxos/quorum.hpp"
#include "fpaxos/round_scheme.hpp"
#include "fpaxos/rules.hpp"

namespace fpaxos {

struct Roster {
  std::vector<AgentId> acceptors;
  std::vector<AgentId> coordinators;
  std::vector<AgentId> proposers;
  std::vector<AgentId> learners;
};

using RuleFunction = std::function<CoordinatorChoice(const ReportSet&, const RuleContext&)>;

/// Everything an agent needs to know about the system it runs in.
struct Environment {
  QuorumConfig config;
  RoundScheme scheme;
  Roster roster;
  RuleKind rule = RuleKind::Simplified;
  // Replaces `rule` when set. Lets tests plant a broken coordinator.
  RuleFunction rule_override;
};

namespace detail {
template <class T>
std::vector<Message> broadcast(const AgentId& from,
                               const std::vector<AgentId>& to, const T& body) {
  std::vector<Message> out;
  out.reserve(to.size());
  for (const auto& dst : to) out.push_back(Message{from, dst, body});
  return out;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Acceptor

/// All three fields are durable.
struct AcceptorState {
  RoundNumber promised_round = 0;
  RoundNumber last_vote_round = 0;  // vr
  MaybeValue last_vote_value;       // vv

  friend bool operator==(const AcceptorState&, const AcceptorState&) = default;

  nlohmann::json to_json() const {
    return {{"promised_round", promised_round},
            {"last_vote_round", last_vote_round},
            {"last_vote_value", value_to_json(last_vote_value)}};
  }
  static AcceptorState from_json(const nlohmann::json& j) {
    if (j.is_null() || j.empty()) return {};
    return {j.at("promised_round").get<RoundNumber>(),
            j.at("last_vote_round").get<RoundNumber>(),
            value_from_json(j.at("last_vote_value"))};
  }
};

struct AcceptorStep {
  AcceptorState state;
  bool persisted = false;
  std::vector<Message> out;
};

/// Promise round `m.round` if it is newer than anything promised so far and
/// report the last vote to the round's coordinator. Stale invitations are
/// ignored.
inline AcceptorStep acceptor_on_phase1a(const AcceptorState& s,
                                        const AgentId& self,
                                        const msg::Phase1a& m,
                                        const RoundScheme& scheme) {
  if (m.round <= s.promised_round) return {s, false, {}};
  AcceptorStep step{s, true, {}};
  step.state.promised_round = m.round;
  step.out.push_back(Message{
      self, scheme.coordinator(m.round),
      msg::Phase1b{m.round, s.last_vote_round, s.last_vote_value}});
  return step;
}

/// Vote for `value` in `round` unless a higher round was promised or a vote
/// was already cast at this round or later.
inline AcceptorStep acceptor_on_vote_request(
    const AcceptorState& s, const AgentId& self, RoundNumber round,
    const Value& value, const std::vector<AgentId>& learners) {
  if (round < s.promised_round || s.last_vote_round >= round) {
    return {s, false, {}};
  }
  AcceptorStep step{s, true, {}};
  step.state.promised_round = std::max(s.promised_round, round);
  step.state.last_vote_round = round;
  step.state.last_vote_value = value;
  step.out = detail::broadcast(self, learners, msg::Phase2b{round, value});
  return step;
}

inline AcceptorState acceptor_recover(const nlohmann::json& durable) {
  return AcceptorState::from_json(durable);
}

// ---------------------------------------------------------------------------
// Coordinator

enum class CoordinatorPhase { Idle, CollectingPhase1b, AwaitingProposal, Phase2aSent };

inline std::string_view to_string(CoordinatorPhase p) {
  switch (p) {
    case CoordinatorPhase::Idle: return "idle";
    case CoordinatorPhase::CollectingPhase1b: return "collecting";
    case CoordinatorPhase::AwaitingProposal: return "awaiting-proposal";
    case CoordinatorPhase::Phase2aSent: return "phase2a-sent";
  }
  return "?";
}

/// Only current_round is durable. A recovered coordinator never reuses a
/// round it may already have sent a Phase 2a for.
struct CoordinatorState {
  RoundNumber current_round = 0;
  ReportSet reports;
  std::vector<Value> proposal_pool;  // FIFO, no duplicates
  CoordinatorPhase phase = CoordinatorPhase::Idle;

  nlohmann::json durable_json() const { return {{"current_round", current_round}}; }

  nlohmann::json to_json() const {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : reports) {
      reps.push_back({{"acceptor", r.acceptor},
                      {"round", r.voted_round},
                      {"value", value_to_json(r.voted_value)}});
    }
    return {{"current_round", current_round},
            {"phase", to_string(phase)},
            {"pool", proposal_pool},
            {"reports", reps}};
  }
};

struct CoordinatorStep {
  CoordinatorState state;
  bool persisted = false;
  std::vector<Message> out;
  std::optional<CoordinatorChoice> choice;  // set when the rule ran
};

inline CoordinatorStep coordinator_start_round(const CoordinatorState& s,
                                               const AgentId& self,
                                               const RoundId& round,
                                               const std::vector<AgentId>& acceptors) {
  if (round.coordinator != self) {
    throw InvalidArgument("round " + std::to_string(round.number) +
                          " belongs to " + round.coordinator + ", not " + self);
  }
  if (round.number <= s.current_round) {
    throw InvalidArgument("round " + std::to_string(round.number) +
                          " is not above current round " +
                          std::to_string(s.current_round));
  }
  CoordinatorStep step{s, true, {}, std::nullopt};
  step.state.current_round = round.number;
  step.state.reports.clear();
  step.state.phase = CoordinatorPhase::CollectingPhase1b;
  step.out = detail::broadcast(self, acceptors, msg::Phase1a{round.number});
  return step;
}

namespace detail {
inline void send_phase2a(CoordinatorStep& step, const AgentId& self,
                         const Environment& env, const Value& v) {
  step.out = broadcast(self, env.roster.acceptors,
                       msg::Phase2a{step.state.current_round, v});
  step.state.phase = CoordinatorPhase::Phase2aSent;
}
}  // namespace detail

/// Collects reports for the current round. On exactly the classic quorum's
/// worth of reports the configured rule runs once; later reports are
/// dropped.
inline CoordinatorStep coordinator_on_phase1b(const CoordinatorState& s,
                                              const AgentId& self,
                                              const AgentId& from,
                                              const msg::Phase1b& m,
                                              const Environment& env) {
  CoordinatorStep step{s, false, {}, std::nullopt};
  if (s.phase != CoordinatorPhase::CollectingPhase1b ||
      m.round != s.current_round) {
    return step;
  }
  auto& reports = step.state.reports;
  if (std::any_of(reports.begin(), reports.end(),
                  [&](const Phase1bReport& r) { return r.acceptor == from; })) {
    return step;
  }
  reports.push_back(Phase1bReport{from, m.voted_round, m.voted_value});
  if (reports.size() < env.config.classic_quorum_size) return step;

  RuleContext ctx;
  ctx.config = env.config;
  ctx.quorum_kind = RoundType::Classic;
  const RoundNumber k = tally_votes(reports).max_round;
  ctx.k_type = k == 0 ? RoundType::Classic : env.scheme.type(k);
  const CoordinatorChoice choice = env.rule_override ? env.rule_override(reports, ctx)
                                                     : apply_rule(env.rule, reports, ctx);
  step.choice = choice;

  if (choice.is_mandated()) {
    detail::send_phase2a(step, self, env, *choice.value());
  } else if (!s.proposal_pool.empty()) {
    detail::send_phase2a(step, self, env, s.proposal_pool.front());
  } else if (env.scheme.type(s.current_round) == RoundType::Fast) {
    step.out = detail::broadcast(self, env.roster.proposers,
                                 msg::Any{s.current_round});
    step.state.phase = CoordinatorPhase::Phase2aSent;
  } else {
    step.state.phase = CoordinatorPhase::AwaitingProposal;
  }
  return step;
}

inline CoordinatorStep coordinator_on_propose(const CoordinatorState& s,
                                              const AgentId& self,
                                              const Value& v,
                                              const Environment& env) {
  CoordinatorStep step{s, false, {}, std::nullopt};
  auto& pool = step.state.proposal_pool;
  if (std::find(pool.begin(), pool.end(), v) == pool.end()) pool.push_back(v);
  if (s.phase == CoordinatorPhase::AwaitingProposal) {
    detail::send_phase2a(step, self, env, pool.front());
  }
  return step;
}

inline CoordinatorState coordinator_recover(const nlohmann::json& durable) {
  CoordinatorState s;
  if (!durable.is_null() && durable.contains("current_round")) {
    s.current_round = durable.at("current_round").get<RoundNumber>();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Proposer

/// Nothing here is durable.
struct ProposerState {
  MaybeValue own_value;
  RoundNumber any_round = 0;          // highest round an Any arrived for
  std::set<RoundNumber> requested;    // rounds we already sent requests in

  nlohmann::json to_json() const {
    return {{"value", value_to_json(own_value)},
            {"any_round", any_round},
            {"requested", requested}};
  }
};

struct ProposerStep {
  ProposerState state;
  std::vector<Message> out;
};

namespace detail {
inline void maybe_request(ProposerStep& step, const AgentId& self,
                          const std::vector<AgentId>& acceptors) {
  auto& st = step.state;
  if (!st.own_value || st.any_round == 0 || st.requested.count(st.any_round)) {
    return;
  }
  st.requested.insert(st.any_round);
  step.out = broadcast(self, acceptors, msg::Phase2a{st.any_round, *st.own_value});
}
}  // namespace detail

inline ProposerStep proposer_on_any(const ProposerState& s, const AgentId& self,
                                    const msg::Any& m,
                                    const std::vector<AgentId>& acceptors) {
  ProposerStep step{s, {}};
  if (m.round <= s.any_round) return step;
  step.state.any_round = m.round;
  detail::maybe_request(step, self, acceptors);
  return step;
}

/// A proposer holds a single value: the first one handed to it.
inline ProposerStep proposer_on_propose(const ProposerState& s,
                                        const AgentId& self, const Value& v,
                                        const std::vector<AgentId>& acceptors) {
  ProposerStep step{s, {}};
  if (!step.state.own_value) step.state.own_value = v;
  detail::maybe_request(step, self, acceptors);
  return step;
}

// ---------------------------------------------------------------------------
// Learner

/// `learned` is durable; tallies are not.
struct LearnerState {
  std::map<std::pair<RoundNumber, Value>, std::set<AgentId>> vote_tallies;
  MaybeValue learned;

  nlohmann::json to_json() const {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& [key, voters] : vote_tallies) {
      t.push_back({{"round", key.first}, {"value", key.second}, {"voters", voters}});
    }
    return {{"learned", value_to_json(learned)}, {"tallies", t}};
  }
};

struct LearnerStep {
  LearnerState state;
  bool persisted = false;
  MaybeValue learned_now;
  // Set when a quorum forms for a value other than the one already learned.
  MaybeValue conflict;
};

inline LearnerStep learner_on_phase2b(const LearnerState& s, const AgentId& from,
                                      const msg::Phase2b& m,
                                      const QuorumConfig& config,
                                      const RoundScheme& scheme) {
  LearnerStep step{s, false, std::nullopt, std::nullopt};
  auto& voters = step.state.vote_tallies[{m.round, m.value}];
  if (!voters.insert(from).second) return step;
  if (voters.size() != quorum_size(config, scheme.type(m.round))) return step;
  if (!s.learned) {
    step.state.learned = m.value;
    step.learned_now = m.value;
    step.persisted = true;
  } else if (*s.learned != m.value) {
    step.conflict = m.value;
  }
  return step;
}

inline LearnerState learner_recover(const nlohmann::json& durable) {
  LearnerState s;
  if (!durable.is_null() && durable.contains("learned")) {
    s.learned = value_from_json(durable.at("learned"));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Agent: uniform wrapper the simulator drives.

enum class Role { Acceptor, Coordinator, Proposer, Learner };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::Acceptor: return "acceptor";
    case Role::Coordinator: return "coordinator";
    case Role::Proposer: return "proposer";
    case Role::Learner: return "learner";
  }
  return "?";
}

/// What one step of an agent asks the host to do.
struct Effects {
  std::optional<nlohmann::json> persist;  // durable state to write first
  std::vector<Message> sends;
  MaybeValue learned;
  MaybeValue conflict;
};

class Agent {
 public:
  using State =
      std::variant<AcceptorState, CoordinatorState, ProposerState, LearnerState>;

  Agent(AgentId id, Role role) : id_(std::move(id)), role_(role) {
    switch (role) {
      case Role::Acceptor: state_ = AcceptorState{}; break;
      case Role::Coordinator: state_ = CoordinatorState{}; break;
      case Role::Proposer: state_ = ProposerState{}; break;
      case Role::Learner: state_ = LearnerState{}; break;
    }
  }

  Agent(AgentId id, State state)
      : id_(std::move(id)), role_(static_cast<Role>(state.index())), state_(std::move(state)) {}

  const AgentId& id() const { return id_; }
  Role role() const { return role_; }
  const State& state() const { return state_; }

  template <class T>
  const T& as() const {
    return std::get<T>(state_);
  }

  /// The durable part of the state, as written to stable storage.
  nlohmann::json durable() const {
    switch (role_) {
      case Role::Acceptor: return as<AcceptorState>().to_json();
      case Role::Coordinator: return as<CoordinatorState>().durable_json();
      case Role::Learner:
        return {{"learned", value_to_json(as<LearnerState>().learned)}};
      case Role::Proposer: return nlohmann::json::object();
    }
    return nullptr;
  }

  /// Full state, for digests and debugging.
  nlohmann::json snapshot() const {
    return std::visit([](const auto& s) { return s.to_json(); }, state_);
  }

  Effects handle(const Message& m, const Environment& env) {
    Effects fx;
    switch (role_) {
      case Role::Acceptor: {
        const auto& s = as<AcceptorState>();
        AcceptorStep step;
        if (auto* p = m.as<msg::Phase1a>()) {
          step = acceptor_on_phase1a(s, id_, *p, env.scheme);
        } else if (auto* p = m.as<msg::Phase2a>()) {
          step = acceptor_on_vote_request(s, id_, p->round, p->value,
                                          env.roster.learners);
        } else {
          return fx;
        }
        state_ = step.state;
        if (step.persisted) fx.persist = step.state.to_json();
        fx.sends = std::move(step.out);
        return fx;
      }
      case Role::Coordinator: {
        const auto& s = as<CoordinatorState>();
        CoordinatorStep step;
        if (auto* p = m.as<msg::Phase1b>()) {
          step = coordinator_on_phase1b(s, id_, m.from, *p, env);
        } else if (auto* p = m.as<msg::Propose>()) {
          step = coordinator_on_propose(s, id_, p->value, env);
        } else {
          return fx;
        }
        state_ = step.state;
        if (step.persisted) fx.persist = step.state.durable_json();
        fx.sends = std::move(step.out);
        return fx;
      }
      case Role::Proposer: {
        const auto& s = as<ProposerState>();
        ProposerStep step;
        if (auto* p = m.as<msg::Any>()) {
          step = proposer_on_any(s, id_, *p, env.roster.acceptors);
        } else if (auto* p = m.as<msg::Propose>()) {
          step = proposer_on_propose(s, id_, p->value, env.roster.acceptors);
        } else {
          return fx;
        }
        state_ = step.state;
        fx.sends = std::move(step.out);
        return fx;
      }
      case Role::Learner: {
        auto* p = m.as<msg::Phase2b>();
        if (!p) return fx;
        LearnerStep step =
            learner_on_phase2b(as<LearnerState>(), m.from, *p, env.config, env.scheme);
        state_ = step.state;
        if (step.persisted) fx.persist = durable();
        fx.learned = step.learned_now;
        fx.conflict = step.conflict;
        return fx;
      }
    }
    return fx;
  }

  /// A coordinator's recovery trigger: start `round` if given, else the next
  /// classic round this coordinator owns. Stale or foreign rounds are
  /// ignored, as are timeouts delivered to other roles.
  Effects on_timeout(std::optional<RoundNumber> round, const Environment& env) {
    Effects fx;
    if (role_ != Role::Coordinator) return fx;
    const auto& s = as<CoordinatorState>();
    const auto r = round ? round
                         : env.scheme.next_owned(id_, s.current_round, RoundType::Classic);
    if (!r || *r <= s.current_round || env.scheme.coordinator(*r) != id_) return fx;
    CoordinatorStep step =
        coordinator_start_round(s, id_, env.scheme.id(*r), env.roster.acceptors);
    state_ = step.state;
    fx.persist = step.state.durable_json();
    fx.sends = std::move(step.out);
    return fx;
  }

  /// Rebuilds an agent from its last durable write. Volatile state resets.
  static Agent recover(const AgentId& id, Role role, const nlohmann::json& durable) {
    switch (role) {
      case Role::Acceptor: return Agent(id, State{acceptor_recover(durable)});
      case Role::Coordinator: return Agent(id, State{coordinator_recover(durable)});
      case Role::Learner: return Agent(id, State{learner_recover(durable)});
      case Role::Proposer: return Agent(id, State{ProposerState{}});
    }
    return Agent(id, role);
  }

 private:
  AgentId id_;
  Role role_;
  State state_;
};

}  // namespace fpaxos
