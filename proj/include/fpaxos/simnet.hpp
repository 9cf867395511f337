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
 *  \brief Deterministic discrete-event simulator.
 *
 *  Events run in (time, sequence) order on an integral virtual clock. Each
 *  directed channel (sender, recipient) owns a Mersenne Twister stream
 *  seeded from the master seed and the channel's endpoints, so adding an
 *  agent leaves other channels' draws alone. Every send consumes exactly
 *  four draws: drop, duplicate, delay, duplicate delay.
 */

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpaxos/common.hpp"
#include "fpaxos/messages.hpp"
#include "fpaxos/protocol.hpp"
#include "fpaxos/scenario.hpp"
#include "fpaxos/stable_store.hpp"
#include "fpaxos/trace.hpp"

namespace fpaxos {

/// Hard cap on processed events, independent of `until`.
inline constexpr std::size_t kMaxEvents = 2'000'000;

namespace detail {

inline std::uint64_t fnv1a(std::string_view bytes,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_of(const nlohmann::json& j) {
  static constexpr char hex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a(j.dump());
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = hex[h & 0xf];
  return s;
}

/// Uniform draw in [0, 1) from the top 53 bits.
inline double unit(std::uint64_t u) { return static_cast<double>(u >> 11) * 0x1.0p-53; }

}  // namespace detail

class Simulator {
 public:
  enum class EventKind { Deliver, Inject, Timeout, Crash, Recover, Arm };

  struct Event {
    std::uint64_t time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Deliver;
    AgentId agent;
    std::optional<Message> msg;
    std::optional<RoundNumber> round;
  };

  explicit Simulator(Scenario scenario, RuleFunction rule_override = {})
      : scenario_(std::move(scenario)) {
    validate_scenario(scenario_);
    env_.rule_override = std::move(rule_override);
    env_.config = scenario_.config();
    env_.scheme = scenario_.scheme();
    env_.rule = scenario_.rule;
    env_.roster = {scenario_.acceptor_ids(), scenario_.coordinators, scenario_.proposers,
                   scenario_.learners};
    // Coordinator order fixes round ownership; the other lists do not matter.
    std::sort(env_.roster.proposers.begin(), env_.roster.proposers.end());
    std::sort(env_.roster.learners.begin(), env_.roster.learners.end());
    auto add = [this](const std::vector<AgentId>& ids, Role role) {
      for (const auto& id : ids) agents_.emplace(id, Agent(id, role));
    };
    add(env_.roster.acceptors, Role::Acceptor);
    add(env_.roster.coordinators, Role::Coordinator);
    add(env_.roster.proposers, Role::Proposer);
    add(env_.roster.learners, Role::Learner);
    for (const auto& sf : scenario_.faults.scripted) {
      if (sf.kind == ScriptedFault::Kind::Drop) drops_.push_back(sf);
    }
  }

  const Environment& environment() const { return env_; }

  Trace run() {
    trace_ = Trace{};
    trace_.scenario = to_json(scenario_);
    trace_.seed = scenario_.faults.seed;
    initialize();
    schedule_script();

    std::size_t processed = 0;
    while (!queue_.empty()) {
      Event ev = queue_.top();
      if (ev.time > scenario_.until || processed >= kMaxEvents) {
        trace_.truncated = true;
        break;
      }
      queue_.pop();
      now_ = ev.time;
      trace_.end_time = now_;
      process(ev);
      ++processed;
    }
    return std::move(trace_);
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  void schedule(Event ev) {
    ev.seq = next_event_seq_++;
    queue_.push(std::move(ev));
  }

  TraceRecord& record(const AgentId& agent, std::string kind) {
    TraceRecord r;
    r.seq = trace_.records.size();
    r.time = now_;
    r.agent = agent;
    r.kind = std::move(kind);
    trace_.records.push_back(std::move(r));
    return trace_.records.back();
  }

  void initialize() {
    now_ = 0;
    if (scenario_.factorized) {
      // Phase 1 of round 1 has already run and its coordinator sent Any.
      for (const auto& a : env_.roster.acceptors) {
        agents_.at(a) = Agent(a, Agent::State{AcceptorState{1, 0, std::nullopt}});
      }
      const AgentId& c = env_.scheme.coordinator(1);
      CoordinatorState cs;
      cs.current_round = 1;
      cs.phase = CoordinatorPhase::Phase2aSent;
      agents_.at(c) = Agent(c, Agent::State{cs});
    }
    for (const auto& [id, agent] : agents_) {
      store_.write(id, agent.durable());
      auto& r = record(id, "init");
      r.persist = agent.durable();
      r.digest = detail::digest_of(agent.snapshot());
    }
  }

  void schedule_script() {
    if (scenario_.factorized) {
      const AgentId& c = env_.scheme.coordinator(1);
      for (const auto& p : env_.roster.proposers) {
        schedule({0, 0, EventKind::Inject, p, Message{c, p, msg::Any{1}}, std::nullopt});
      }
    }
    for (const auto& sf : scenario_.faults.scripted) {
      switch (sf.kind) {
        case ScriptedFault::Kind::Crash:
          schedule({sf.at, 0, EventKind::Crash, sf.agent, std::nullopt, std::nullopt});
          break;
        case ScriptedFault::Kind::Recover:
          schedule({sf.at, 0, EventKind::Recover, sf.agent, std::nullopt, std::nullopt});
          break;
        case ScriptedFault::Kind::CrashBeforeSend:
          schedule({sf.at, 0, EventKind::Arm, sf.agent, std::nullopt, std::nullopt});
          break;
        case ScriptedFault::Kind::Drop: break;
      }
    }
    for (const auto& t : scenario_.timeouts) {
      schedule({t.at, 0, EventKind::Timeout, t.coordinator, std::nullopt, t.round});
    }
    for (const auto& p : scenario_.proposals) {
      schedule({p.at, 0, EventKind::Inject, p.proposer,
                Message{"client", p.proposer, msg::Propose{p.value}}, std::nullopt});
      for (const auto& c : env_.roster.coordinators) {
        schedule({p.at, 0, EventKind::Inject, c, Message{"client", c, msg::Propose{p.value}},
                  std::nullopt});
      }
    }
  }

  std::mt19937_64& channel(const AgentId& from, const AgentId& to) {
    auto key = std::make_pair(from, to);
    auto it = channels_.find(key);
    if (it == channels_.end()) {
      std::uint64_t h = detail::fnv1a(std::to_string(scenario_.faults.seed));
      h = detail::fnv1a(std::string_view("\x1f", 1), h);
      h = detail::fnv1a(from, h);
      h = detail::fnv1a(std::string_view("\x1f", 1), h);
      h = detail::fnv1a(to, h);
      it = channels_.emplace(key, std::mt19937_64(h)).first;
    }
    return it->second;
  }

  bool scripted_drop(const Message& m) {
    for (auto& d : drops_) {
      if (d.count == 0 || now_ < d.at) continue;
      if ((d.from == "*" || d.from == m.from) && (d.to == "*" || d.to == m.to) &&
          (d.type == "*" || d.type == type_name(m.body))) {
        --d.count;
        return true;
      }
    }
    return false;
  }

  std::vector<std::uint64_t> transmit(const Message& m) {
    const auto& f = scenario_.faults;
    auto& rng = channel(m.from, m.to);
    const std::uint64_t u_drop = rng(), u_dup = rng(), u_delay = rng(), u_delay2 = rng();
    if (scripted_drop(m) || detail::unit(u_drop) < f.drop_probability) return {};

    std::optional<std::uint64_t> fixed;
    for (const auto& c : f.channel_delays) {
      if (c.from == m.from && c.to == m.to) fixed = c.delay;
    }
    const std::uint64_t span = f.delay_max - f.delay_min + 1;
    auto delay = [&](std::uint64_t u) { return fixed ? *fixed : f.delay_min + u % span; };

    std::vector<std::uint64_t> at{now_ + delay(u_delay)};
    if (detail::unit(u_dup) < f.duplicate_probability) at.push_back(now_ + delay(u_delay2));
    for (auto t : at) schedule({t, 0, EventKind::Deliver, m.to, m, std::nullopt});
    return at;
  }

  static std::string kind_name(EventKind k) {
    switch (k) {
      case EventKind::Deliver: return "deliver";
      case EventKind::Inject: return "inject";
      case EventKind::Timeout: return "timeout";
      case EventKind::Crash: return "crash";
      case EventKind::Recover: return "recover";
      case EventKind::Arm: return "arm";
    }
    return "?";
  }

  void process(const Event& ev) {
    Agent& agent = agents_.at(ev.agent);
    switch (ev.kind) {
      case EventKind::Crash: {
        crashed_.insert(ev.agent);
        record(ev.agent, "crash").digest = detail::digest_of(agent.snapshot());
        return;
      }
      case EventKind::Recover: {
        if (!crashed_.erase(ev.agent)) return;
        agent = Agent::recover(ev.agent, agent.role(), store_.read(ev.agent));
        auto& r = record(ev.agent, "recover");
        r.restored = agent.durable();
        r.digest = detail::digest_of(agent.snapshot());
        return;
      }
      case EventKind::Arm: {
        armed_.insert(ev.agent);
        record(ev.agent, "arm").digest = detail::digest_of(agent.snapshot());
        return;
      }
      default: break;
    }

    if (crashed_.count(ev.agent)) {
      auto& r = record(ev.agent, "discard");
      r.input = ev.msg;
      r.timeout_round = ev.round;
      return;
    }

    Effects fx = ev.kind == EventKind::Timeout ? agent.on_timeout(ev.round, env_)
                                               : agent.handle(*ev.msg, env_);
    // Build the record after the step; transmit() may schedule more events
    // but never appends records.
    TraceRecord rec;
    rec.time = now_;
    rec.agent = ev.agent;
    rec.kind = kind_name(ev.kind);
    rec.input = ev.msg;
    if (ev.kind == EventKind::Timeout) rec.timeout_round = ev.round;
    rec.learned = fx.learned;
    rec.conflict = fx.conflict;

    bool crash_now = false;
    if (fx.persist) {
      store_.write(ev.agent, *fx.persist);
      rec.persist = fx.persist;
      crash_now = armed_.erase(ev.agent) > 0;
    }
    for (auto& m : fx.sends) {
      SendRecord s{m, {}, crash_now};
      if (!crash_now) s.deliver_at = transmit(m);
      rec.sends.push_back(std::move(s));
    }
    rec.digest = detail::digest_of(agent.snapshot());
    rec.seq = trace_.records.size();
    trace_.records.push_back(std::move(rec));

    if (crash_now) {
      crashed_.insert(ev.agent);
      record(ev.agent, "crash").digest = detail::digest_of(agent.snapshot());
    }
  }

  Scenario scenario_;
  Environment env_;
  std::map<AgentId, Agent> agents_;
  std::set<AgentId> crashed_;
  std::set<AgentId> armed_;
  StableStore store_;
  std::vector<ScriptedFault> drops_;
  std::map<std::pair<AgentId, AgentId>, std::mt19937_64> channels_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_event_seq_ = 0;
  std::uint64_t now_ = 0;
  Trace trace_;
};

/// Runs `scenario`; a given seed replaces the scenario's own.
inline Trace run(Scenario scenario, std::optional<std::uint64_t> seed = std::nullopt,
               RuleFunction rule_override = {}) {
  if (seed) scenario.faults.seed = *seed;
  return Simulator(std::move(scenario), std::move(rule_override)).run();
}

/// Re-runs the scenario and seed recorded in `recorded` and checks that the
/// result is byte-identical. Throws NondeterminismError otherwise. A run
/// made with a rule override must be replayed with the same override.
inline Trace replay(const Trace& recorded, RuleFunction rule_override = {}) {
  Scenario s = scenario_from_json(recorded.scenario);
  Trace again = run(std::move(s), recorded.seed, std::move(rule_override));
  const std::string a = to_jsonl(recorded), b = to_jsonl(again);
  if (a != b) {
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    const auto line = std::count(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i), '\n') + 1;
    throw NondeterminismError("replay diverged at trace line " + std::to_string(line));
  }
  return again;
}

}  // namespace fpaxos
