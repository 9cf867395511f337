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
 *  \brief Safety verdicts over simulation traces.
 *
 *  Checkers are pure functions of a trace. A failing verdict names the
 *  first offending record so the run can be replayed and inspected.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpaxos/common.hpp"
#include "fpaxos/messages.hpp"
#include "fpaxos/protocol.hpp"
#include "fpaxos/scenario.hpp"
#include "fpaxos/trace.hpp"

namespace fpaxos {

struct Verdict {
  std::string property;
  bool pass = true;
  std::optional<std::uint64_t> position;  // first violating record
  std::string detail;
  nlohmann::json witness;  // counterexample for non-trace checks

  nlohmann::json to_json() const {
    nlohmann::json j{{"property", property}, {"pass", pass}, {"detail", detail}};
    if (position) j["position"] = *position;
    if (!witness.is_null()) j["witness"] = witness;
    return j;
  }

  std::string to_string() const {
    std::string s = (pass ? "PASS " : "FAIL ") + property;
    if (position) s += " @" + std::to_string(*position);
    if (!detail.empty()) s += ": " + detail;
    return s;
  }

  static Verdict ok(std::string property, std::string detail = {}) {
    return Verdict{std::move(property), true, std::nullopt, std::move(detail), nullptr};
  }
  static Verdict fail(std::string property, std::uint64_t pos, std::string detail) {
    return Verdict{std::move(property), false, pos, std::move(detail), nullptr};
  }
};

/// Fails iff two learn events anywhere in the trace carry different values.
inline Verdict check_agreement(const Trace& trace) {
  MaybeValue first;
  std::uint64_t first_pos = 0;
  for (const auto& r : trace.records) {
    for (const MaybeValue* v : {&r.learned, &r.conflict}) {
      if (!*v) continue;
      if (!first) {
        first = **v;
        first_pos = r.seq;
      } else if (**v != *first) {
        return Verdict::fail("agreement", r.seq,
                             r.agent + " learned " + **v + " but record " +
                                 std::to_string(first_pos) + " learned " + *first);
      }
    }
  }
  return Verdict::ok("agreement", first ? "decided " + *first : "no decision");
}

/// Fails iff some learned value never appeared in a Propose.
inline Verdict check_validity(const Trace& trace) {
  std::set<Value> proposed;
  for (const auto& r : trace.records) {
    if (r.input) {
      if (auto* p = r.input->as<msg::Propose>()) proposed.insert(p->value);
    }
    for (const MaybeValue* v : {&r.learned, &r.conflict}) {
      if (*v && !proposed.count(**v)) {
        return Verdict::fail("validity", r.seq, r.agent + " learned unproposed value " + **v);
      }
    }
  }
  return Verdict::ok("validity");
}

/// Acceptor discipline: one vote per round, no vote below a promise, no
/// regression of durable state (including across recovery), every outbound
/// Phase 1b/2b backed by an earlier durable write, and every vote answering
/// a legitimate Phase 2a.
inline Verdict check_vote_discipline(const Trace& trace) {
  const Scenario sc = scenario_from_json(trace.scenario);
  const RoundScheme scheme = sc.scheme();
  const auto acceptor_ids = sc.acceptor_ids();
  const std::set<AgentId> acceptors(acceptor_ids.begin(), acceptor_ids.end());
  const std::set<AgentId> proposers(sc.proposers.begin(), sc.proposers.end());

  std::map<AgentId, AcceptorState> durable;
  std::map<AgentId, std::set<RoundNumber>> voted;
  std::map<AgentId, std::set<RoundNumber>> any_seen;  // per proposer
  std::set<std::pair<RoundNumber, Value>> coordinator_2a;

  const std::string name = "vote-discipline";
  for (const auto& r : trace.records) {
    const bool live = r.kind == "deliver" || r.kind == "inject" || r.kind == "timeout";
    if (live && proposers.count(r.agent) && r.input) {
      if (auto* a = r.input->as<msg::Any>()) any_seen[r.agent].insert(a->round);
    }
    if (live && !acceptors.count(r.agent) && !proposers.count(r.agent)) {
      for (const auto& s : r.sends) {
        if (auto* p = s.msg.as<msg::Phase2a>()) coordinator_2a.insert({p->round, p->value});
      }
    }
    if (!acceptors.count(r.agent)) continue;

    const AcceptorState before = durable[r.agent];
    if (r.kind == "recover") {
      const auto restored = AcceptorState::from_json(r.restored.value_or(nullptr));
      if (!(restored == before)) {
        return Verdict::fail(name, r.seq, r.agent + " recovered to a state other than its last durable write");
      }
      continue;
    }
    AcceptorState after = before;
    if (r.persist) {
      after = AcceptorState::from_json(*r.persist);
      if (r.kind != "init" && (after.promised_round < before.promised_round ||
                               after.last_vote_round < before.last_vote_round)) {
        return Verdict::fail(name, r.seq, r.agent + " regressed its durable state");
      }
      if (after.last_vote_round > after.promised_round) {
        return Verdict::fail(name, r.seq, r.agent + " voted above its promise");
      }
    }

    std::optional<msg::Phase2b> vote;
    for (const auto& s : r.sends) {
      if (auto* p1b = s.msg.as<msg::Phase1b>()) {
        if (!r.persist || after.promised_round < p1b->round) {
          return Verdict::fail(name, r.seq, r.agent + " sent Phase1b without a durable promise");
        }
      } else if (auto* p2b = s.msg.as<msg::Phase2b>()) {
        if (vote && !(*vote == *p2b)) {
          return Verdict::fail(name, r.seq, r.agent + " sent two different votes at once");
        }
        vote = *p2b;
      }
    }
    if (vote) {
      if (!r.persist || after.last_vote_round != vote->round ||
          after.last_vote_value != vote->value) {
        return Verdict::fail(name, r.seq, r.agent + " sent Phase2b without a durable vote");
      }
      if (vote->round < before.promised_round) {
        return Verdict::fail(name, r.seq,
                             r.agent + " voted in round " + std::to_string(vote->round) +
                                 " below its promise " + std::to_string(before.promised_round));
      }
      if (!voted[r.agent].insert(vote->round).second) {
        return Verdict::fail(name, r.seq,
                             r.agent + " voted twice in round " + std::to_string(vote->round));
      }
      const msg::Phase2a* req = r.input ? r.input->as<msg::Phase2a>() : nullptr;
      if (!req || req->round != vote->round || req->value != vote->value) {
        return Verdict::fail(name, r.seq, r.agent + " voted without a matching Phase2a");
      }
      const AgentId& from = r.input->from;
      const bool from_coordinator = from == scheme.coordinator(req->round) &&
                                    coordinator_2a.count({req->round, req->value});
      const bool from_proposer = proposers.count(from) && any_seen[from].count(req->round);
      if (!from_coordinator && !from_proposer) {
        return Verdict::fail(name, r.seq,
                             r.agent + " voted on a Phase2a from " + from +
                                 " that neither the coordinator nor an Any authorized");
      }
    }
    durable[r.agent] = after;
  }
  return Verdict::ok(name);
}

/// Message delays from the first client proposal to the first learn event,
/// or nullopt if nothing was learned.
inline std::optional<std::uint64_t> latency_probe(const Trace& trace) {
  std::optional<std::uint64_t> proposed_at;
  for (const auto& r : trace.records) {
    if (!proposed_at && r.input && r.input->from == "client" && r.input->as<msg::Propose>()) {
      proposed_at = r.time;
    }
    if (r.learned) return r.time - proposed_at.value_or(0);
  }
  return std::nullopt;
}

/// First learned value, if any.
inline MaybeValue decided_value(const Trace& trace) {
  for (const auto& r : trace.records) {
    if (r.learned) return r.learned;
  }
  return std::nullopt;
}

inline std::vector<Verdict> check_all(const Trace& trace) {
  return {check_agreement(trace), check_validity(trace), check_vote_discipline(trace)};
}

}  // namespace fpaxos
