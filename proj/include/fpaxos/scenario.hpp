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
 *  \brief Simulation scenarios and fault plans, plus their JSON form.
 *
 *  A scenario file is one JSON document:
 *
 *      {
 *        "format_version": 1,
 *        "name": "collision",
 *        "acceptors": 4,                   // named a0 .. a3
 *        "policy": "max-e",                // or "max-f" or {"e": 1, "f": 1}
 *        "coordinators": ["c0"],
 *        "proposers": ["p0", "p1"],
 *        "learners": ["l0"],
 *        "fast_rounds": "odd",             // "all", "none" or [1, 3, ...]
 *        "rule": "simplified",
 *        "factorized": true,
 *        "proposals": [{"at": 0, "proposer": "p0", "value": "x"}],
 *        "timeouts": [{"at": 10, "coordinator": "c0", "round": 2}],
 *        "faults": {
 *          "seed": 7, "drop": 0.0, "duplicate": 0.0, "delay": [1, 1],
 *          "channel_delays": [{"from": "p0", "to": "a2", "delay": 3}],
 *          "scripted": [{"at": 5, "crash": "a0"}, {"at": 9, "recover": "a0"},
 *                       {"at": 2, "crash_before_send": "a1"},
 *                       {"at": 0, "drop": {"from": "*", "to": "a2",
 *                                          "type": "phase2a", "count": 1}}]
 *        },
 *        "until": 200,
 *        "expect": {"decision": true, "value": "x", "latency": 2}
 *      }
 *
 *  Every field except "acceptors" has a default. A timeout without "round"
 *  starts the coordinator's next classic round.
 */

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpaxos/common.hpp"
#include "fpaxos/quorum.hpp"
#include "fpaxos/round_scheme.hpp"
#include "fpaxos/rules.hpp"

namespace fpaxos {

struct ChannelDelay {
  AgentId from;
  AgentId to;
  std::uint64_t delay = 1;
};

struct ScriptedFault {
  enum class Kind { Crash, Recover, CrashBeforeSend, Drop };
  Kind kind = Kind::Crash;
  std::uint64_t at = 0;
  AgentId agent;  // Crash, Recover, CrashBeforeSend
  // Drop: messages matching from/to/type ("*" matches anything).
  AgentId from = "*";
  AgentId to = "*";
  std::string type = "*";
  std::uint32_t count = 1;
};

struct FaultPlan {
  double drop_probability = 0.0;
  double duplicate_probability = 0.0;
  std::uint64_t delay_min = 1;
  std::uint64_t delay_max = 1;
  std::uint64_t seed = 0;
  std::vector<ChannelDelay> channel_delays;
  std::vector<ScriptedFault> scripted;
};

struct ScriptedProposal {
  std::uint64_t at = 0;
  AgentId proposer;
  Value value;
};

struct ScriptedTimeout {
  std::uint64_t at = 0;
  AgentId coordinator;
  std::optional<RoundNumber> round;
};

struct Expectation {
  std::optional<bool> decision;
  MaybeValue value;
  std::optional<std::uint64_t> latency;
};

struct Scenario {
  std::string name = "unnamed";
  std::uint32_t n_acceptors = 1;
  QuorumPolicy policy = policy::MaximizeF{};
  std::vector<AgentId> coordinators{"c0"};
  std::vector<AgentId> proposers{"p0"};
  std::vector<AgentId> learners{"l0"};
  nlohmann::json fast_rounds = "odd";
  RuleKind rule = RuleKind::Simplified;
  bool factorized = false;
  std::vector<ScriptedProposal> proposals;
  std::vector<ScriptedTimeout> timeouts;
  FaultPlan faults;
  std::uint64_t until = 1000;
  Expectation expect;

  std::vector<AgentId> acceptor_ids() const {
    std::vector<AgentId> ids;
    for (std::uint32_t i = 0; i < n_acceptors; ++i) ids.push_back("a" + std::to_string(i));
    return ids;
  }

  QuorumConfig config() const { return derive_config(n_acceptors, policy); }

  RoundScheme scheme() const { return RoundScheme::from_json(coordinators, fast_rounds); }
};

inline void validate_scenario(const Scenario& s) {
  if (s.n_acceptors < 1) throw InvalidArgument("scenario needs at least one acceptor");
  (void)s.config();  // throws on a bad policy
  if (s.coordinators.empty()) throw InvalidArgument("scenario needs a coordinator");
  if (s.learners.empty()) throw InvalidArgument("scenario needs a learner");

  std::set<AgentId> all;
  auto add = [&all](const std::vector<AgentId>& ids) {
    for (const auto& id : ids) {
      if (id.empty() || id == "*" || id == "client") {
        throw InvalidArgument("reserved agent name '" + id + "'");
      }
      if (!all.insert(id).second) throw InvalidArgument("duplicate agent name '" + id + "'");
    }
  };
  add(s.acceptor_ids());
  add(s.coordinators);
  add(s.proposers);
  add(s.learners);

  auto member = [](const std::vector<AgentId>& v, const AgentId& id) {
    return std::find(v.begin(), v.end(), id) != v.end();
  };
  for (const auto& p : s.proposals) {
    if (!member(s.proposers, p.proposer)) {
      throw InvalidArgument("proposal names unknown proposer '" + p.proposer + "'");
    }
  }
  const auto scheme = s.scheme();
  for (const auto& t : s.timeouts) {
    if (!member(s.coordinators, t.coordinator)) {
      throw InvalidArgument("timeout names unknown coordinator '" + t.coordinator + "'");
    }
    if (t.round && (*t.round == 0 || scheme.coordinator(*t.round) != t.coordinator)) {
      throw InvalidArgument("round " + std::to_string(*t.round) + " is not owned by " +
                            t.coordinator);
    }
  }
  const auto& f = s.faults;
  if (f.drop_probability < 0 || f.drop_probability > 1 ||
      f.duplicate_probability < 0 || f.duplicate_probability > 1) {
    throw InvalidArgument("fault probabilities must lie in [0, 1]");
  }
  if (f.delay_min > f.delay_max) throw InvalidArgument("delay min exceeds max");
  for (const auto& c : f.channel_delays) {
    if (!all.count(c.from) || !all.count(c.to)) {
      throw InvalidArgument("channel delay names unknown agent");
    }
  }
  for (const auto& sf : f.scripted) {
    if (sf.kind == ScriptedFault::Kind::Drop) {
      if ((sf.from != "*" && !all.count(sf.from)) || (sf.to != "*" && !all.count(sf.to))) {
        throw InvalidArgument("drop directive names unknown agent");
      }
    } else if (!all.count(sf.agent)) {
      throw InvalidArgument("fault names unknown agent '" + sf.agent + "'");
    }
  }
  if (s.factorized) {
    if (scheme.type(1) != RoundType::Fast) {
      throw InvalidArgument("factorized start needs round 1 to be fast");
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json policy_to_json(const QuorumPolicy& p) {
  if (auto* e = std::get_if<policy::Explicit>(&p)) return {{"e", e->e}, {"f", e->f}};
  return policy_name(p);
}

inline QuorumPolicy policy_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_policy(j.get<std::string>());
  if (j.is_object()) {
    return policy::Explicit{j.at("e").get<std::uint32_t>(), j.at("f").get<std::uint32_t>()};
  }
  throw InvalidArgument("policy must be a name or {e, f}");
}

inline nlohmann::json to_json(const Scenario& s) {
  using nlohmann::json;
  json j;
  j["format_version"] = kFormatVersion;
  j["name"] = s.name;
  j["acceptors"] = s.n_acceptors;
  j["policy"] = policy_to_json(s.policy);
  j["coordinators"] = s.coordinators;
  j["proposers"] = s.proposers;
  j["learners"] = s.learners;
  j["fast_rounds"] = s.fast_rounds;
  j["rule"] = to_string(s.rule);
  j["factorized"] = s.factorized;
  j["proposals"] = json::array();
  for (const auto& p : s.proposals) {
    j["proposals"].push_back({{"at", p.at}, {"proposer", p.proposer}, {"value", p.value}});
  }
  j["timeouts"] = json::array();
  for (const auto& t : s.timeouts) {
    json tj{{"at", t.at}, {"coordinator", t.coordinator}};
    if (t.round) tj["round"] = *t.round;
    j["timeouts"].push_back(tj);
  }
  const auto& f = s.faults;
  json fj{{"seed", f.seed},
          {"drop", f.drop_probability},
          {"duplicate", f.duplicate_probability},
          {"delay", {f.delay_min, f.delay_max}},
          {"channel_delays", json::array()},
          {"scripted", json::array()}};
  for (const auto& c : f.channel_delays) {
    fj["channel_delays"].push_back({{"from", c.from}, {"to", c.to}, {"delay", c.delay}});
  }
  for (const auto& sf : f.scripted) {
    json e{{"at", sf.at}};
    switch (sf.kind) {
      case ScriptedFault::Kind::Crash: e["crash"] = sf.agent; break;
      case ScriptedFault::Kind::Recover: e["recover"] = sf.agent; break;
      case ScriptedFault::Kind::CrashBeforeSend: e["crash_before_send"] = sf.agent; break;
      case ScriptedFault::Kind::Drop:
        e["drop"] = {{"from", sf.from}, {"to", sf.to}, {"type", sf.type}, {"count", sf.count}};
        break;
    }
    fj["scripted"].push_back(e);
  }
  j["faults"] = fj;
  j["until"] = s.until;
  json ex = json::object();
  if (s.expect.decision) ex["decision"] = *s.expect.decision;
  if (s.expect.value) ex["value"] = *s.expect.value;
  if (s.expect.latency) ex["latency"] = *s.expect.latency;
  j["expect"] = ex;
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw InvalidArgument("scenario must be a JSON object");
    if (j.value("format_version", kFormatVersion) != kFormatVersion) {
      throw InvalidArgument("unsupported scenario format_version");
    }
    Scenario s;
    s.name = j.value("name", s.name);
    s.n_acceptors = j.at("acceptors").get<std::uint32_t>();
    if (j.contains("policy")) s.policy = policy_from_json(j.at("policy"));
    s.coordinators = j.value("coordinators", s.coordinators);
    s.proposers = j.value("proposers", s.proposers);
    s.learners = j.value("learners", s.learners);
    if (j.contains("fast_rounds")) s.fast_rounds = j.at("fast_rounds");
    if (j.contains("rule")) s.rule = parse_rule_kind(j.at("rule").get<std::string>());
    s.factorized = j.value("factorized", false);
    for (const auto& p : j.value("proposals", nlohmann::json::array())) {
      s.proposals.push_back({p.value("at", std::uint64_t{0}), p.at("proposer").get<std::string>(),
                             p.at("value").get<std::string>()});
    }
    for (const auto& t : j.value("timeouts", nlohmann::json::array())) {
      ScriptedTimeout st{t.value("at", std::uint64_t{0}), t.at("coordinator").get<std::string>(),
                         std::nullopt};
      if (t.contains("round")) st.round = t.at("round").get<RoundNumber>();
      s.timeouts.push_back(st);
    }
    if (j.contains("faults")) {
      const auto& fj = j.at("faults");
      auto& f = s.faults;
      f.seed = fj.value("seed", std::uint64_t{0});
      f.drop_probability = fj.value("drop", 0.0);
      f.duplicate_probability = fj.value("duplicate", 0.0);
      if (fj.contains("delay")) {
        const auto& d = fj.at("delay");
        if (!d.is_array() || d.size() != 2) throw InvalidArgument("delay must be [min, max]");
        f.delay_min = d[0].get<std::uint64_t>();
        f.delay_max = d[1].get<std::uint64_t>();
      }
      for (const auto& c : fj.value("channel_delays", nlohmann::json::array())) {
        f.channel_delays.push_back({c.at("from").get<std::string>(), c.at("to").get<std::string>(),
                                    c.at("delay").get<std::uint64_t>()});
      }
      for (const auto& e : fj.value("scripted", nlohmann::json::array())) {
        ScriptedFault sf;
        sf.at = e.value("at", std::uint64_t{0});
        if (e.contains("crash")) {
          sf.kind = ScriptedFault::Kind::Crash;
          sf.agent = e.at("crash").get<std::string>();
        } else if (e.contains("recover")) {
          sf.kind = ScriptedFault::Kind::Recover;
          sf.agent = e.at("recover").get<std::string>();
        } else if (e.contains("crash_before_send")) {
          sf.kind = ScriptedFault::Kind::CrashBeforeSend;
          sf.agent = e.at("crash_before_send").get<std::string>();
        } else if (e.contains("drop")) {
          const auto& d = e.at("drop");
          sf.kind = ScriptedFault::Kind::Drop;
          sf.from = d.value("from", std::string("*"));
          sf.to = d.value("to", std::string("*"));
          sf.type = d.value("type", std::string("*"));
          sf.count = d.value("count", 1u);
        } else {
          throw InvalidArgument("unknown scripted fault");
        }
        f.scripted.push_back(sf);
      }
    }
    s.until = j.value("until", s.until);
    if (j.contains("expect")) {
      const auto& ex = j.at("expect");
      if (ex.contains("decision")) s.expect.decision = ex.at("decision").get<bool>();
      if (ex.contains("value")) s.expect.value = ex.at("value").get<std::string>();
      if (ex.contains("latency")) s.expect.latency = ex.at("latency").get<std::uint64_t>();
    }
    validate_scenario(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed scenario: ") + e.what());
  }
}

}  // namespace fpaxos
