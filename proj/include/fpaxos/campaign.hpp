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
 *  \brief Seeded randomized safety campaigns.
 *
 *  Each seed expands into one scenario: 3 to 5 acceptors under either
 *  sizing policy, two or three competing proposers, one or two
 *  coordinators with periodic recovery timeouts, message loss up to 0.3,
 *  duplication up to 0.2, and up to F acceptor crash-recoveries.
 */

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fpaxos/checker.hpp"
#include "fpaxos/scenario.hpp"
#include "fpaxos/simnet.hpp"

namespace fpaxos {

struct CampaignLimits {
  double max_drop = 0.3;
  double max_duplicate = 0.2;
};

inline Scenario random_scenario(std::uint64_t seed, const CampaignLimits& lim = {}) {
  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };

  Scenario s;
  s.name = "campaign-" + std::to_string(seed);
  s.n_acceptors = static_cast<std::uint32_t>(pick(3, 5));
  s.policy = pick(0, 1) ? QuorumPolicy{policy::MaximizeF{}} : QuorumPolicy{policy::MaximizeE{}};
  s.coordinators = pick(0, 3) == 0 ? std::vector<AgentId>{"c0", "c1"} : std::vector<AgentId>{"c0"};
  s.proposers = pick(0, 2) == 0 ? std::vector<AgentId>{"p0", "p1", "p2"}
                                : std::vector<AgentId>{"p0", "p1"};
  s.learners = {"l0", "l1"};
  s.rule = pick(0, 1) ? RuleKind::Simplified : RuleKind::Original;
  s.factorized = pick(0, 1) == 1;
  s.until = 400;

  const char* values[] = {"x", "y", "z"};
  for (std::size_t i = 0; i < s.proposers.size(); ++i) {
    s.proposals.push_back({pick(0, 8), s.proposers[i], values[i]});
  }

  const RoundScheme scheme = s.scheme();
  if (!s.factorized) s.timeouts.push_back({0, scheme.coordinator(1), RoundNumber{1}});
  for (std::uint64_t t = pick(10, 20); t < 200; t += pick(12, 25)) {
    s.timeouts.push_back({t, s.coordinators[pick(0, s.coordinators.size() - 1)], std::nullopt});
  }

  auto& f = s.faults;
  f.seed = rng();
  f.drop_probability = static_cast<double>(pick(0, 30)) / 100.0 * (lim.max_drop / 0.3);
  f.duplicate_probability = static_cast<double>(pick(0, 20)) / 100.0 * (lim.max_duplicate / 0.2);
  f.delay_min = 1;
  f.delay_max = pick(1, 4);

  const std::uint32_t max_crashes = s.config().max_faults_classic;
  std::vector<AgentId> acceptors = s.acceptor_ids();
  const auto crashes = pick(0, max_crashes);
  for (std::uint64_t i = 0; i < crashes; ++i) {
    const auto victim_index = pick(i, acceptors.size() - 1);
    std::swap(acceptors[i], acceptors[victim_index]);
    const AgentId& victim = acceptors[i];
    const std::uint64_t down = pick(0, 60);
    ScriptedFault crash;
    if (pick(0, 3) == 0) {
      crash.kind = ScriptedFault::Kind::CrashBeforeSend;
    } else {
      crash.kind = ScriptedFault::Kind::Crash;
    }
    crash.at = down;
    crash.agent = victim;
    ScriptedFault up;
    up.kind = ScriptedFault::Kind::Recover;
    up.at = down + pick(1, 40);
    up.agent = victim;
    f.scripted.push_back(crash);
    f.scripted.push_back(up);
  }
  return s;
}

struct CampaignRun {
  std::uint64_t seed = 0;
  bool pass = true;
  bool decided = false;
  std::vector<Verdict> verdicts;
};

struct CampaignResult {
  std::vector<CampaignRun> runs;

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [](const CampaignRun& r) { return !r.pass; }));
  }
  std::size_t decided() const {
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [](const CampaignRun& r) { return r.decided; }));
  }
};

inline CampaignRun run_campaign_seed(std::uint64_t seed, const CampaignLimits& lim = {},
                                     const RuleFunction& rule_override = {}) {
  const Trace trace = run(random_scenario(seed, lim), std::nullopt, rule_override);
  CampaignRun r;
  r.seed = seed;
  r.verdicts = check_all(trace);
  r.pass = std::all_of(r.verdicts.begin(), r.verdicts.end(), [](const Verdict& v) { return v.pass; });
  r.decided = decided_value(trace).has_value();
  return r;
}

/// Runs seeds first_seed .. first_seed + count - 1, spread over `workers`
/// threads. Results come back in seed order regardless of scheduling.
inline CampaignResult run_campaign(std::uint64_t first_seed, std::size_t count,
                                   unsigned workers = 1, const CampaignLimits& lim = {},
                                   const RuleFunction& rule_override = {}) {
  CampaignResult result;
  result.runs.resize(count);
  workers = std::max(1u, workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        result.runs[i] = run_campaign_seed(first_seed + i, lim, rule_override);
      }
    });
  }
  for (auto& t : pool) t.join();
  return result;
}

}  // namespace fpaxos
