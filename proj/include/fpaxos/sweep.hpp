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
 *  \brief Exhaustive small-scope comparison of the coordinator rules.
 *
 *  For every N up to a bound, every configuration either sizing policy
 *  produces, both types of round k, and both quorum kinds for the report
 *  set, the sweep enumerates every assignment of per-acceptor reports drawn
 *  from round {0, 1, 2} and value {x, y, z} (round 0 carries no value).
 *  Each case must satisfy:
 *
 *  - O4 by subset enumeration == O4 in closed form == count >= threshold;
 *  - at most one value passes O4;
 *  - a value passing O4 with fast k holds a majority of the reports;
 *  - the original rule gives the same answer with either O4 evaluator;
 *  - original == intermediate, and most-voted == simplified;
 *  - whenever the original rule mandates w, the simplified rule does too.
 *
 *  Report sets whose round k is classic but which hold more than one value
 *  at k cannot arise (a classic round carries one Phase 2a value) and are
 *  skipped.
 */

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpaxos/checker.hpp"
#include "fpaxos/quorum.hpp"
#include "fpaxos/rules.hpp"

namespace fpaxos {

inline constexpr std::uint32_t kSweepMaxN = 6;

struct SweepCase {
  QuorumConfig config;
  RoundType k_type = RoundType::Fast;
  RoundType quorum_kind = RoundType::Classic;
  ReportSet reports;

  std::vector<AgentId> universe() const {
    std::vector<AgentId> u;
    for (std::uint32_t i = 0; i < config.n_acceptors; ++i) u.push_back("a" + std::to_string(i));
    return u;
  }

  nlohmann::json to_json() const {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : reports) {
      reps.push_back({{"acceptor", r.acceptor},
                      {"round", r.voted_round},
                      {"value", value_to_json(r.voted_value)}});
    }
    return {{"n", config.n_acceptors},
            {"e", config.max_faults_fast},
            {"f", config.max_faults_classic},
            {"k_round_type", to_string(k_type)},
            {"quorum_kind", to_string(quorum_kind)},
            {"reports", reps}};
  }

  static SweepCase from_json(const nlohmann::json& j) {
    SweepCase c;
    c.config = make_config(j.at("n").get<std::uint32_t>(), j.at("e").get<std::uint32_t>(),
                           j.at("f").get<std::uint32_t>());
    c.k_type = parse_round_type(j.at("k_round_type").get<std::string>());
    c.quorum_kind = parse_round_type(j.at("quorum_kind").get<std::string>());
    for (const auto& r : j.at("reports")) {
      c.reports.push_back({r.at("acceptor").get<std::string>(), r.at("round").get<RoundNumber>(),
                           value_from_json(r.at("value"))});
    }
    return c;
  }
};

struct SweepStats {
  std::uint64_t cases = 0;
  std::uint64_t skipped_unreachable = 0;
  std::uint64_t o4_evaluations = 0;
  std::uint64_t oracle_threshold_disagreements = 0;
  std::uint64_t oracle_closed_form_disagreements = 0;
  std::uint64_t uniqueness_violations = 0;
  std::uint64_t majority_violations = 0;
  std::uint64_t evaluator_disagreements = 0;
  std::uint64_t chain_violations = 0;
  std::uint64_t refinement_violations = 0;
  std::uint64_t simplified_stricter = 0;  // simplified mandates, original free
  std::optional<SweepCase> counterexample;
  std::string counterexample_problem;
  std::optional<SweepCase> stricter_witness;

  std::uint64_t violations() const {
    return oracle_threshold_disagreements + oracle_closed_form_disagreements +
           uniqueness_violations + majority_violations + evaluator_disagreements +
           chain_violations + refinement_violations;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"cases", cases},
                     {"skipped_unreachable", skipped_unreachable},
                     {"o4_evaluations", o4_evaluations},
                     {"oracle_threshold_disagreements", oracle_threshold_disagreements},
                     {"oracle_closed_form_disagreements", oracle_closed_form_disagreements},
                     {"uniqueness_violations", uniqueness_violations},
                     {"majority_violations", majority_violations},
                     {"evaluator_disagreements", evaluator_disagreements},
                     {"chain_violations", chain_violations},
                     {"refinement_violations", refinement_violations},
                     {"simplified_stricter", simplified_stricter}};
    if (counterexample) {
      j["counterexample"] = counterexample->to_json();
      j["counterexample_problem"] = counterexample_problem;
    }
    if (stricter_witness) j["stricter_witness"] = stricter_witness->to_json();
    return j;
  }
};

using SimpleRule = std::function<CoordinatorChoice(const ReportSet&)>;

/// Checks one case and returns the problems found (empty when clean).
/// Counters in `stats` are bumped when it is given.
inline std::vector<std::string> check_sweep_case(const SweepCase& c,
                                                 const SimpleRule& simplified,
                                                 SweepStats* stats = nullptr) {
  SweepStats scratch;
  SweepStats& st = stats ? *stats : scratch;
  std::vector<std::string> problems;
  auto problem = [&](std::uint64_t& counter, std::string what) {
    ++counter;
    problems.push_back(std::move(what));
  };

  const VoteTally tally = tally_votes(c.reports);
  const auto universe = c.universe();
  const std::uint32_t threshold = o4_threshold(c.config, c.quorum_kind, c.k_type);

  std::vector<Value> passing;
  if (tally.max_round > 0) {
    for (const auto& [w, count] : tally.value_counts) {
      ++st.o4_evaluations;
      const bool oracle = o4_holds_oracle(c.reports, universe, c.config, c.k_type, w);
      const bool closed = o4_holds_closed_form(c.reports, c.config, c.k_type, w);
      const bool counted = count >= threshold;
      if (oracle != closed) {
        problem(st.oracle_closed_form_disagreements, "oracle and closed form disagree on " + w);
      }
      if (oracle != counted) {
        problem(st.oracle_threshold_disagreements,
                "oracle says " + std::string(oracle ? "O4" : "not O4") + " for " + w + " with T=" +
                    std::to_string(count) + ", threshold " + std::to_string(threshold));
      }
      if (oracle) {
        passing.push_back(w);
        if (c.k_type == RoundType::Fast && count < tally.reporters / 2 + 1) {
          problem(st.majority_violations, w + " passes O4 without a majority of Q");
        }
      }
    }
  }
  if (passing.size() > 1) {
    problem(st.uniqueness_violations, "O4 holds for " + passing[0] + " and " + passing[1]);
  }

  RuleContext ctx;
  ctx.config = c.config;
  ctx.k_type = c.k_type;
  ctx.quorum_kind = c.quorum_kind;
  ctx.universe = universe;

  std::optional<CoordinatorChoice> original;
  try {
    ctx.evaluator = O4Evaluator::Oracle;
    const auto by_oracle = pick_value_original(c.reports, ctx);
    const auto by_oracle_intermediate = pick_value_intermediate(c.reports, ctx);
    ctx.evaluator = O4Evaluator::Cardinality;
    const auto by_count = pick_value_original(c.reports, ctx);
    const auto by_count_intermediate = pick_value_intermediate(c.reports, ctx);
    if (!(by_oracle == by_count) || !(by_oracle_intermediate == by_count_intermediate)) {
      problem(st.evaluator_disagreements, "original rule depends on the O4 evaluator");
    }
    if (!(by_oracle == by_oracle_intermediate)) {
      problem(st.chain_violations, "original " + by_oracle.to_string() + " vs intermediate " +
                                       by_oracle_intermediate.to_string());
    }
    original = by_oracle;
  } catch (const InvalidArgument& e) {
    problem(st.uniqueness_violations, e.what());
  }

  const auto most_voted = pick_value_most_voted(c.reports);
  const auto simple = simplified(c.reports);
  if (!(most_voted == simple)) {
    problem(st.chain_violations,
            "most-voted " + most_voted.to_string() + " vs simplified " + simple.to_string());
  }
  if (original) {
    if (original->is_mandated() && !(simple == *original)) {
      problem(st.refinement_violations,
              "original " + original->to_string() + " but simplified " + simple.to_string());
    }
    if (original->is_free() && simple.is_mandated()) {
      ++st.simplified_stricter;
      if (!st.stricter_witness) st.stricter_witness = c;
    }
  }
  if (!problems.empty() && !st.counterexample) {
    st.counterexample = c;
    st.counterexample_problem = problems.front();
  }
  return problems;
}

/// Runs the exhaustive sweep for every N in 1..n_max (n_max <= 6).
inline Verdict rule_equivalence_sweep(std::uint32_t n_max,
                                      const SimpleRule& simplified = pick_value_simplified,
                                      SweepStats* stats_out = nullptr) {
  if (n_max < 1 || n_max > kSweepMaxN) {
    throw InvalidArgument("sweep n_max must lie in 1.." + std::to_string(kSweepMaxN));
  }
  static constexpr std::array<const char*, 3> kAlphabet{"x", "y", "z"};
  constexpr std::uint32_t kChoices = 1 + 2 * kAlphabet.size();  // (0,null) + rounds 1..2

  SweepStats st;
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    std::vector<QuorumConfig> configs{derive_config(n, policy::MaximizeE{})};
    const auto max_f = derive_config(n, policy::MaximizeF{});
    if (!(max_f == configs.front())) configs.push_back(max_f);

    for (const auto& config : configs) {
      for (RoundType k_type : {RoundType::Fast, RoundType::Classic}) {
        for (RoundType kind : {RoundType::Classic, RoundType::Fast}) {
          if (kind == RoundType::Fast && config.fast_quorum_size == config.classic_quorum_size) {
            continue;
          }
          const std::uint32_t q = quorum_size(config, kind);
          std::vector<std::uint32_t> digits(q, 0);
          while (true) {
            SweepCase c{config, k_type, kind, {}};
            for (std::uint32_t i = 0; i < q; ++i) {
              Phase1bReport r{"a" + std::to_string(i), 0, std::nullopt};
              if (digits[i] > 0) {
                r.voted_round = 1 + (digits[i] - 1) / kAlphabet.size();
                r.voted_value = kAlphabet[(digits[i] - 1) % kAlphabet.size()];
              }
              c.reports.push_back(std::move(r));
            }
            if (k_type == RoundType::Classic && tally_votes(c.reports).value_counts.size() > 1) {
              ++st.skipped_unreachable;
            } else {
              ++st.cases;
              check_sweep_case(c, simplified, &st);
            }
            std::uint32_t i = 0;
            while (i < q && ++digits[i] == kChoices) digits[i++] = 0;
            if (i == q) break;
          }
        }
      }
    }
  }

  Verdict v;
  v.property = "rule-equivalence";
  v.pass = st.violations() == 0;
  v.detail = std::to_string(st.cases) + " cases, " + std::to_string(st.violations()) +
             " violations, " + std::to_string(st.simplified_stricter) +
             " where only the simplified rule mandates";
  if (st.counterexample) {
    v.witness = st.counterexample->to_json();
    v.detail += "; first problem: " + st.counterexample_problem;
  }
  if (stats_out) *stats_out = std::move(st);
  return v;
}

}  // namespace fpaxos
