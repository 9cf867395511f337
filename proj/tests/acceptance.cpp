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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fpaxos/fpaxos.hpp"
#include "oracles.hpp"

namespace {

using namespace fpaxos;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> body;
};

Scenario bundled(const std::string& name) {
  std::ifstream in(std::string(FPAXOS_SCENARIO_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(nlohmann::json::parse(ss.str()));
}

std::vector<QuorumConfig> sweep_configs(std::uint32_t n) {
  std::vector<QuorumConfig> out{derive_config(n, policy::MaximizeE{})};
  const auto f = derive_config(n, policy::MaximizeF{});
  if (!(f == out.front())) out.push_back(f);
  return out;
}

Outcome quorum_formulas() {
  std::size_t bad = 0;
  std::string first;
  auto expect = [&](bool ok, std::uint32_t n, const char* what) {
    if (ok) return;
    if (!bad++) first = std::string(what) + " at N=" + std::to_string(n);
  };
  for (std::uint32_t n = 1; n <= 64; ++n) {
    const auto e = derive_config(n, policy::MaximizeE{});
    const auto f = derive_config(n, policy::MaximizeF{});
    const auto oe = oracle::maximize_e(n), of = oracle::maximize_f(n);
    expect(e.max_faults_classic == oe.f && e.max_faults_fast == oe.e, n, "max-e sizing");
    expect(f.max_faults_classic == of.f && f.max_faults_fast == of.e, n, "max-f sizing");
    expect(e.classic_quorum_size == n - e.max_faults_classic, n, "max-e classic = N-F");
    expect(e.fast_quorum_size == n - e.max_faults_fast, n, "max-e fast = N-E");
    expect(f.classic_quorum_size == n - f.max_faults_classic, n, "max-f classic = N-F");
    expect(f.fast_quorum_size == n - f.max_faults_fast, n, "max-f fast = N-E");
    if (n >= 3) {
      expect(e.classic_quorum_size == 2 * n / 3 + 1, n, "max-e classic = floor(2N/3)+1");
      expect(e.fast_quorum_size == 2 * n / 3 + 1, n, "max-e fast = floor(2N/3)+1");
    }
    if (n >= 2) {
      expect(f.classic_quorum_size == n / 2 + 1, n, "max-f classic = floor(N/2)+1");
      expect(f.fast_quorum_size == (3 * n + 3) / 4, n, "max-f fast = ceil(3N/4)");
    }
    expect(f.max_faults_classic >= e.max_faults_classic, n, "max-f F >= max-e F");
    expect(validate_config(n, e.max_faults_fast, e.max_faults_classic) &&
               validate_config(n, f.max_faults_fast, f.max_faults_classic),
           n, "validate_config");
  }
  return {bad == 0, bad ? std::to_string(bad) + " mismatches, first: " + first
                        : "N=1..64, both policies, exact"};
}

Outcome intersection() {
  std::size_t checked = 0;
  for (std::uint32_t n = 1; n <= 7; ++n) {
    for (const QuorumPolicy& p : {QuorumPolicy{policy::MaximizeE{}}, QuorumPolicy{policy::MaximizeF{}}}) {
      const auto c = derive_config(n, p);
      ++checked;
      if (!oracle::quorums_intersect(n, c.classic_quorum_size, c.fast_quorum_size)) {
        return {false, "N=" + std::to_string(n) + " " + policy_name(p)};
      }
    }
  }
  return {true, std::to_string(checked) + " configurations, N=1..7"};
}

// One pass over the exhaustive report space, shared by the three
// rule criteria.
struct RuleSweep {
  std::uint64_t cases = 0;
  std::uint64_t skipped = 0;
  std::uint64_t o4_checks = 0;
  std::uint64_t oracle_disagreements = 0;     // reference vs library oracle
  std::uint64_t threshold_disagreements = 0;  // reference vs count threshold
  std::uint64_t short_form_mismatches = 0;    // 3-arg vs 2-arg threshold, fast k
  std::uint64_t non_unique = 0;
  std::uint64_t refinement_violations = 0;
  std::uint64_t stricter = 0;
  std::string stricter_example;
  bool library_sweep_pass = false;
  std::string library_detail;
};

const RuleSweep& rule_sweep() {
  static const RuleSweep result = [] {
    RuleSweep s;
    for (std::uint32_t n = 1; n <= kSweepMaxN; ++n) {
      const auto universe = oracle::names(n);
      for (const auto& c : sweep_configs(n)) {
        for (RoundType k_type : {RoundType::Fast, RoundType::Classic}) {
          for (RoundType kind : {RoundType::Classic, RoundType::Fast}) {
            if (kind == RoundType::Fast && c.fast_quorum_size == c.classic_quorum_size) continue;
            const auto q_size = quorum_size(c, kind);
            const auto q_k = quorum_size(c, k_type);
            const auto threshold = o4_threshold(c, kind, k_type);
            if (k_type == RoundType::Fast && threshold != o4_threshold(c, kind)) {
              ++s.short_form_mismatches;
            }
            oracle::each_report_set(q_size, [&](const std::vector<oracle::Report>& q) {
              const auto tally = oracle::tally(q);
              if (k_type == RoundType::Classic && tally.size() > 1) {
                ++s.skipped;
                return;
              }
              ++s.cases;
              const ReportSet lib = oracle::to_library(q);
              std::vector<std::string> passing;
              for (const auto& [w, count] : tally) {
                ++s.o4_checks;
                const bool ref = oracle::o4(q, universe, q_k, w);
                if (ref != o4_holds_oracle(lib, universe, c, k_type, w)) ++s.oracle_disagreements;
                if (ref != (count >= threshold)) ++s.threshold_disagreements;
                if (ref) passing.push_back(w);
              }
              if (passing.size() > 1) ++s.non_unique;

              RuleContext ctx;
              ctx.config = c;
              ctx.k_type = k_type;
              ctx.quorum_kind = kind;
              const auto original = pick_value_original(lib, ctx);
              const auto simplified = pick_value_simplified(lib);
              if (original.is_mandated() && simplified != original) ++s.refinement_violations;
              if (original.is_free() && simplified.is_mandated()) {
                if (!s.stricter++) {
                  SweepCase sc{c, k_type, kind, lib};
                  s.stricter_example = sc.to_json().dump();
                }
              }
            });
          }
        }
      }
    }
    SweepStats st;
    const Verdict v = rule_equivalence_sweep(kSweepMaxN, pick_value_simplified, &st);
    s.library_sweep_pass = v.pass && st.cases == s.cases;
    s.library_detail = v.detail;
    return s;
  }();
  return result;
}

Outcome o4_equivalence() {
  const auto& s = rule_sweep();
  const bool ok = s.oracle_disagreements == 0 && s.threshold_disagreements == 0 &&
                  s.short_form_mismatches == 0 && s.library_sweep_pass;
  return {ok, std::to_string(s.cases) + " report sets (" + std::to_string(s.skipped) +
                  " unreachable classic-k sets skipped), " + std::to_string(s.o4_checks) +
                  " O4 checks, " + std::to_string(s.threshold_disagreements) +
                  " threshold disagreements, " + std::to_string(s.oracle_disagreements) +
                  " oracle disagreements; library sweep: " + s.library_detail};
}

Outcome refinement() {
  const auto& s = rule_sweep();
  return {s.refinement_violations == 0 && s.stricter >= 1,
          std::to_string(s.refinement_violations) + " violations, " + std::to_string(s.stricter) +
              " cases where only simplified mandates, e.g. " + s.stricter_example};
}

Outcome uniqueness() {
  const auto& s = rule_sweep();
  return {s.non_unique == 0, std::to_string(s.non_unique) + " report sets with two O4 values out of " +
                                 std::to_string(s.cases)};
}

Outcome campaign() {
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  const auto res = run_campaign(1, 1000, workers);
  std::string detail = "1000 runs, " + std::to_string(res.failures()) + " failures, " +
                       std::to_string(res.decided()) + " decided";
  for (const auto& r : res.runs) {
    if (!r.pass) {
      detail += ", first failing seed " + std::to_string(r.seed);
      break;
    }
  }
  return {res.failures() == 0, detail};
}

bool failure_free_unit_delay(const Scenario& s) {
  const auto& f = s.faults;
  return f.drop_probability == 0 && f.duplicate_probability == 0 && f.delay_min == 1 &&
         f.delay_max == 1 && f.channel_delays.empty() && f.scripted.empty();
}

Outcome latency() {
  const Scenario fast = bundled("fast_happy.scn"), classic = bundled("classic_full.scn");
  if (!failure_free_unit_delay(fast) || !failure_free_unit_delay(classic)) {
    return {false, "bundled latency scenarios are not failure-free with unit delays"};
  }
  const auto lf = latency_probe(run(fast)), lc = latency_probe(run(classic));
  auto show = [](const std::optional<std::uint64_t>& l) {
    return l ? std::to_string(*l) : std::string("none");
  };
  return {lf == std::optional<std::uint64_t>(2) && lc == std::optional<std::uint64_t>(4),
          "factorized fast path " + show(lf) + ", full classic round " + show(lc)};
}

Outcome collision() {
  const Scenario sc = bundled("collision.scn");
  const Trace t = run(sc);
  const auto config = sc.config();
  std::map<std::string, std::set<AgentId>> round1;
  std::optional<RoundNumber> learned_round;
  for (const auto& r : t.records) {
    if (r.kind == "deliver" && r.input) {
      if (auto* p = r.input->as<msg::Phase2b>(); p && p->round == 1) {
        round1[p->value].insert(r.input->from);
      }
    }
    if (r.learned && !learned_round) learned_round = r.input->as<msg::Phase2b>()->round;
  }
  std::uint32_t best = 0;
  for (const auto& [v, voters] : round1) best = std::max<std::uint32_t>(best, voters.size());
  const auto decided = decided_value(t);
  const bool split = round1.size() == 2 && best < config.fast_quorum_size;
  const bool recovered = learned_round == std::optional<RoundNumber>(2) && decided &&
                         (*decided == "x" || *decided == "y");
  const bool safe = check_agreement(t).pass && check_validity(t).pass;
  std::string detail = "round 1 largest vote block " + std::to_string(best) + " of fast quorum " +
                       std::to_string(config.fast_quorum_size) + "; ";
  detail += decided ? "decided " + *decided + " in round " + std::to_string(*learned_round)
                    : std::string("no decision");
  return {split && recovered && safe, detail};
}

Outcome determinism() {
  std::size_t runs = 0;
  for (const char* name : {"fast_happy.scn", "classic_full.scn", "collision.scn", "drop_all.scn",
                           "crash_recovery.scn", "coordinator_change.scn"}) {
    const Scenario sc = bundled(name);
    for (std::uint64_t seed : {sc.faults.seed, std::uint64_t{2}, std::uint64_t{3}}) {
      const Trace a = run(sc, seed);
      if (to_jsonl(a) != to_jsonl(run(sc, seed))) return {false, std::string(name) + " differs"};
      try {
        replay(trace_from_jsonl(to_jsonl(a)));
      } catch (const NondeterminismError& e) {
        return {false, std::string(name) + ": " + e.what()};
      }
      ++runs;
    }
  }
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Scenario sc = random_scenario(seed);
    if (to_jsonl(run(sc)) != to_jsonl(run(sc))) {
      return {false, "campaign seed " + std::to_string(seed) + " differs"};
    }
    ++runs;
  }
  return {true, std::to_string(runs) + " scenario/seed pairs re-run and replayed byte-identically"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"quorum-formulas", 1.0, quorum_formulas},
      {"quorum-intersection", 10.0, intersection},
      {"o4-oracle-threshold-equivalence", 300.0, o4_equivalence},
      {"refinement", 300.0, refinement},
      {"o4-uniqueness", 300.0, uniqueness},
      {"safety-campaign", 120.0, campaign},
      {"latency", 60.0, latency},
      {"collision-recovery", 60.0, collision},
      {"determinism", 60.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_seconds;
    const bool pass = o.pass && in_budget;
    failed += pass ? 0 : 1;
    std::printf("%s %s: %s [%.3fs, budget %.0fs%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(),
                o.detail.c_str(), secs, c.budget_seconds, in_budget ? "" : ", EXCEEDED");
  }
  std::printf("%s: %zu of %zu criteria passed\n", failed ? "FAIL" : "PASS",
              criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed ? 1 : 0;
}
