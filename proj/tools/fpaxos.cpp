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

// Command-line front end for the fpaxos lab.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "fpaxos/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = fpaxos::cli;

  CLI::App app{"Fast Paxos lab: quorum sizing, value-selection rules, simulation and checking"};
  app.require_subcommand(1);
  bool machine = false;
  app.add_flag("--machine", machine, "Emit JSON instead of text");

  cli::QuorumArgs qa;
  auto* quorum = app.add_subcommand("quorum", "Derive quorum sizes for N acceptors");
  quorum->add_option("--n", qa.n, "Number of acceptors")->required();
  quorum->add_option("--policy", qa.policy, "max-e, max-f or explicit")->capture_default_str();
  quorum->add_option("--e", qa.e, "E for the explicit policy");
  quorum->add_option("--f", qa.f, "F for the explicit policy");

  cli::RuleArgs ra;
  auto* rule = app.add_subcommand("rule", "Apply a coordinator value-selection rule to a report file");
  rule->add_option("reports", ra.report_file, "Report file (JSON)")->required();
  rule->add_option("--rule", ra.rule, "original, intermediate, most-voted or simplified")
      ->capture_default_str();
  rule->add_option("--evaluator", ra.evaluator, "cardinality or oracle")->capture_default_str();
  rule->add_option("--n", ra.n, "Override N");
  rule->add_option("--policy", ra.policy, "Override the sizing policy");
  rule->add_option("--e", ra.e, "E for the explicit policy");
  rule->add_option("--f", ra.f, "F for the explicit policy");
  rule->add_option("--k-round-type", ra.k_round_type, "Override the type of round k (fast|classic)");

  cli::SimulateArgs sa;
  std::uint64_t seed = 0;
  std::uint64_t seeds = 1;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario and check the resulting trace");
  simulate->add_option("scenario", sa.scenario_file, "Scenario file (JSON)")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "Seed (default: the scenario's own)");
  simulate->add_option("--seeds", seeds, "Number of consecutive seeds to run")->check(CLI::PositiveNumber);
  simulate->add_option("--trace", sa.trace_out, "Write the trace here (seed appended if several)");
  simulate->add_option("--verdict", sa.verdict_out, "Write the verdict file here");

  std::string trace_file;
  auto* replay = app.add_subcommand("replay", "Re-run a trace and confirm identical output");
  replay->add_option("trace", trace_file, "Trace file (JSON lines)")->required();
  auto* check = app.add_subcommand("check", "Run the safety checkers on a stored trace");
  check->add_option("trace", trace_file, "Trace file (JSON lines)")->required();

  cli::SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "Exhaustive rule-equivalence sweep");
  sweep->add_option("--n-max", wa.n_max, "Largest N to enumerate (1..6)")->capture_default_str();
  sweep->add_option("--verdict", wa.verdict_out, "Write the verdict file here");

  cli::CampaignArgs ca;
  ca.workers = std::max(1u, std::thread::hardware_concurrency());
  auto* campaign = app.add_subcommand("campaign", "Randomized fault-injection safety campaign");
  campaign->add_option("--first-seed", ca.first_seed, "First seed")->capture_default_str();
  campaign->add_option("--runs", ca.runs, "Number of runs")->capture_default_str();
  campaign->add_option("--workers", ca.workers, "Worker threads");
  campaign->add_option("--verdict", ca.verdict_out, "Write the verdict file here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  const cli::Output out{std::cout, std::cerr, machine};
  if (*quorum) return cli::cmd_quorum(qa, out);
  if (*rule) return cli::cmd_rule(ra, out);
  if (*simulate) {
    if (*seed_opt) sa.seed = seed;
    sa.seed_count = seeds;
    return cli::cmd_simulate(sa, out);
  }
  if (*replay) return cli::cmd_replay(trace_file, out);
  if (*check) return cli::cmd_check(trace_file, out);
  if (*sweep) return cli::cmd_sweep(wa, out);
  if (*campaign) return cli::cmd_campaign(ca, out);
  return cli::kExitUsage;
}
