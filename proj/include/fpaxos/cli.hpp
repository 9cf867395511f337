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
 *  \brief Command implementations behind the `fpaxos` tool.
 *
 *  Each command writes to the given streams and returns the process exit
 *  code: 0 on success, 1 when a checked property fails, 2 on bad input.
 *
 *  Report files are one JSON document:
 *
 *      {
 *        "format_version": 1,
 *        "n": 5, "policy": "max-f",        // or {"e": 1, "f": 2}
 *        "k_round_type": "fast",           // type of the highest voted round
 *        "quorum_kind": "classic",         // optional, default classic
 *        "reports": [{"acceptor": "a0", "round": 2, "value": "x"},
 *                    {"acceptor": "a1", "round": 0, "value": null}]
 *      }
 *
 *  Verdict files wrap a list of verdicts:
 *
 *      {"format_version": 1, "command": "sweep", "pass": true,
 *       "verdicts": [{"property": ..., "pass": ..., "detail": ...}], ...}
 */

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpaxos/campaign.hpp"
#include "fpaxos/checker.hpp"
#include "fpaxos/quorum.hpp"
#include "fpaxos/rules.hpp"
#include "fpaxos/scenario.hpp"
#include "fpaxos/simnet.hpp"
#include "fpaxos/sweep.hpp"
#include "fpaxos/trace.hpp"

namespace fpaxos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

struct Output {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  bool machine = false;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

inline nlohmann::json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

inline nlohmann::json config_to_json(const QuorumConfig& c) {
  return {{"n", c.n_acceptors},
          {"f", c.max_faults_classic},
          {"e", c.max_faults_fast},
          {"classic_quorum_size", c.classic_quorum_size},
          {"fast_quorum_size", c.fast_quorum_size}};
}

// ---------------------------------------------------------------------------
// quorum

struct QuorumArgs {
  std::int64_t n = 0;
  std::string policy = "max-f";
  std::int64_t e = -1;
  std::int64_t f = -1;
};

inline int cmd_quorum(const QuorumArgs& a, const Output& o) {
  try {
    if (a.n < 1) throw InvalidArgument("--n must be at least 1");
    const auto c = derive_config(static_cast<std::uint32_t>(a.n), parse_policy(a.policy, a.e, a.f));
    if (o.machine) {
      auto j = config_to_json(c);
      j["format_version"] = kFormatVersion;
      j["policy"] = a.policy;
      o.out << j.dump() << "\n";
    } else {
      o.out << "N=" << c.n_acceptors << " F=" << c.max_faults_classic
            << " E=" << c.max_faults_fast << " Qc=" << c.classic_quorum_size
            << " Qf=" << c.fast_quorum_size << "\n";
    }
    return kExitOk;
  } catch (const InvalidArgument& e) {
    o.err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// ---------------------------------------------------------------------------
// rule

struct ReportFile {
  std::optional<std::uint32_t> n;
  std::optional<QuorumPolicy> policy;
  RoundType k_type = RoundType::Fast;
  RoundType quorum_kind = RoundType::Classic;
  ReportSet reports;
};

inline ReportFile report_file_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw InvalidArgument("report file must be a JSON object");
    if (j.value("format_version", kFormatVersion) != kFormatVersion) {
      throw InvalidArgument("unsupported report format_version");
    }
    ReportFile f;
    if (j.contains("n")) f.n = j.at("n").get<std::uint32_t>();
    if (j.contains("policy")) f.policy = policy_from_json(j.at("policy"));
    if (j.contains("k_round_type")) {
      f.k_type = parse_round_type(j.at("k_round_type").get<std::string>());
    }
    if (j.contains("quorum_kind")) {
      f.quorum_kind = parse_round_type(j.at("quorum_kind").get<std::string>());
    }
    if (!j.contains("reports") || !j.at("reports").is_array()) {
      throw InvalidArgument("report file needs a reports array");
    }
    for (const auto& r : j.at("reports")) {
      f.reports.push_back({r.at("acceptor").get<std::string>(),
                           r.value("round", RoundNumber{0}),
                           value_from_json(r.value("value", nlohmann::json(nullptr)))});
    }
    validate_reports(f.reports);
    if (f.reports.empty()) throw InvalidArgument("report file has no reports");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed report file: ") + e.what());
  }
}

struct RuleArgs {
  std::string report_file;
  std::string rule = "simplified";
  std::string evaluator = "cardinality";
  std::int64_t n = 0;          // overrides the file when > 0
  std::string policy;          // overrides the file when set
  std::int64_t e = -1;
  std::int64_t f = -1;
  std::string k_round_type;    // overrides the file when set
};

inline int cmd_rule(const RuleArgs& a, const Output& o) {
  try {
    const ReportFile file = report_file_from_json(parse_json_file(a.report_file));
    const RuleKind kind = parse_rule_kind(a.rule);

    RuleContext ctx;
    ctx.k_type = a.k_round_type.empty() ? file.k_type : parse_round_type(a.k_round_type);
    ctx.quorum_kind = file.quorum_kind;
    if (a.evaluator == "oracle") {
      ctx.evaluator = O4Evaluator::Oracle;
    } else if (a.evaluator != "cardinality") {
      throw InvalidArgument("unknown evaluator '" + a.evaluator + "'");
    }

    const bool needs_config = kind == RuleKind::Original || kind == RuleKind::Intermediate;
    std::optional<QuorumConfig> config;
    const auto n = a.n > 0 ? std::optional<std::uint32_t>(static_cast<std::uint32_t>(a.n)) : file.n;
    std::optional<QuorumPolicy> pol = file.policy;
    if (!a.policy.empty()) pol = parse_policy(a.policy, a.e, a.f);
    if (n && pol) config = derive_config(*n, *pol);
    if (needs_config && !config) {
      throw InvalidArgument("rule '" + a.rule + "' needs N and a policy (file or flags)");
    }
    if (config) {
      ctx.config = *config;
      if (file.reports.size() < config->classic_quorum_size) {
        throw InvalidArgument("report set smaller than a classic quorum (" +
                              std::to_string(config->classic_quorum_size) + ")");
      }
    }

    const VoteTally tally = tally_votes(file.reports);
    const CoordinatorChoice choice = apply_rule(kind, file.reports, ctx);
    if (o.machine) {
      nlohmann::json j{{"format_version", kFormatVersion},
                       {"rule", to_string(kind)},
                       {"choice", choice.is_mandated() ? "mandated" : "free"},
                       {"value", value_to_json(choice.value())},
                       {"k", tally.max_round},
                       {"tally", tally.value_counts}};
      if (config) j["config"] = config_to_json(*config);
      o.out << j.dump() << "\n";
    } else {
      o.out << choice.to_string() << "\n";
    }
    return kExitOk;
  } catch (const InvalidArgument& e) {
    o.err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string scenario_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> seed_count;  // run seed .. seed + count - 1
  std::string trace_out;
  std::string verdict_out;
};

struct SimulationReport {
  std::uint64_t seed = 0;
  std::vector<Verdict> verdicts;
  MaybeValue decided;
  std::optional<std::uint64_t> latency;
  bool truncated = false;
  std::string trace_path;

  /// True when every verdict, expectations included, passes.
  bool safe() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }

  nlohmann::json to_json() const {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : verdicts) vs.push_back(v.to_json());
    nlohmann::json j{{"seed", seed},
                     {"verdicts", vs},
                     {"decided", value_to_json(decided)},
                     {"truncated", truncated}};
    j["latency"] = latency ? nlohmann::json(*latency) : nlohmann::json(nullptr);
    if (!trace_path.empty()) j["trace"] = trace_path;
    return j;
  }
};

/// Verdicts plus the scenario's own expectations, as an extra verdict.
inline SimulationReport evaluate_trace(const Trace& trace, const Scenario& sc) {
  SimulationReport r;
  r.seed = trace.seed;
  r.verdicts = check_all(trace);
  r.decided = decided_value(trace);
  r.latency = latency_probe(trace);
  r.truncated = trace.truncated;

  std::vector<std::string> unmet;
  const auto& ex = sc.expect;
  if (ex.decision && *ex.decision != r.decided.has_value()) {
    unmet.push_back(*ex.decision ? "expected a decision" : "expected no decision");
  }
  if (ex.value && r.decided != ex.value) unmet.push_back("expected value " + *ex.value);
  if (ex.latency && r.latency != ex.latency) {
    unmet.push_back("expected latency " + std::to_string(*ex.latency));
  }
  if (ex.decision || ex.value || ex.latency) {
    Verdict v;
    v.property = "expectations";
    v.pass = unmet.empty();
    for (const auto& u : unmet) v.detail += (v.detail.empty() ? "" : "; ") + u;
    r.verdicts.push_back(v);
  }
  return r;
}

inline std::string trace_path_for(const std::string& base, std::uint64_t seed, bool many) {
  if (!many) return base;
  const auto dot = base.rfind('.');
  const auto slash = base.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? base.substr(0, dot) : base;
  const std::string ext = has_ext ? base.substr(dot) : "";
  return stem + "." + std::to_string(seed) + ext;
}

inline void print_report(const SimulationReport& r, const Output& o) {
  o.out << "seed " << r.seed << ": ";
  if (r.decided) {
    o.out << "decided " << *r.decided << ", latency " << *r.latency;
  } else {
    o.out << "no decision";
  }
  if (r.truncated) o.out << " (truncated)";
  o.out << "\n";
  for (const auto& v : r.verdicts) o.out << "  " << v.to_string() << "\n";
  if (!r.safe() && !r.trace_path.empty()) o.out << "  witness trace: " << r.trace_path << "\n";
}

inline int cmd_simulate(const SimulateArgs& a, const Output& o) {
  try {
    Scenario sc = scenario_from_json(parse_json_file(a.scenario_file));
    const std::uint64_t first = a.seed.value_or(sc.faults.seed);
    const std::uint64_t count = a.seed_count.value_or(1);
    if (count == 0) throw InvalidArgument("--seeds must be at least 1");

    std::vector<SimulationReport> reports;
    bool all_pass = true;
    for (std::uint64_t i = 0; i < count; ++i) {
      const Trace trace = run(sc, first + i);
      SimulationReport r = evaluate_trace(trace, sc);
      if (!a.trace_out.empty()) {
        r.trace_path = trace_path_for(a.trace_out, first + i, count > 1);
        write_file(r.trace_path, to_jsonl(trace));
      }
      all_pass = all_pass && std::all_of(r.verdicts.begin(), r.verdicts.end(),
                                         [](const Verdict& v) { return v.pass; });
      reports.push_back(std::move(r));
    }

    nlohmann::json doc{{"format_version", kFormatVersion},
                       {"command", "simulate"},
                       {"scenario", sc.name},
                       {"pass", all_pass},
                       {"runs", nlohmann::json::array()}};
    for (const auto& r : reports) doc["runs"].push_back(r.to_json());
    if (o.machine) {
      o.out << doc.dump() << "\n";
    } else {
      o.out << "scenario " << sc.name << "\n";
      for (const auto& r : reports) print_report(r, o);
      o.out << (all_pass ? "PASS" : "FAIL") << "\n";
    }
    if (!a.verdict_out.empty()) write_file(a.verdict_out, doc.dump(2) + "\n");
    return all_pass ? kExitOk : kExitViolation;
  } catch (const InvalidArgument& e) {
    o.err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// ---------------------------------------------------------------------------
// check / replay: operate on a stored trace

inline int cmd_check(const std::string& trace_file, const Output& o) {
  try {
    const Trace trace = trace_from_jsonl(read_file(trace_file));
    const Scenario sc = scenario_from_json(trace.scenario);
    const SimulationReport r = evaluate_trace(trace, sc);
    if (o.machine) {
      o.out << r.to_json().dump() << "\n";
    } else {
      print_report(r, o);
    }
    const bool pass = std::all_of(r.verdicts.begin(), r.verdicts.end(),
                                  [](const Verdict& v) { return v.pass; });
    return pass ? kExitOk : kExitViolation;
  } catch (const InvalidArgument& e) {
    o.err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

inline int cmd_replay(const std::string& trace_file, const Output& o) {
  try {
    const Trace trace = trace_from_jsonl(read_file(trace_file));
    replay(trace);
    o.out << "replay identical: " << trace.records.size() << " records\n";
    return kExitOk;
  } catch (const NondeterminismError& e) {
    o.err << "error: " << e.what() << "\n";
    return kExitViolation;
  } catch (const InvalidArgument& e) {
    o.err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::int64_t n_max = 4;
  std::string verdict_out;
};

inline int cmd_sweep(const SweepArgs& a, const Output& o) {
  try {
    if (a.n_max < 1 || a.n_max > kSweepMaxN) {
      throw InvalidArgument("--n-max must lie in 1.." + std::to_string(kSweepMaxN));
    }
    SweepStats st;
    const Verdict v =
        rule_equivalence_sweep(static_cast<std::uint32_t>(a.n_max), pick_value_simplified, &st);
    nlohmann::json doc{{"format_version", kFormatVersion},
                       {"command", "sweep"},
                       {"n_max", a.n_max},
                       {"pass", v.pass},
                       {"verdicts", {v.to_json()}},
                       {"stats", st.to_json()}};
    if (o.machine) {
      o.out << doc.dump() << "\n";
    } else {
      o.out << "cases " << st.cases << " (skipped unreachable " << st.skipped_unreachable << ")\n"
            << "O4 evaluations " << st.o4_evaluations << "\n"
            << "simplified-only mandates " << st.simplified_stricter << "\n"
            << v.to_string() << "\n";
    }
    if (!a.verdict_out.empty()) write_file(a.verdict_out, doc.dump(2) + "\n");
    return v.pass ? kExitOk : kExitViolation;
  } catch (const InvalidArgument& e) {
    o.err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// ---------------------------------------------------------------------------
// campaign

struct CampaignArgs {
  std::uint64_t first_seed = 1;
  std::uint64_t runs = 1000;
  unsigned workers = 1;
  std::string verdict_out;
};

inline int cmd_campaign(const CampaignArgs& a, const Output& o) {
  try {
    if (a.runs == 0) throw InvalidArgument("--runs must be at least 1");
    const CampaignResult res = run_campaign(a.first_seed, a.runs, a.workers);
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& r : res.runs) {
      if (r.pass) continue;
      nlohmann::json vs = nlohmann::json::array();
      for (const auto& v : r.verdicts) vs.push_back(v.to_json());
      failed.push_back({{"seed", r.seed}, {"verdicts", vs}});
    }
    nlohmann::json doc{{"format_version", kFormatVersion},
                       {"command", "campaign"},
                       {"first_seed", a.first_seed},
                       {"runs", a.runs},
                       {"decided", res.decided()},
                       {"failures", failed},
                       {"pass", failed.empty()}};
    if (o.machine) {
      o.out << doc.dump() << "\n";
    } else {
      o.out << "runs " << a.runs << ", decided " << res.decided() << ", failures "
            << res.failures() << "\n";
      for (const auto& f : failed) o.out << "  failing seed " << f["seed"] << "\n";
      o.out << (failed.empty() ? "PASS" : "FAIL") << "\n";
    }
    if (!a.verdict_out.empty()) write_file(a.verdict_out, doc.dump(2) + "\n");
    return failed.empty() ? kExitOk : kExitViolation;
  } catch (const InvalidArgument& e) {
    o.err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace fpaxos::cli
