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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fpaxos/campaign.hpp"
#include "fpaxos/checker.hpp"
#include "fpaxos/simnet.hpp"

namespace fpaxos {
namespace {

Scenario bundled(const std::string& name) {
  std::ifstream in(std::string(FPAXOS_SCENARIO_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(nlohmann::json::parse(ss.str()));
}

const RuleFunction kAlwaysFree = [](const ReportSet&, const RuleContext&) {
  return CoordinatorChoice::free();
};

std::size_t first_vote(const Trace& t, const AgentId& acceptor) {
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    const auto& r = t.records[i];
    if (r.agent != acceptor) continue;
    for (const auto& s : r.sends) {
      if (s.msg.as<msg::Phase2b>()) return i;
    }
  }
  return t.records.size();
}

TEST(Checker, BundledScenariosPass) {
  for (const char* name : {"fast_happy.scn", "classic_full.scn", "collision.scn", "drop_all.scn",
                           "crash_recovery.scn", "coordinator_change.scn"}) {
    for (const auto& v : check_all(run(bundled(name)))) EXPECT_TRUE(v.pass) << name << " " << v.to_string();
  }
}

TEST(Checker, AgreementCatchesForgedSecondValue) {
  Trace t = run(bundled("fast_happy.scn"));
  TraceRecord extra = t.records.back();
  extra.seq = t.records.size();
  extra.agent = "l0";
  extra.learned = "y";
  t.records.push_back(extra);
  const auto v = check_agreement(t);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.position, std::optional<std::uint64_t>(extra.seq));
}

TEST(Checker, ValidityCatchesUnproposedValue) {
  Trace t = run(bundled("fast_happy.scn"));
  for (auto& r : t.records) {
    if (r.learned) r.learned = "q";
  }
  EXPECT_FALSE(check_validity(t).pass);
  Scenario none = bundled("drop_all.scn");
  none.proposals.clear();
  EXPECT_TRUE(check_validity(run(none)).pass);
}

TEST(Checker, VoteDisciplineCatchesDoubleVote) {
  Trace t = run(bundled("fast_happy.scn"));
  const auto i = first_vote(t, "a0");
  ASSERT_LT(i, t.records.size());
  TraceRecord again = t.records[i];
  again.seq = t.records.size();
  t.records.push_back(again);
  const auto v = check_vote_discipline(t);
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.detail.find("twice"), std::string::npos) << v.detail;
}

TEST(Checker, VoteDisciplineCatchesVoteWithoutDurableWrite) {
  Trace t = run(bundled("fast_happy.scn"));
  const auto i = first_vote(t, "a1");
  ASSERT_LT(i, t.records.size());
  t.records[i].persist.reset();
  EXPECT_FALSE(check_vote_discipline(t).pass);
}

TEST(Checker, VoteDisciplineCatchesRegressionAcrossRecovery) {
  Scenario sc = bundled("fast_happy.scn");
  sc.faults.scripted.push_back({ScriptedFault::Kind::Crash, 2, "a1"});
  sc.faults.scripted.push_back({ScriptedFault::Kind::Recover, 5, "a1"});
  Trace t = run(sc);
  ASSERT_TRUE(check_vote_discipline(t).pass);
  for (auto& r : t.records) {
    if (r.kind == "recover") r.restored = AcceptorState{}.to_json();
  }
  const auto v = check_vote_discipline(t);
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.detail.find("recovered"), std::string::npos) << v.detail;
}

TEST(Checker, VoteDisciplineCatchesUnauthorizedRequest) {
  Trace t = run(bundled("fast_happy.scn"));
  // Drop the Any so the proposer's request is no longer backed by one.
  for (auto& r : t.records) {
    if (r.input && r.input->as<msg::Any>()) r.input = Message{"c0", r.agent, msg::Propose{"x"}};
  }
  EXPECT_FALSE(check_vote_discipline(t).pass);
}

TEST(Checker, VoteDisciplineCatchesVoteBelowPromise) {
  Trace t = run(bundled("classic_full.scn"));
  const auto i = first_vote(t, "a0");
  ASSERT_LT(i, t.records.size());
  // Claim the acceptor had promised round 9 right before voting in round 2.
  TraceRecord promise = t.records[i];
  promise.persist = AcceptorState{9, 0, std::nullopt}.to_json();
  promise.sends.clear();
  promise.input.reset();
  t.records.insert(t.records.begin() + static_cast<std::ptrdiff_t>(i), promise);
  EXPECT_FALSE(check_vote_discipline(t).pass);
}

TEST(Checker, PureFunctionOfTrace) {
  const Trace t = run(bundled("crash_recovery.scn"), 4);
  const auto a = check_all(t), b = check_all(t);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].to_json(), b[i].to_json());
}

TEST(Checker, LatencyProbe) {
  EXPECT_EQ(latency_probe(run(bundled("fast_happy.scn"))), std::optional<std::uint64_t>(2));
  EXPECT_EQ(latency_probe(run(bundled("classic_full.scn"))), std::optional<std::uint64_t>(4));
  EXPECT_EQ(latency_probe(run(bundled("drop_all.scn"))), std::nullopt);
}

TEST(Campaign, RandomScenariosRespectLimits) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Scenario s = random_scenario(seed);
    EXPECT_NO_THROW(validate_scenario(s));
    EXPECT_GE(s.n_acceptors, 3u);
    EXPECT_LE(s.n_acceptors, 5u);
    EXPECT_LE(s.faults.drop_probability, 0.3);
    EXPECT_LE(s.faults.duplicate_probability, 0.2);
    std::size_t crashes = 0;
    for (const auto& f : s.faults.scripted) {
      if (f.kind != ScriptedFault::Kind::Recover) ++crashes;
    }
    EXPECT_LE(crashes, s.config().max_faults_classic);
  }
}

TEST(Campaign, SafeRulesPass) {
  const auto res = run_campaign(1, 150, 2);
  EXPECT_EQ(res.failures(), 0u);
  EXPECT_GT(res.decided(), 100u);
}

TEST(Campaign, ResultsIndependentOfWorkerCount) {
  const auto a = run_campaign(500, 40, 1), b = run_campaign(500, 40, 3);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].seed, b.runs[i].seed);
    EXPECT_EQ(a.runs[i].decided, b.runs[i].decided);
  }
}

TEST(Campaign, PlantedUnsafeRuleIsCaughtAndWitnessReplays) {
  const auto res = run_campaign(1, 60, 2, {}, kAlwaysFree);
  ASSERT_GT(res.failures(), 0u);
  for (const auto& r : res.runs) {
    if (r.pass) continue;
    const Trace t = run(random_scenario(r.seed), std::nullopt, kAlwaysFree);
    const Trace again = replay(t, kAlwaysFree);
    const auto v1 = check_all(t), v2 = check_all(again);
    for (std::size_t i = 0; i < v1.size(); ++i) EXPECT_EQ(v1[i].to_json(), v2[i].to_json());
    EXPECT_FALSE(check_agreement(again).pass);
    break;
  }
}

}  // namespace
}  // namespace fpaxos
