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

#include <gtest/gtest.h>

#include "fpaxos/messages.hpp"
#include "fpaxos/protocol.hpp"
#include "fpaxos/stable_store.hpp"

namespace fpaxos {
namespace {

Environment env5() {
  Environment env;
  env.config = make_config(5, 1, 2);
  env.scheme = RoundScheme({"c0"});
  env.roster = {{"a0", "a1", "a2", "a3", "a4"}, {"c0"}, {"p0", "p1"}, {"l0", "l1"}};
  return env;
}

// ---------------------------------------------------------------------------

TEST(RoundScheme, OddRoundsFastAndRoundRobinOwners) {
  RoundScheme s({"c0", "c1"});
  EXPECT_EQ(s.type(1), RoundType::Fast);
  EXPECT_EQ(s.type(2), RoundType::Classic);
  EXPECT_EQ(s.coordinator(3), "c1");
  EXPECT_EQ(s.coordinator(4), "c0");
  EXPECT_EQ(s.next_owned("c0", 2, RoundType::Classic), 4u);
  EXPECT_EQ(s.next_owned("c1", 1, RoundType::Classic), std::optional<RoundNumber>(3));
  RoundScheme listed({"c0"}, RoundScheme::FastRounds::Listed, {2, 5});
  EXPECT_EQ(listed.type(2), RoundType::Fast);
  EXPECT_EQ(listed.type(3), RoundType::Classic);
  EXPECT_THROW(RoundScheme(std::vector<AgentId>{}), InvalidArgument);
}

TEST(Messages, JsonRoundTrip) {
  const std::vector<Message> ms{
      {"client", "p0", msg::Propose{"x"}},     {"c0", "a0", msg::Phase1a{3}},
      {"a0", "c0", msg::Phase1b{3, 1, "y"}},   {"a1", "c0", msg::Phase1b{3, 0, {}}},
      {"c0", "a0", msg::Phase2a{3, "x"}},      {"c0", "p0", msg::Any{1}},
      {"a0", "l0", msg::Phase2b{3, "x"}}};
  for (const auto& m : ms) {
    const auto back = message_from_json(to_json(m));
    EXPECT_EQ(to_json(back), to_json(m));
  }
  EXPECT_THROW(message_from_json(nlohmann::json{{"type", "phase9"}}), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Acceptor

TEST(Acceptor, PromisesHigherRoundsOnly) {
  const RoundScheme scheme({"c0"});
  auto s1 = acceptor_on_phase1a({}, "a0", msg::Phase1a{2}, scheme);
  EXPECT_TRUE(s1.persisted);
  EXPECT_EQ(s1.state.promised_round, 2u);
  ASSERT_EQ(s1.out.size(), 1u);
  EXPECT_EQ(s1.out[0].to, "c0");
  EXPECT_NE(s1.out[0].as<msg::Phase1b>(), nullptr);

  EXPECT_TRUE(acceptor_on_phase1a(s1.state, "a0", msg::Phase1a{2}, scheme).out.empty());
  EXPECT_TRUE(acceptor_on_phase1a(s1.state, "a0", msg::Phase1a{1}, scheme).out.empty());
}

TEST(Acceptor, ReportsLastVote) {
  const RoundScheme scheme({"c0"});
  AcceptorState s{3, 3, "x"};
  auto step = acceptor_on_phase1a(s, "a0", msg::Phase1a{4}, scheme);
  const auto* b = step.out.at(0).as<msg::Phase1b>();
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->round, 4u);
  EXPECT_EQ(b->voted_round, 3u);
  EXPECT_EQ(b->voted_value, MaybeValue("x"));
}

TEST(Acceptor, VotesOncePerRoundAndNeverBelowPromise) {
  const std::vector<AgentId> learners{"l0", "l1"};
  auto v = acceptor_on_vote_request({1, 0, {}}, "a0", 1, "x", learners);
  EXPECT_TRUE(v.persisted);
  EXPECT_EQ(v.out.size(), 2u);
  EXPECT_EQ(v.state.last_vote_round, 1u);

  EXPECT_TRUE(acceptor_on_vote_request(v.state, "a0", 1, "y", learners).out.empty());
  EXPECT_TRUE(acceptor_on_vote_request({5, 0, {}}, "a0", 4, "x", learners).out.empty());

  // A vote request above the promise promises that round too.
  auto w = acceptor_on_vote_request({2, 0, {}}, "a0", 3, "x", learners);
  EXPECT_EQ(w.state.promised_round, 3u);
}

TEST(Acceptor, RecoverRestoresDurableState) {
  StableStore store;
  EXPECT_EQ(acceptor_recover(store.read("a0")), AcceptorState{});
  const AcceptorState voted{3, 3, "x"};
  store.write("a0", voted.to_json());
  EXPECT_EQ(acceptor_recover(store.read("a0")), voted);
  EXPECT_EQ(store.writes(), 1u);
}

// ---------------------------------------------------------------------------
// Coordinator

CoordinatorState collecting(const Environment& env, RoundNumber r) {
  return coordinator_start_round({}, "c0", env.scheme.id(r), env.roster.acceptors).state;
}

TEST(Coordinator, StartRoundBroadcastsPhase1a) {
  const auto env = env5();
  auto step = coordinator_start_round({}, "c0", env.scheme.id(2), env.roster.acceptors);
  EXPECT_TRUE(step.persisted);
  EXPECT_EQ(step.out.size(), 5u);
  EXPECT_EQ(step.state.phase, CoordinatorPhase::CollectingPhase1b);
  EXPECT_THROW(coordinator_start_round(step.state, "c0", env.scheme.id(2), env.roster.acceptors),
               InvalidArgument);
  EXPECT_THROW(coordinator_start_round({}, "c9", env.scheme.id(2), env.roster.acceptors),
               InvalidArgument);
}

TEST(Coordinator, RunsRuleAtClassicQuorum) {
  const auto env = env5();
  auto s = collecting(env, 2);
  auto a = coordinator_on_phase1b(s, "c0", "a0", msg::Phase1b{2, 1, "x"}, env);
  auto b = coordinator_on_phase1b(a.state, "c0", "a1", msg::Phase1b{2, 1, "x"}, env);
  EXPECT_TRUE(b.out.empty());
  auto c = coordinator_on_phase1b(b.state, "c0", "a2", msg::Phase1b{2, 1, "y"}, env);
  ASSERT_TRUE(c.choice.has_value());
  EXPECT_EQ(*c.choice, CoordinatorChoice::mandated("x"));
  ASSERT_EQ(c.out.size(), 5u);
  const auto* p2a = c.out[0].as<msg::Phase2a>();
  ASSERT_NE(p2a, nullptr);
  EXPECT_EQ(p2a->value, "x");
  EXPECT_EQ(c.state.phase, CoordinatorPhase::Phase2aSent);

  auto late = coordinator_on_phase1b(c.state, "c0", "a3", msg::Phase1b{2, 1, "y"}, env);
  EXPECT_TRUE(late.out.empty());
  EXPECT_EQ(late.state.reports.size(), 3u);
}

TEST(Coordinator, IgnoresDuplicateAndForeignReports) {
  const auto env = env5();
  auto s = collecting(env, 2);
  auto a = coordinator_on_phase1b(s, "c0", "a0", msg::Phase1b{2, 0, {}}, env);
  auto dup = coordinator_on_phase1b(a.state, "c0", "a0", msg::Phase1b{2, 0, {}}, env);
  EXPECT_EQ(dup.state.reports.size(), 1u);
  auto other = coordinator_on_phase1b(a.state, "c0", "a1", msg::Phase1b{4, 0, {}}, env);
  EXPECT_EQ(other.state.reports.size(), 1u);
}

TEST(Coordinator, FreeUsesPoolHead) {
  const auto env = env5();
  auto s = collecting(env, 2);
  s = coordinator_on_propose(s, "c0", "y", env).state;
  s = coordinator_on_propose(s, "c0", "z", env).state;
  for (const char* a : {"a0", "a1"}) s = coordinator_on_phase1b(s, "c0", a, msg::Phase1b{2, 0, {}}, env).state;
  auto step = coordinator_on_phase1b(s, "c0", "a2", msg::Phase1b{2, 0, {}}, env);
  EXPECT_EQ(step.out.at(0).as<msg::Phase2a>()->value, "y");
}

TEST(Coordinator, FreeFastRoundSendsAny) {
  const auto env = env5();
  auto s = collecting(env, 3);
  for (const char* a : {"a0", "a1"}) s = coordinator_on_phase1b(s, "c0", a, msg::Phase1b{3, 0, {}}, env).state;
  auto step = coordinator_on_phase1b(s, "c0", "a2", msg::Phase1b{3, 0, {}}, env);
  ASSERT_EQ(step.out.size(), 2u);
  EXPECT_EQ(step.out[0].to, "p0");
  EXPECT_NE(step.out[0].as<msg::Any>(), nullptr);
}

TEST(Coordinator, FreeClassicRoundWaitsForProposal) {
  const auto env = env5();
  auto s = collecting(env, 2);
  for (const char* a : {"a0", "a1", "a2"}) s = coordinator_on_phase1b(s, "c0", a, msg::Phase1b{2, 0, {}}, env).state;
  EXPECT_EQ(s.phase, CoordinatorPhase::AwaitingProposal);
  auto step = coordinator_on_propose(s, "c0", "w", env);
  ASSERT_EQ(step.out.size(), 5u);
  EXPECT_EQ(step.out[0].as<msg::Phase2a>()->value, "w");
}

TEST(Coordinator, RuleOverrideReplacesRule) {
  auto env = env5();
  env.rule_override = [](const ReportSet&, const RuleContext&) {
    return CoordinatorChoice::mandated("evil");
  };
  auto s = collecting(env, 2);
  for (const char* a : {"a0", "a1"}) s = coordinator_on_phase1b(s, "c0", a, msg::Phase1b{2, 1, "x"}, env).state;
  auto step = coordinator_on_phase1b(s, "c0", "a2", msg::Phase1b{2, 1, "x"}, env);
  EXPECT_EQ(step.out.at(0).as<msg::Phase2a>()->value, "evil");
}

TEST(Coordinator, RecoverKeepsRoundDropsReports) {
  const auto env = env5();
  auto s = collecting(env, 4);
  s = coordinator_on_phase1b(s, "c0", "a0", msg::Phase1b{4, 0, {}}, env).state;
  const auto r = coordinator_recover(s.durable_json());
  EXPECT_EQ(r.current_round, 4u);
  EXPECT_TRUE(r.reports.empty());
  EXPECT_EQ(r.phase, CoordinatorPhase::Idle);
}

// ---------------------------------------------------------------------------
// Proposer

TEST(Proposer, SendsOnAnyOnlyOnce) {
  const std::vector<AgentId> acc{"a0", "a1", "a2"};
  auto p = proposer_on_propose({}, "p0", "x", acc);
  EXPECT_TRUE(p.out.empty());
  auto q = proposer_on_any(p.state, "p0", msg::Any{1}, acc);
  ASSERT_EQ(q.out.size(), 3u);
  EXPECT_EQ(q.out[0].as<msg::Phase2a>()->value, "x");
  EXPECT_TRUE(proposer_on_any(q.state, "p0", msg::Any{1}, acc).out.empty());
  EXPECT_TRUE(proposer_on_propose(q.state, "p0", "y", acc).out.empty());
}

TEST(Proposer, AnyBeforeValueThenValue) {
  const std::vector<AgentId> acc{"a0"};
  auto p = proposer_on_any({}, "p0", msg::Any{1}, acc);
  EXPECT_TRUE(p.out.empty());
  auto q = proposer_on_propose(p.state, "p0", "x", acc);
  EXPECT_EQ(q.out.size(), 1u);
}

// ---------------------------------------------------------------------------
// Learner

TEST(Learner, FastQuorumOfFour) {
  const auto env = env5();
  LearnerState s;
  for (const char* a : {"a0", "a1", "a2"}) {
    auto step = learner_on_phase2b(s, a, msg::Phase2b{1, "x"}, env.config, env.scheme);
    EXPECT_FALSE(step.learned_now);
    s = step.state;
  }
  auto step = learner_on_phase2b(s, "a3", msg::Phase2b{1, "x"}, env.config, env.scheme);
  EXPECT_EQ(step.learned_now, MaybeValue("x"));
  EXPECT_TRUE(step.persisted);
}

TEST(Learner, ClassicQuorumOfThreeAndDuplicates) {
  const auto env = env5();
  LearnerState s;
  s = learner_on_phase2b(s, "a0", msg::Phase2b{2, "x"}, env.config, env.scheme).state;
  s = learner_on_phase2b(s, "a0", msg::Phase2b{2, "x"}, env.config, env.scheme).state;
  s = learner_on_phase2b(s, "a1", msg::Phase2b{2, "x"}, env.config, env.scheme).state;
  EXPECT_FALSE(s.learned);
  auto step = learner_on_phase2b(s, "a2", msg::Phase2b{2, "x"}, env.config, env.scheme);
  EXPECT_EQ(step.learned_now, MaybeValue("x"));
  EXPECT_EQ(learner_recover(nlohmann::json{{"learned", "x"}}).learned, MaybeValue("x"));
}

TEST(Learner, WriteOnceAndConflictSurfaced) {
  const auto env = env5();
  LearnerState s;
  s.learned = "x";
  for (const char* a : {"a0", "a1"}) s = learner_on_phase2b(s, a, msg::Phase2b{2, "y"}, env.config, env.scheme).state;
  auto step = learner_on_phase2b(s, "a2", msg::Phase2b{2, "y"}, env.config, env.scheme);
  EXPECT_EQ(step.state.learned, MaybeValue("x"));
  EXPECT_EQ(step.conflict, MaybeValue("y"));
}

// ---------------------------------------------------------------------------
// Agent wrapper

TEST(Agent, PersistsBeforeSendingAndRecovers) {
  const auto env = env5();
  Agent a("a0", Role::Acceptor);
  auto fx = a.handle(Message{"c0", "a0", msg::Phase1a{2}}, env);
  ASSERT_TRUE(fx.persist.has_value());
  EXPECT_EQ(fx.sends.size(), 1u);
  fx = a.handle(Message{"c0", "a0", msg::Phase2a{2, "x"}}, env);
  ASSERT_TRUE(fx.persist.has_value());
  const auto back = Agent::recover("a0", Role::Acceptor, *fx.persist);
  EXPECT_EQ(back.as<AcceptorState>(), (AcceptorState{2, 2, "x"}));
}

TEST(Agent, TimeoutStartsNextClassicRound) {
  auto env = env5();
  env.scheme = RoundScheme({"c0", "c1"});
  Agent c("c1", Role::Coordinator);
  auto fx = c.on_timeout(std::nullopt, env);
  // c1 owns only odd rounds, all fast, so it falls back to the first one.
  EXPECT_EQ(c.as<CoordinatorState>().current_round, 1u);
  EXPECT_EQ(fx.sends.size(), 5u);
  EXPECT_TRUE(c.on_timeout(2, env).sends.empty());  // foreign round
  EXPECT_TRUE(c.on_timeout(1, env).sends.empty());  // stale round
  EXPECT_EQ(c.on_timeout(5, env).sends.size(), 5u);

  Agent c0("c0", Role::Coordinator);
  c0.on_timeout(std::nullopt, env);
  EXPECT_EQ(c0.as<CoordinatorState>().current_round, 2u);
  Agent l("l0", Role::Learner);
  EXPECT_TRUE(l.on_timeout(std::nullopt, env).sends.empty());
}

}  // namespace
}  // namespace fpaxos
