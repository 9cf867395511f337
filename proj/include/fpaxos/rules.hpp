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
 *  \brief Coordinator value-selection rules.
 *
 *  Given the Phase 1b reports Q a coordinator collected, let k be the
 *  highest round anybody in Q voted in and V the set of values voted at k.
 *  Every rule here answers the same question: is the coordinator bound to
 *  propose a particular value, or may it propose anything?
 *
 *  - pick_value_original: the set-based rule. A value w is forced when V
 *    holds only w, or when w passes O4: some k-quorum R agrees with Q on
 *    (k, w) over Q n R. O4 is evaluated either by counting votes against a
 *    threshold or by enumerating every candidate R.
 *  - pick_value_intermediate: find the unique most voted w first, then
 *    gate it on O4.
 *  - pick_value_most_voted: drop the O4 gate.
 *  - pick_value_simplified: drop the single-element test too. Needs no
 *    quorum configuration and no round types.
 *
 *  None of the rules picks a value on its own when the choice is free;
 *  that is left to the caller's proposal pool.
 */

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fpaxos/common.hpp"
#include "fpaxos/quorum.hpp"

namespace fpaxos {

/// One acceptor's answer to Phase 1a: the last (round, value) it voted for.
/// voted_round is zero exactly when voted_value is empty.
struct Phase1bReport {
  AgentId acceptor;
  RoundNumber voted_round = 0;
  MaybeValue voted_value;

  friend bool operator==(const Phase1bReport&, const Phase1bReport&) = default;
};

using ReportSet = std::vector<Phase1bReport>;

struct VoteTally {
  RoundNumber max_round = 0;                   // k
  std::map<Value, std::uint32_t> value_counts;  // V with per-value counts T
  std::uint32_t reporters = 0;                  // |Q|
};

class CoordinatorChoice {
 public:
  static CoordinatorChoice free() { return CoordinatorChoice{}; }
  static CoordinatorChoice mandated(Value v) {
    CoordinatorChoice c;
    c.value_ = std::move(v);
    return c;
  }

  bool is_free() const { return !value_.has_value(); }
  bool is_mandated() const { return value_.has_value(); }
  const MaybeValue& value() const { return value_; }

  std::string to_string() const {
    return value_ ? "Mandated(" + *value_ + ")" : "Free";
  }

  friend bool operator==(const CoordinatorChoice&,
                         const CoordinatorChoice&) = default;

 private:
  MaybeValue value_;
};

/// How O4 is decided by the original and intermediate rules.
enum class O4Evaluator { Cardinality, Oracle };

/// Largest universe the subset-enumerating oracle accepts.
inline constexpr std::uint32_t kOracleMaxAcceptors = 20;

/// Throws InvalidArgument on duplicate acceptors or on a report whose
/// round and value disagree about whether it voted.
inline void validate_reports(const ReportSet& reports) {
  std::set<AgentId> seen;
  for (const auto& r : reports) {
    if (!seen.insert(r.acceptor).second) {
      throw InvalidArgument("duplicate report from acceptor " + r.acceptor);
    }
    if ((r.voted_round == 0) != !r.voted_value.has_value()) {
      throw InvalidArgument("report from " + r.acceptor +
                            " has round/value mismatch");
    }
  }
}

inline VoteTally tally_votes(const ReportSet& reports) {
  if (reports.empty()) throw InvalidArgument("empty report set");
  validate_reports(reports);
  VoteTally t;
  t.reporters = static_cast<std::uint32_t>(reports.size());
  for (const auto& r : reports) t.max_round = std::max(t.max_round, r.voted_round);
  if (t.max_round == 0) return t;
  for (const auto& r : reports) {
    if (r.voted_round == t.max_round) ++t.value_counts[*r.voted_value];
  }
  return t;
}

/// Vote count a value needs at round k to pass O4, for a report set that is
/// a minimum-size quorum of `current` type, with k a fast round:
/// N - E - F for a classic quorum and N - 2E for a fast one.
constexpr std::uint32_t o4_threshold(const QuorumConfig& c,
                                     RoundType current) noexcept {
  const auto n = c.n_acceptors, e = c.max_faults_fast, f = c.max_faults_classic;
  return current == RoundType::Classic ? n - e - f : n - 2 * e;
}

/// The same bound with the type of round k made explicit. The smallest
/// overlap of a |Q_current| set and a |Q_k| set inside N acceptors is
/// |Q_current| + |Q_k| - N; for a fast k this is the two-argument form.
constexpr std::uint32_t o4_threshold(const QuorumConfig& c, RoundType current,
                                     RoundType k_type) noexcept {
  return quorum_size(c, current) + quorum_size(c, k_type) - c.n_acceptors;
}

namespace detail {

inline bool votes_for(const Phase1bReport& r, RoundNumber k, const Value& v) {
  return r.voted_round == k && r.voted_value && *r.voted_value == v;
}

inline RoundNumber max_round(const ReportSet& reports) {
  RoundNumber k = 0;
  for (const auto& r : reports) k = std::max(k, r.voted_round);
  return k;
}

/// Pads the reporters with synthetic ids until there are n of them.
inline std::vector<AgentId> complete_universe(const ReportSet& reports,
                                              std::uint32_t n) {
  std::vector<AgentId> u;
  std::set<AgentId> have;
  for (const auto& r : reports) {
    u.push_back(r.acceptor);
    have.insert(r.acceptor);
  }
  for (std::uint32_t i = 0; u.size() < n; ++i) {
    AgentId id = "~absent" + std::to_string(i);
    if (!have.count(id)) u.push_back(std::move(id));
  }
  return u;
}

}  // namespace detail

/// O4 by brute force: is there a subset R of `universe` with at least
/// quorum_size(config, k_type) members such that every reporter in R voted
/// (k, candidate)? Enumerates all 2^N subsets.
inline bool o4_holds_oracle(const ReportSet& reports,
                            const std::vector<AgentId>& universe,
                            const QuorumConfig& config, RoundType k_type,
                            const Value& candidate) {
  if (universe.size() != config.n_acceptors) {
    throw InvalidArgument("universe size " + std::to_string(universe.size()) +
                          " != N=" + std::to_string(config.n_acceptors));
  }
  if (universe.size() > kOracleMaxAcceptors) {
    throw InvalidArgument("oracle enumeration capped at " +
                          std::to_string(kOracleMaxAcceptors) + " acceptors");
  }
  validate_reports(reports);
  const RoundNumber k = detail::max_round(reports);

  // Members of Q that disagree with (k, candidate) may not appear in R.
  std::uint32_t excluded = 0;
  for (const auto& r : reports) {
    auto it = std::find(universe.begin(), universe.end(), r.acceptor);
    if (it == universe.end()) {
      throw InvalidArgument("reporter " + r.acceptor + " not in universe");
    }
    if (!detail::votes_for(r, k, candidate)) {
      excluded |= 1u << (it - universe.begin());
    }
  }

  const std::uint32_t need = quorum_size(config, k_type);
  const std::uint64_t subsets = std::uint64_t{1} << universe.size();
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    const auto r = static_cast<std::uint32_t>(mask);
    if ((r & excluded) == 0 &&
        static_cast<std::uint32_t>(std::popcount(r)) >= need) {
      return true;
    }
  }
  return false;
}

/// O4 in closed form: the largest admissible R is everybody except the
/// reporters that disagree, so R exists iff N - |disagreeing| >= |Q_k|.
inline bool o4_holds_closed_form(const ReportSet& reports,
                                 const QuorumConfig& config, RoundType k_type,
                                 const Value& candidate) {
  validate_reports(reports);
  const RoundNumber k = detail::max_round(reports);
  std::uint32_t disagreeing = 0;
  for (const auto& r : reports) {
    if (!detail::votes_for(r, k, candidate)) ++disagreeing;
  }
  return config.n_acceptors - disagreeing >= quorum_size(config, k_type);
}

/// Inputs shared by the rules that need to evaluate O4.
struct RuleContext {
  QuorumConfig config;
  RoundType k_type = RoundType::Fast;
  // Kind of quorum the report set stands for. The coordinator always cuts
  // at a classic quorum.
  RoundType quorum_kind = RoundType::Classic;
  O4Evaluator evaluator = O4Evaluator::Cardinality;
  // Universe for the oracle; synthesized from the reporters when empty.
  std::vector<AgentId> universe;
};

namespace detail {

inline void require_quorum(const ReportSet& reports, const RuleContext& ctx) {
  const auto need = quorum_size(ctx.config, ctx.quorum_kind);
  if (reports.size() < need) {
    throw InvalidArgument("report set of " + std::to_string(reports.size()) +
                          " is smaller than a " +
                          std::string(to_string(ctx.quorum_kind)) +
                          " quorum (" + std::to_string(need) + ")");
  }
  if (reports.size() > ctx.config.n_acceptors) {
    throw InvalidArgument("more reports than acceptors");
  }
}

/// Each report beyond the quorum minimum is one fewer acceptor that could
/// sit outside Q, so the count threshold rises by one per surplus report.
inline bool o4_by_count(const VoteTally& t, const RuleContext& ctx,
                        const Value& w) {
  const auto surplus = t.reporters - quorum_size(ctx.config, ctx.quorum_kind);
  const auto needed =
      o4_threshold(ctx.config, ctx.quorum_kind, ctx.k_type) + surplus;
  auto it = t.value_counts.find(w);
  return it != t.value_counts.end() && it->second >= needed;
}

inline bool o4(const ReportSet& reports, const VoteTally& t,
               const RuleContext& ctx, const Value& w) {
  if (ctx.evaluator == O4Evaluator::Cardinality) return o4_by_count(t, ctx, w);
  const auto universe =
      ctx.universe.empty()
          ? complete_universe(reports, ctx.config.n_acceptors)
          : ctx.universe;
  return o4_holds_oracle(reports, universe, ctx.config, ctx.k_type, w);
}

/// The value voted strictly more often than every other, if any.
inline MaybeValue unique_most_voted(const VoteTally& t) {
  MaybeValue best;
  std::uint32_t best_count = 0;
  bool tied = false;
  for (const auto& [v, c] : t.value_counts) {
    if (c > best_count) {
      best = v;
      best_count = c;
      tied = false;
    } else if (c == best_count) {
      tied = true;
    }
  }
  if (tied) return std::nullopt;
  return best;
}

}  // namespace detail

inline CoordinatorChoice pick_value_original(const ReportSet& reports,
                                             const RuleContext& ctx) {
  detail::require_quorum(reports, ctx);
  const VoteTally t = tally_votes(reports);
  if (t.max_round == 0) return CoordinatorChoice::free();
  if (t.value_counts.size() == 1) {
    return CoordinatorChoice::mandated(t.value_counts.begin()->first);
  }
  MaybeValue chosen;
  for (const auto& [w, count] : t.value_counts) {
    if (!detail::o4(reports, t, ctx, w)) continue;
    if (chosen) {
      // Two values passing O4 means the quorum assumptions were broken
      // upstream, e.g. a classic round k that collected mixed votes.
      throw InvalidArgument("O4 holds for both " + *chosen + " and " + w);
    }
    chosen = w;
  }
  return chosen ? CoordinatorChoice::mandated(*chosen)
                : CoordinatorChoice::free();
}

inline CoordinatorChoice pick_value_intermediate(const ReportSet& reports,
                                                 const RuleContext& ctx) {
  detail::require_quorum(reports, ctx);
  const VoteTally t = tally_votes(reports);
  if (t.max_round == 0) return CoordinatorChoice::free();
  if (t.value_counts.size() == 1) {
    return CoordinatorChoice::mandated(t.value_counts.begin()->first);
  }
  const MaybeValue w = detail::unique_most_voted(t);
  if (w && detail::o4(reports, t, ctx, *w)) {
    return CoordinatorChoice::mandated(*w);
  }
  return CoordinatorChoice::free();
}

/// The intermediate rule with the O4 gate removed; the single-element test
/// is still there.
inline CoordinatorChoice pick_value_most_voted(const ReportSet& reports) {
  const VoteTally t = tally_votes(reports);
  if (t.max_round == 0) return CoordinatorChoice::free();
  if (t.value_counts.size() == 1) {
    return CoordinatorChoice::mandated(t.value_counts.begin()->first);
  }
  const MaybeValue w = detail::unique_most_voted(t);
  return w ? CoordinatorChoice::mandated(*w) : CoordinatorChoice::free();
}

/// If somebody voted, and one value at the highest round beats every other
/// value there, that value is mandated. Otherwise the choice is free.
inline CoordinatorChoice pick_value_simplified(const ReportSet& reports) {
  const VoteTally t = tally_votes(reports);
  if (t.max_round == 0) return CoordinatorChoice::free();
  const MaybeValue w = detail::unique_most_voted(t);
  return w ? CoordinatorChoice::mandated(*w) : CoordinatorChoice::free();
}

enum class RuleKind { Original, Intermediate, MostVoted, Simplified };

inline std::string_view to_string(RuleKind k) {
  switch (k) {
    case RuleKind::Original: return "original";
    case RuleKind::Intermediate: return "intermediate";
    case RuleKind::MostVoted: return "most-voted";
    case RuleKind::Simplified: return "simplified";
  }
  return "?";
}

inline RuleKind parse_rule_kind(std::string_view s) {
  if (s == "original") return RuleKind::Original;
  if (s == "intermediate") return RuleKind::Intermediate;
  if (s == "most-voted") return RuleKind::MostVoted;
  if (s == "simplified") return RuleKind::Simplified;
  throw InvalidArgument("unknown rule '" + std::string(s) + "'");
}

inline CoordinatorChoice apply_rule(RuleKind kind, const ReportSet& reports,
                                    const RuleContext& ctx) {
  switch (kind) {
    case RuleKind::Original: return pick_value_original(reports, ctx);
    case RuleKind::Intermediate: return pick_value_intermediate(reports, ctx);
    case RuleKind::MostVoted: return pick_value_most_voted(reports);
    case RuleKind::Simplified: return pick_value_simplified(reports);
  }
  return CoordinatorChoice::free();
}

}  // namespace fpaxos
