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

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpaxos/common.hpp"

namespace fpaxos {

struct RoundId {
  RoundNumber number = 0;
  RoundType type = RoundType::Classic;
  AgentId coordinator;
};

/// Maps every round number to its type and coordinator.
///
/// By default odd rounds are fast and round r belongs to coordinator
/// r mod C. Scenarios can make every round fast, none, or name the fast
/// rounds explicitly.
class RoundScheme {
 public:
  enum class FastRounds { Odd, All, None, Listed };

  RoundScheme() = default;
  explicit RoundScheme(std::vector<AgentId> coordinators,
                       FastRounds fast = FastRounds::Odd,
                       std::set<RoundNumber> listed = {})
      : coordinators_(std::move(coordinators)),
        fast_(fast),
        listed_(std::move(listed)) {
    if (coordinators_.empty()) {
      throw InvalidArgument("round scheme needs at least one coordinator");
    }
  }

  RoundType type(RoundNumber r) const {
    switch (fast_) {
      case FastRounds::Odd: return r % 2 == 1 ? RoundType::Fast : RoundType::Classic;
      case FastRounds::All: return RoundType::Fast;
      case FastRounds::None: return RoundType::Classic;
      case FastRounds::Listed:
        return listed_.count(r) ? RoundType::Fast : RoundType::Classic;
    }
    return RoundType::Classic;
  }

  const AgentId& coordinator(RoundNumber r) const {
    return coordinators_.at(r % coordinators_.size());
  }

  RoundId id(RoundNumber r) const { return RoundId{r, type(r), coordinator(r)}; }

  const std::vector<AgentId>& coordinators() const { return coordinators_; }

  /// Smallest round above `after` owned by `self` with type `want`, or the
  /// smallest owned round of any type if none within a full cycle.
  std::optional<RoundNumber> next_owned(const AgentId& self, RoundNumber after,
                                        RoundType want) const {
    const RoundNumber window = 4 * coordinators_.size() + 4 +
                               (listed_.empty() ? 0 : *listed_.rbegin());
    std::optional<RoundNumber> fallback;
    for (RoundNumber r = after + 1; r <= after + window; ++r) {
      if (coordinator(r) != self) continue;
      if (type(r) == want) return r;
      if (!fallback) fallback = r;
    }
    return fallback;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["coordinators"] = coordinators_;
    switch (fast_) {
      case FastRounds::Odd: j["fast_rounds"] = "odd"; break;
      case FastRounds::All: j["fast_rounds"] = "all"; break;
      case FastRounds::None: j["fast_rounds"] = "none"; break;
      case FastRounds::Listed: j["fast_rounds"] = listed_; break;
    }
    return j;
  }

  static RoundScheme from_json(std::vector<AgentId> coordinators,
                               const nlohmann::json& fast) {
    if (fast.is_null() || fast == "odd") return RoundScheme(std::move(coordinators));
    if (fast == "all") return RoundScheme(std::move(coordinators), FastRounds::All);
    if (fast == "none") return RoundScheme(std::move(coordinators), FastRounds::None);
    if (fast.is_array()) {
      std::set<RoundNumber> listed;
      for (const auto& r : fast) listed.insert(r.get<RoundNumber>());
      return RoundScheme(std::move(coordinators), FastRounds::Listed,
                         std::move(listed));
    }
    throw InvalidArgument("fast_rounds must be odd, all, none or a list");
  }

 private:
  std::vector<AgentId> coordinators_{"c0"};
  FastRounds fast_ = FastRounds::Odd;
  std::set<RoundNumber> listed_;
};

}  // namespace fpaxos
