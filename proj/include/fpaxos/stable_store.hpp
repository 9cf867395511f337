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

#include <map>

#include <json.hpp>

#include "fpaxos/common.hpp"

namespace fpaxos {

/// Per-agent durable storage that outlives agent crashes. A write is
/// durable as soon as write() returns.
class StableStore {
 public:
  void write(const AgentId& agent, nlohmann::json state) {
    data_[agent] = std::move(state);
    ++writes_;
  }

  /// Last durable write for `agent`, or null if it never wrote.
  nlohmann::json read(const AgentId& agent) const {
    auto it = data_.find(agent);
    return it == data_.end() ? nlohmann::json(nullptr) : it->second;
  }

  std::size_t writes() const { return writes_; }

 private:
  std::map<AgentId, nlohmann::json> data_;
  std::size_t writes_ = 0;
};

}  // namespace fpaxos
