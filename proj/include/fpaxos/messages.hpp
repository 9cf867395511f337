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

#include <string>
#include <variant>

#include <json.hpp>

#include "fpaxos/common.hpp"

namespace fpaxos {

namespace msg {

/// A client proposal, handed to proposers and coordinators.
struct Propose {
  Value value;
  friend bool operator==(const Propose&, const Propose&) = default;
};

struct Phase1a {
  RoundNumber round = 0;
  friend bool operator==(const Phase1a&, const Phase1a&) = default;
};

struct Phase1b {
  RoundNumber round = 0;
  RoundNumber voted_round = 0;
  MaybeValue voted_value;
  friend bool operator==(const Phase1b&, const Phase1b&) = default;
};

/// A request to vote for `value` in `round`. Sent by the round's
/// coordinator, or by a proposer after an Any for that round.
struct Phase2a {
  RoundNumber round = 0;
  Value value;
  friend bool operator==(const Phase2a&, const Phase2a&) = default;
};

struct Any {
  RoundNumber round = 0;
  friend bool operator==(const Any&, const Any&) = default;
};

struct Phase2b {
  RoundNumber round = 0;
  Value value;
  friend bool operator==(const Phase2b&, const Phase2b&) = default;
};

}  // namespace msg

using Payload = std::variant<msg::Propose, msg::Phase1a, msg::Phase1b,
                             msg::Phase2a, msg::Any, msg::Phase2b>;

struct Message {
  AgentId from;
  AgentId to;
  Payload body;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&body);
  }

  friend bool operator==(const Message&, const Message&) = default;
};

inline std::string_view type_name(const Payload& p) {
  static constexpr std::string_view names[] = {"propose", "phase1a", "phase1b",
                                               "phase2a", "any",     "phase2b"};
  return names[p.index()];
}

inline nlohmann::json value_to_json(const MaybeValue& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline MaybeValue value_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_string()) throw InvalidArgument("value must be a string or null");
  return j.get<std::string>();
}

inline nlohmann::json to_json(const Message& m) {
  nlohmann::json j;
  j["type"] = type_name(m.body);
  j["from"] = m.from;
  j["to"] = m.to;
  std::visit(
      [&j](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, msg::Propose>) {
          j["value"] = b.value;
        } else if constexpr (std::is_same_v<T, msg::Phase1a> ||
                             std::is_same_v<T, msg::Any>) {
          j["round"] = b.round;
        } else if constexpr (std::is_same_v<T, msg::Phase1b>) {
          j["round"] = b.round;
          j["voted_round"] = b.voted_round;
          j["voted_value"] = value_to_json(b.voted_value);
        } else {
          j["round"] = b.round;
          j["value"] = b.value;
        }
      },
      m.body);
  return j;
}

inline Message message_from_json(const nlohmann::json& j) {
  try {
    Message m;
    m.from = j.at("from").get<std::string>();
    m.to = j.at("to").get<std::string>();
    const auto type = j.at("type").get<std::string>();
    if (type == "propose") {
      m.body = msg::Propose{j.at("value").get<std::string>()};
    } else if (type == "phase1a") {
      m.body = msg::Phase1a{j.at("round").get<RoundNumber>()};
    } else if (type == "phase1b") {
      m.body = msg::Phase1b{j.at("round").get<RoundNumber>(),
                            j.at("voted_round").get<RoundNumber>(),
                            value_from_json(j.at("voted_value"))};
    } else if (type == "phase2a") {
      m.body = msg::Phase2a{j.at("round").get<RoundNumber>(),
                            j.at("value").get<std::string>()};
    } else if (type == "any") {
      m.body = msg::Any{j.at("round").get<RoundNumber>()};
    } else if (type == "phase2b") {
      m.body = msg::Phase2b{j.at("round").get<RoundNumber>(),
                            j.at("value").get<std::string>()};
    } else {
      throw InvalidArgument("unknown message type '" + type + "'");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed message: ") + e.what());
  }
}

}  // namespace fpaxos
