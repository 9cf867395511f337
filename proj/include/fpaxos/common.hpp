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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fpaxos {

/// Round numbers. Zero is reserved for "never voted"; real rounds start at 1.
using RoundNumber = std::uint64_t;

/// Agent identifiers are short printable names ("a0", "c0", "p1", ...).
using AgentId = std::string;

/// Values are opaque byte strings. A missing value is std::nullopt.
using Value = std::string;
using MaybeValue = std::optional<Value>;

/// Version tag written into every file this library produces.
inline constexpr int kFormatVersion = 1;

enum class RoundType { Classic, Fast };

inline std::string_view to_string(RoundType t) {
  return t == RoundType::Fast ? "fast" : "classic";
}

/// Bad input to an operation: a malformed config, report set, scenario or
/// command line.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a replayed run does not reproduce its recorded trace.
class NondeterminismError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline RoundType parse_round_type(std::string_view s) {
  if (s == "fast") return RoundType::Fast;
  if (s == "classic") return RoundType::Classic;
  throw InvalidArgument("unknown round type '" + std::string(s) + "'");
}

}  // namespace fpaxos
