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
 *  \brief Cardinality-based quorum configurations.
 *
 *  A configuration over N acceptors tolerates F failures in classic rounds
 *  and E failures in fast rounds. Any set of at least N - F acceptors is a
 *  classic quorum and any set of at least N - E acceptors is a fast quorum.
 *  The two intersection requirements reduce to N > 2F and N > 2E + F, and
 *  E <= F is assumed throughout.
 */

#include <algorithm>
#include <cstdint>
#include <string>
#include <type_traits>
#include <variant>

#include "fpaxos/common.hpp"

namespace fpaxos {

struct QuorumConfig {
  std::uint32_t n_acceptors = 1;
  std::uint32_t max_faults_classic = 0;  // F
  std::uint32_t max_faults_fast = 0;     // E
  std::uint32_t classic_quorum_size = 1;
  std::uint32_t fast_quorum_size = 1;

  friend bool operator==(const QuorumConfig&, const QuorumConfig&) = default;
};

namespace policy {
struct MaximizeE {};
struct MaximizeF {};
struct Explicit {
  std::uint32_t e = 0;
  std::uint32_t f = 0;
};
}  // namespace policy

using QuorumPolicy =
    std::variant<policy::MaximizeE, policy::MaximizeF, policy::Explicit>;

/// True iff (n, e, f) satisfies n > 2f, n > 2e + f and e <= f.
constexpr bool validate_config(std::int64_t n, std::int64_t e,
                               std::int64_t f) noexcept {
  if (n < 1 || e < 0 || f < 0) return false;
  return n > 2 * f && n > 2 * e + f && e <= f;
}

namespace detail {
constexpr std::uint32_t ceil_div(std::uint32_t a, std::uint32_t b) {
  return (a + b - 1) / b;
}
}  // namespace detail

inline QuorumConfig make_config(std::uint32_t n, std::uint32_t e,
                                std::uint32_t f) {
  if (!validate_config(n, e, f)) {
    throw InvalidArgument("invalid quorum config N=" + std::to_string(n) +
                          " E=" + std::to_string(e) +
                          " F=" + std::to_string(f) +
                          " (need N > 2F, N > 2E + F, E <= F)");
  }
  return QuorumConfig{n, f, e, n - f, n - e};
}

/// Builds the configuration for n acceptors under the given policy.
///
/// MaximizeE sets E = F = ceil(n/3) - 1. MaximizeF sets F = ceil(n/2) - 1
/// and E = min(floor(n/4), F). Both are floored at zero so that n = 1 and
/// n = 2 yield the degenerate no-fault configurations.
inline QuorumConfig derive_config(std::uint32_t n, const QuorumPolicy& p) {
  if (n < 1) throw InvalidArgument("need at least one acceptor");
  return std::visit(
      [n](const auto& pol) -> QuorumConfig {
        using P = std::decay_t<decltype(pol)>;
        if constexpr (std::is_same_v<P, policy::MaximizeE>) {
          std::uint32_t f = detail::ceil_div(n, 3) - 1;
          return make_config(n, f, f);
        } else if constexpr (std::is_same_v<P, policy::MaximizeF>) {
          std::uint32_t f = detail::ceil_div(n, 2) - 1;
          std::uint32_t e = std::min(n / 4, f);
          return make_config(n, e, f);
        } else {
          return make_config(n, pol.e, pol.f);
        }
      },
      p);
}

constexpr std::uint32_t quorum_size(const QuorumConfig& c,
                                    RoundType t) noexcept {
  return t == RoundType::Fast ? c.fast_quorum_size : c.classic_quorum_size;
}

/// Parses "max-e", "max-f" or "explicit" (the latter needs e and f).
inline QuorumPolicy parse_policy(const std::string& name, std::int64_t e = -1,
                                 std::int64_t f = -1) {
  if (name == "max-e") return policy::MaximizeE{};
  if (name == "max-f") return policy::MaximizeF{};
  if (name == "explicit") {
    if (e < 0 || f < 0) {
      throw InvalidArgument("explicit policy needs both E and F");
    }
    return policy::Explicit{static_cast<std::uint32_t>(e),
                            static_cast<std::uint32_t>(f)};
  }
  throw InvalidArgument("unknown quorum policy '" + name + "'");
}

inline std::string policy_name(const QuorumPolicy& p) {
  switch (p.index()) {
    case 0: return "max-e";
    case 1: return "max-f";
    default: return "explicit";
  }
}

}  // namespace fpaxos
