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
 *  \brief Simulation traces and their JSON-lines form.
 *
 *  A trace file holds one JSON object per line: a header carrying the
 *  scenario and seed, one record per processed event, and an end marker.
 *
 *      {"type":"header","format_version":1,"seed":7,"scenario":{...}}
 *      {"type":"event","seq":0,"time":0,"agent":"a0","kind":"init",...}
 *      ...
 *      {"type":"end","truncated":false,"end_time":6}
 *
 *  Record kinds: init, inject, deliver, timeout, crash, recover, arm,
 *  discard. A record lists the durable write (`persist`) ahead of the
 *  messages it sent; each send carries its delivery times (empty when the
 *  network dropped it) or `suppressed` when the sender crashed first.
 */

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpaxos/common.hpp"
#include "fpaxos/messages.hpp"

namespace fpaxos {

struct SendRecord {
  Message msg;
  std::vector<std::uint64_t> deliver_at;
  bool suppressed = false;
};

struct TraceRecord {
  std::uint64_t seq = 0;
  std::uint64_t time = 0;
  AgentId agent;
  std::string kind;
  std::optional<Message> input;
  std::optional<RoundNumber> timeout_round;
  std::optional<nlohmann::json> persist;
  std::optional<nlohmann::json> restored;
  std::string digest;
  std::vector<SendRecord> sends;
  MaybeValue learned;
  MaybeValue conflict;
};

struct Trace {
  nlohmann::json scenario;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  bool truncated = false;
  std::uint64_t end_time = 0;
};

inline nlohmann::json to_json(const TraceRecord& r) {
  nlohmann::json j{{"type", "event"}, {"seq", r.seq},   {"time", r.time},
                   {"agent", r.agent}, {"kind", r.kind}, {"digest", r.digest}};
  if (r.input) j["input"] = to_json(*r.input);
  if (r.timeout_round) j["timeout_round"] = *r.timeout_round;
  if (r.persist) j["persist"] = *r.persist;
  if (r.restored) j["restored"] = *r.restored;
  if (!r.sends.empty()) {
    auto& arr = j["sends"] = nlohmann::json::array();
    for (const auto& s : r.sends) {
      nlohmann::json sj{{"msg", to_json(s.msg)}, {"deliver_at", s.deliver_at}};
      if (s.suppressed) sj["suppressed"] = true;
      arr.push_back(sj);
    }
  }
  if (r.learned) j["learned"] = *r.learned;
  if (r.conflict) j["conflict"] = *r.conflict;
  return j;
}

inline TraceRecord record_from_json(const nlohmann::json& j) {
  TraceRecord r;
  r.seq = j.at("seq").get<std::uint64_t>();
  r.time = j.at("time").get<std::uint64_t>();
  r.agent = j.at("agent").get<std::string>();
  r.kind = j.at("kind").get<std::string>();
  r.digest = j.value("digest", std::string{});
  if (j.contains("input")) r.input = message_from_json(j.at("input"));
  if (j.contains("timeout_round")) r.timeout_round = j.at("timeout_round").get<RoundNumber>();
  if (j.contains("persist")) r.persist = j.at("persist");
  if (j.contains("restored")) r.restored = j.at("restored");
  for (const auto& s : j.value("sends", nlohmann::json::array())) {
    r.sends.push_back({message_from_json(s.at("msg")),
                       s.at("deliver_at").get<std::vector<std::uint64_t>>(),
                       s.value("suppressed", false)});
  }
  if (j.contains("learned")) r.learned = j.at("learned").get<std::string>();
  if (j.contains("conflict")) r.conflict = j.at("conflict").get<std::string>();
  return r;
}

/// The canonical byte form of a trace; determinism is judged on this.
inline std::string to_jsonl(const Trace& t) {
  std::string out;
  nlohmann::json header{{"type", "header"},
                        {"format_version", kFormatVersion},
                        {"seed", t.seed},
                        {"scenario", t.scenario}};
  out += header.dump() + "\n";
  for (const auto& r : t.records) out += to_json(r).dump() + "\n";
  nlohmann::json end{{"type", "end"}, {"truncated", t.truncated}, {"end_time", t.end_time}};
  out += end.dump() + "\n";
  return out;
}

inline Trace trace_from_jsonl(const std::string& text) {
  Trace t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false, have_end = false;
  std::size_t lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        if (j.at("format_version").get<int>() != kFormatVersion) {
          throw InvalidArgument("unsupported trace format_version");
        }
        t.seed = j.at("seed").get<std::uint64_t>();
        t.scenario = j.at("scenario");
        have_header = true;
      } else if (type == "event") {
        t.records.push_back(record_from_json(j));
      } else if (type == "end") {
        t.truncated = j.at("truncated").get<bool>();
        t.end_time = j.at("end_time").get<std::uint64_t>();
        have_end = true;
      } else {
        throw InvalidArgument("unknown trace line type '" + type + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed trace at line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!have_header || !have_end) throw InvalidArgument("trace lacks header or end line");
  return t;
}

}  // namespace fpaxos
