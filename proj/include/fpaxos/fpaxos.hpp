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

#include "fpaxos/campaign.hpp"
#include "fpaxos/checker.hpp"
#include "fpaxos/common.hpp"
#include "fpaxos/messages.hpp"
#include "fpaxos/protocol.hpp"
#include "fpaxos/quorum.hpp"
#include "fpaxos/round_scheme.hpp"
#include "fpaxos/rules.hpp"
#include "fpaxos/scenario.hpp"
#include "fpaxos/simnet.hpp"
#include "fpaxos/stable_store.hpp"
#include "fpaxos/sweep.hpp"
#include "fpaxos/trace.hpp"
