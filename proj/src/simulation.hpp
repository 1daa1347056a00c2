// Copyright 2026 The contsched Authors
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

#include "metrics.hpp"
#include "scenario.hpp"

namespace contsched {

struct SimulationStats {
  std::uint64_t main_submitted = 0;
  std::uint64_t main_started = 0;
  std::uint64_t managers_started = 0;
  std::uint64_t plain_started = 0;
  // Reserved heads whose start slot was checked against the shadow slot they
  // were given when they first became head.
  std::uint64_t reservations_checked = 0;
  std::size_t max_main_queue = 0;
  std::int64_t container_work_min = 0;
  std::uint64_t tasks_completed = 0;
  std::uint64_t trace_skipped = 0;
};

struct SimulationResult {
  MetricsReport report;
  SimulationStats stats;
};

/// One deterministic simulation of `config` with `seed`. Per slot:
/// completions, arrivals, additional-queue replenishment, EASY scheduling,
/// accounting. Throws InvariantViolation on oversubscription, a reserved
/// head starting after its shadow slot, or broken accounting.
SimulationResult simulate(const ScenarioConfig& config, std::uint64_t seed);

MetricsReport run_scenario(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace contsched
