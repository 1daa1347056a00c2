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

// Scenario configuration and its `key = value` file format.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "container.hpp"
#include "errors.hpp"
#include "workload.hpp"

namespace contsched {

inline constexpr std::int64_t kDefaultHorizonSlots = 180 * 1440;
inline constexpr std::array<int, 5> kSeriesNodeCounts{1024, 1500, 2000, 3000, 4000};
inline constexpr int kContainerRepetitions = 50;
inline constexpr int kDefaultRepetitions = 100;

enum class ArrivalMode { kFixedQueue, kPoisson };
enum class AdditionalMode { kNone, kContainers, kPlain };
enum class SweepAxis { kNone, kNodes, kFrame, kPlainExecHours };

std::string_view to_string(ArrivalMode mode);
std::string_view to_string(AdditionalMode mode);
std::string_view to_string(SweepAxis axis);

struct ScenarioConfig {
  Family family = Family::L1;
  int n_nodes = 4000;

  ArrivalMode arrival = ArrivalMode::kFixedQueue;
  int queue_target = 100;
  double arrival_rate = 0;                 // jobs per slot, Poisson mode
  std::optional<double> target_load;       // auto-calibrate the rate

  AdditionalMode additional = AdditionalMode::kNone;
  SyncPolicy sync{};
  PlainAdditionalPolicy plain{};
  TaskSizeRange task_sizes{};

  std::int64_t horizon_slots = kDefaultHorizonSlots;
  std::int64_t warmup_slots = 0;
  std::uint64_t seed = 1;
  std::optional<int> repetitions;  // default depends on the additional mode

  std::optional<std::string> trace_path;
  TraceColumns trace_columns{};

  std::optional<double> l_default;  // baseline load for the trade-off factor

  SweepAxis sweep_axis = SweepAxis::kNone;
  std::vector<int> sweep_values;
  bool sweep_baseline = false;

  int effective_repetitions() const;
  /// Throws ConfigError on values outside their documented ranges.
  void validate() const;
  /// Stable textual identity of everything that affects one run except the
  /// seed; used to refuse aggregating unlike runs.
  std::string key() const;
};

/// Applies one `key = value` setting. Unknown keys throw ConfigError.
void apply_setting(ScenarioConfig& config, std::string_view key,
                   std::string_view value);

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

}  // namespace contsched
