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

// Linear checkpoint/restore cost versus container RAM.

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace contsched {

struct CheckpointSample {
  double ram_mb = 0;
  double create_s = 0;
  double restore_s = 0;
};

struct LinearCostModel {
  double slope_s_per_mb = 0;
  double intercept_s = 0;
  double residual_rms_s = 0;
  double r_squared = 0;
};

enum class CheckpointPhase { kCreate, kRestore };

/// Docker checkpoint measurements at 1, 100, 200, 400, 800 MB and 1.6 GB
/// (stored as 1638.4 MB).
std::vector<CheckpointSample> builtin_checkpoint_samples();

/// Reads `ram_mb,create_s,restore_s` rows after a header line.
std::vector<CheckpointSample> read_checkpoint_csv(std::istream& in);
std::vector<CheckpointSample> read_checkpoint_csv(const std::string& path);

/// Ordinary least squares of time on RAM for one phase.
LinearCostModel fit_linear(std::span<const CheckpointSample> samples,
                           CheckpointPhase phase);

/// slope * ram + intercept, never negative.
double predict(const LinearCostModel& model, double ram_mb);

/// Seconds spent creating and restoring checkpoints for `tasks_per_frame`
/// containers of `ram_mb` each.
double overhead_budget_check(const LinearCostModel& create,
                             const LinearCostModel& restore, double ram_mb,
                             int tasks_per_frame);

}  // namespace contsched
