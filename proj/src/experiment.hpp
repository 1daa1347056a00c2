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

// Seeded repetition sweeps, Poisson-rate calibration and result emission.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "scenario.hpp"

namespace contsched {

/// Runs `seeds` consecutive seeds starting at `seed_base`. Output order is by
/// seed regardless of `threads`. A failing run is rethrown with its seed.
std::vector<MetricsReport> run_repetitions(const ScenarioConfig& config,
                                           std::uint64_t seed_base, int seeds,
                                           unsigned threads = 1);

struct ArrivalCalibrationOptions {
  int seeds = 20;
  double tolerance = 0.005;
  int max_evaluations = 40;
  unsigned threads = 1;
};

struct ArrivalCalibration {
  double rate = 0;
  double achieved_load = 0;
  int evaluations = 0;
};

/// Poisson rate whose mean load over `options.seeds` runs lies within
/// `options.tolerance` of `target_load`. Bracketed bisection on the rate.
/// The scenario must have no additional queue.
ArrivalCalibration calibrate_arrival_rate(const ScenarioConfig& config,
                                          double target_load,
                                          const ArrivalCalibrationOptions& options = {});

/// Copy of `config` with a concrete Poisson rate: calibrates when only a
/// target load is given.
ScenarioConfig resolve_arrival_rate(const ScenarioConfig& config,
                                    const ArrivalCalibrationOptions& options = {});

struct ResultRow {
  std::string scenario_id;
  std::uint64_t seed_base = 0;
  Family family = Family::L1;
  int n_nodes = 0;
  AdditionalMode mode = AdditionalMode::kNone;
  std::optional<int> frame_min;
  std::optional<int> plain_exec_h;
  double arrival_rate = 0;
  int reps = 0;
  double l_mean = 0, l_sd = 0;
  double l_m_mean = 0, l_m_sd = 0;
  double l_aux_mean = 0, l_cont_mean = 0, l_plain_mean = 0;
  double u_mean = 0, u_sd = 0;
  std::optional<double> F_mean;
  int F_defined_count = 0;
  double idle_avg_mean = 0, wasted_avg_mean = 0;
  std::int64_t horizon_slots = 0;

  bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  SweepAxis axis = SweepAxis::kNone;
  std::optional<double> l_default;
};

/// Builds one row from the repetitions of a single scenario. Per-run
/// trade-off factors use `l_default` when given.
ResultRow summarize(const ScenarioConfig& config, std::uint64_t seed_base,
                    std::span<const MetricsReport> reports,
                    std::optional<double> l_default);

struct SweepOptions {
  unsigned threads = 1;
  ArrivalCalibrationOptions calibration{};
};

/// Runs every axis point of `config` (a single point without an axis).
/// With `sweep_baseline`, the matching scenario without an additional queue
/// is run first, emitted as its own row and used as l_default.
ResultTable run_sweep(const ScenarioConfig& config, const SweepOptions& options = {});

extern const char* const kCsvHeader;

void write_csv(const ResultTable& table, std::ostream& out);
void write_csv(const ResultTable& table, const std::string& path);
ResultTable read_csv(std::istream& in);

/// Per-family TSV (`x`, `series`, `value`): the l_default line, l_m and
/// either u (containers) or l (otherwise) against the sweep axis. Returns
/// the files written.
std::vector<std::string> write_plot_data(const ResultTable& table,
                                         const std::string& directory,
                                         const std::string& stem);

}  // namespace contsched
