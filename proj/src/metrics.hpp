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

// Node-slot accounting and load metrics.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "errors.hpp"

namespace contsched {

enum class LoadCategory { kMain, kContUseful, kAux, kPlain };

class LoadLedger {
 public:
  LoadLedger(int n_nodes, std::int64_t horizon_slots);

  void record(LoadCategory category, std::int64_t node_slots);

  int n_nodes() const { return n_nodes_; }
  std::int64_t horizon_slots() const { return horizon_slots_; }
  std::int64_t capacity() const { return capacity_; }
  std::int64_t busy_main() const { return busy_[0]; }
  std::int64_t busy_cont_useful() const { return busy_[1]; }
  std::int64_t busy_aux() const { return busy_[2]; }
  std::int64_t busy_plain() const { return busy_[3]; }
  std::int64_t busy_total() const { return busy_[0] + busy_[1] + busy_[2] + busy_[3]; }

 private:
  int n_nodes_;
  std::int64_t horizon_slots_;
  std::int64_t capacity_;
  std::int64_t busy_[4] = {0, 0, 0, 0};
};

struct MetricsReport {
  std::string scenario_key;
  int n_nodes = 0;
  std::int64_t horizon_slots = 0;

  std::int64_t busy_main = 0;
  std::int64_t busy_cont_useful = 0;
  std::int64_t busy_aux = 0;
  std::int64_t busy_plain = 0;

  double l = 0;
  double l_m = 0;
  double l_aux = 0;
  double l_cont = 0;
  double l_plain = 0;
  double u = 0;
  std::optional<double> F;
  double idle_avg_nodes = 0;
  double wasted_avg_nodes = 0;
};

MetricsReport finalize(const LoadLedger& ledger, std::string scenario_key = {});

/// (u - l_m) / (l_default - l_m); empty unless l_m < l_default.
std::optional<double> tradeoff_factor(double u, double l_m, double l_default);

struct MeanSd {
  double mean = 0;
  double sd = 0;
  std::size_t count = 0;
};

struct AggregateReport {
  std::string scenario_key;
  int n_nodes = 0;
  std::int64_t horizon_slots = 0;
  std::size_t count = 0;
  MeanSd l, l_m, l_aux, l_cont, l_plain, u, idle_avg_nodes, wasted_avg_nodes;
  MeanSd F;  // over runs where F is defined; F.count is the defined count
};

/// Mean and sample standard deviation per metric across repetitions of one
/// scenario. Throws ContractViolation on fewer than one report or mixed
/// scenarios.
AggregateReport aggregate(std::span<const MetricsReport> reports);

MeanSd mean_sd(std::span<const double> values);

}  // namespace contsched
