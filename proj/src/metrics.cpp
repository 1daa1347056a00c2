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

#include "metrics.hpp"

#include <cmath>
#include <vector>

namespace contsched {

LoadLedger::LoadLedger(int n_nodes, std::int64_t horizon_slots)
    : n_nodes_(n_nodes),
      horizon_slots_(horizon_slots),
      capacity_(static_cast<std::int64_t>(n_nodes) * horizon_slots) {
  if (n_nodes < 1) throw ContractViolation("ledger needs at least one node");
  if (horizon_slots < 0) throw ContractViolation("negative horizon");
}

void LoadLedger::record(LoadCategory category, std::int64_t node_slots) {
  if (node_slots < 0) throw ContractViolation("negative node-slot count");
  if (busy_total() + node_slots > capacity_) {
    throw InvariantViolation("load ledger over capacity: " +
                             std::to_string(busy_total() + node_slots) + " > " +
                             std::to_string(capacity_) + " node-slots");
  }
  busy_[static_cast<int>(category)] += node_slots;
}

MetricsReport finalize(const LoadLedger& ledger, std::string scenario_key) {
  MetricsReport r;
  r.scenario_key = std::move(scenario_key);
  r.n_nodes = ledger.n_nodes();
  r.horizon_slots = ledger.horizon_slots();
  r.busy_main = ledger.busy_main();
  r.busy_cont_useful = ledger.busy_cont_useful();
  r.busy_aux = ledger.busy_aux();
  r.busy_plain = ledger.busy_plain();
  const double cap = static_cast<double>(ledger.capacity());
  if (cap > 0) {
    r.l = static_cast<double>(ledger.busy_total()) / cap;
    r.l_m = static_cast<double>(r.busy_main) / cap;
    r.l_cont = static_cast<double>(r.busy_cont_useful) / cap;
    r.l_aux = static_cast<double>(r.busy_aux) / cap;
    r.l_plain = static_cast<double>(r.busy_plain) / cap;
    // Same ratio as l - l_aux, without the extra rounding step.
    r.u = static_cast<double>(ledger.busy_total() - r.busy_aux) / cap;
  }
  r.idle_avg_nodes = r.n_nodes * (1.0 - r.l);
  r.wasted_avg_nodes = r.n_nodes * (1.0 - r.u);
  return r;
}

std::optional<double> tradeoff_factor(double u, double l_m, double l_default) {
  if (!(l_m < l_default)) return std::nullopt;
  return (u - l_m) / (l_default - l_m);
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd out;
  out.count = values.size();
  if (values.empty()) return out;
  double sum = 0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

AggregateReport aggregate(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw ContractViolation("nothing to aggregate");
  const auto& first = reports.front();
  for (const auto& r : reports) {
    if (r.scenario_key != first.scenario_key || r.n_nodes != first.n_nodes ||
        r.horizon_slots != first.horizon_slots) {
      throw ContractViolation("cannot aggregate reports of different scenarios ('" +
                              first.scenario_key + "' vs '" + r.scenario_key + "')");
    }
  }
  AggregateReport a;
  a.scenario_key = first.scenario_key;
  a.n_nodes = first.n_nodes;
  a.horizon_slots = first.horizon_slots;
  a.count = reports.size();

  std::vector<double> buf;
  buf.reserve(reports.size());
  auto fold = [&](auto field) {
    buf.clear();
    for (const auto& r : reports) buf.push_back(field(r));
    return mean_sd(buf);
  };
  a.l = fold([](const MetricsReport& r) { return r.l; });
  a.l_m = fold([](const MetricsReport& r) { return r.l_m; });
  a.l_aux = fold([](const MetricsReport& r) { return r.l_aux; });
  a.l_cont = fold([](const MetricsReport& r) { return r.l_cont; });
  a.l_plain = fold([](const MetricsReport& r) { return r.l_plain; });
  a.u = fold([](const MetricsReport& r) { return r.u; });
  a.idle_avg_nodes = fold([](const MetricsReport& r) { return r.idle_avg_nodes; });
  a.wasted_avg_nodes = fold([](const MetricsReport& r) { return r.wasted_avg_nodes; });
  buf.clear();
  for (const auto& r : reports) {
    if (r.F) buf.push_back(*r.F);
  }
  a.F = mean_sd(buf);
  return a;
}

}  // namespace contsched
