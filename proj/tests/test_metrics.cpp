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

#include <vector>

#include "doctest.h"
#include "metrics.hpp"

using namespace contsched;

TEST_CASE("ledger records node-slots") {
  LoadLedger l(4, 10);
  l.record(LoadCategory::kMain, 0);
  CHECK(l.busy_main() == 0);
  l.record(LoadCategory::kMain, 5);
  CHECK(l.busy_main() == 5);
  CHECK_THROWS_AS(l.record(LoadCategory::kAux, -1), ContractViolation);
  l.record(LoadCategory::kPlain, 35);
  CHECK_THROWS_AS(l.record(LoadCategory::kContUseful, 1), InvariantViolation);
}

TEST_CASE("finalize") {
  LoadLedger empty(8, 100);
  MetricsReport r = finalize(empty);
  CHECK(r.l == 0);
  CHECK(r.u == 0);
  CHECK(r.idle_avg_nodes == 8);

  LoadLedger full(4000, 10);
  full.record(LoadCategory::kMain, 40000);
  r = finalize(full);
  CHECK(r.l == 1);
  CHECK(r.l_m == 1);
  CHECK(r.idle_avg_nodes == 0);

  LoadLedger mixed(100, 100);
  mixed.record(LoadCategory::kMain, 8000);
  mixed.record(LoadCategory::kContUseful, 1300);
  mixed.record(LoadCategory::kAux, 200);
  r = finalize(mixed);
  CHECK(r.l == doctest::Approx(0.95));
  CHECK(r.l_aux == doctest::Approx(0.02));
  CHECK(r.u == doctest::Approx(0.93));
  CHECK(r.idle_avg_nodes == doctest::Approx(5));
  CHECK(r.wasted_avg_nodes == doctest::Approx(7));
  CHECK(r.wasted_avg_nodes == doctest::Approx(r.idle_avg_nodes + 100 * r.l_aux));
  CHECK(r.busy_main + r.busy_cont_useful + r.busy_aux + r.busy_plain == 9500);
}

TEST_CASE("trade-off factor") {
  CHECK(*tradeoff_factor(0.95, 0.88, 0.90) == doctest::Approx(3.5));
  CHECK(*tradeoff_factor(0.993, 0.918, 0.924) == doctest::Approx(12.5));
  CHECK_FALSE(tradeoff_factor(0.99, 0.9, 0.9));
  CHECK_FALSE(tradeoff_factor(0.99, 0.95, 0.9));
}

TEST_CASE("aggregate") {
  MetricsReport a;
  a.scenario_key = "k";
  a.l = 0.9;
  a.F = 2.0;
  MetricsReport b = a;
  b.l = 1.0;
  b.F.reset();
  std::vector<MetricsReport> two{a, b};
  AggregateReport agg = aggregate(two);
  CHECK(agg.l.mean == doctest::Approx(0.95));
  CHECK(agg.l.sd == doctest::Approx(0.0707106781));
  CHECK(agg.F.count == 1);
  CHECK(agg.F.mean == 2.0);

  std::vector<MetricsReport> same{a, a};
  CHECK(aggregate(same).l.sd == 0);

  std::vector<MetricsReport> fifty(50, a);
  CHECK(aggregate(fifty).count == 50);

  MetricsReport other = a;
  other.scenario_key = "other";
  std::vector<MetricsReport> mixed{a, other};
  CHECK_THROWS_AS(aggregate(mixed), ContractViolation);
  CHECK_THROWS_AS(aggregate(std::span<const MetricsReport>{}), ContractViolation);
}
