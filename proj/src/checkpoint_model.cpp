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

#include "checkpoint_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace contsched {

std::vector<CheckpointSample> builtin_checkpoint_samples() {
  return {
      {1.0, 1.05, 1.26},    {100.0, 5.45, 5.0},   {200.0, 9.81, 9.22},
      {400.0, 19.6, 17.1},  {800.0, 41.0, 31.0},  {1638.4, 78.4, 61.8},
  };
}

std::vector<CheckpointSample> read_checkpoint_csv(std::istream& in) {
  std::vector<CheckpointSample> out;
  std::string line;
  long lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (header) {
      header = false;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    CheckpointSample s;
    std::string trailing;
    if (!(ls >> s.ram_mb >> s.create_s >> s.restore_s) || (ls >> trailing)) {
      throw IngestError("expected ram_mb,create_s,restore_s", lineno);
    }
    if (s.ram_mb <= 0 || s.create_s <= 0 || s.restore_s <= 0) {
      throw IngestError("checkpoint sample values must be positive", lineno);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<CheckpointSample> read_checkpoint_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint data '" + path + "'");
  return read_checkpoint_csv(in);
}

LinearCostModel fit_linear(std::span<const CheckpointSample> samples,
                           CheckpointPhase phase) {
  std::set<double> abscissae;
  for (const auto& s : samples) abscissae.insert(s.ram_mb);
  if (abscissae.size() < 2) {
    throw ContractViolation("linear fit needs at least two distinct RAM sizes");
  }
  auto y_of = [phase](const CheckpointSample& s) {
    return phase == CheckpointPhase::kCreate ? s.create_s : s.restore_s;
  };
  // Centered sums keep the normal equations well conditioned.
  const double n = static_cast<double>(samples.size());
  double mx = 0, my = 0;
  for (const auto& s : samples) {
    mx += s.ram_mb;
    my += y_of(s);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& s : samples) {
    double dx = s.ram_mb - mx, dy = y_of(s) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LinearCostModel m;
  m.slope_s_per_mb = sxy / sxx;
  m.intercept_s = my - m.slope_s_per_mb * mx;
  double sse = 0;
  for (const auto& s : samples) {
    double r = y_of(s) - (m.slope_s_per_mb * s.ram_mb + m.intercept_s);
    sse += r * r;
  }
  m.residual_rms_s = std::sqrt(sse / n);
  m.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  return m;
}

double predict(const LinearCostModel& model, double ram_mb) {
  return std::max(0.0, model.slope_s_per_mb * ram_mb + model.intercept_s);
}

double overhead_budget_check(const LinearCostModel& create,
                             const LinearCostModel& restore, double ram_mb,
                             int tasks_per_frame) {
  if (tasks_per_frame < 1) {
    throw ContractViolation("overhead budget needs at least one task per frame");
  }
  return tasks_per_frame * (predict(create, ram_mb) + predict(restore, ram_mb));
}

}  // namespace contsched
