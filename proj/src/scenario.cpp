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

#include "scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>

namespace contsched {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || p != value.data() + value.size()) {
    throw ConfigError(std::string(key) + ": cannot parse '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(std::string(key) + ": expected true/false");
}

std::vector<int> parse_int_list(std::string_view key, std::string_view value) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t end = value.find(',', pos);
    if (end == std::string_view::npos) end = value.size();
    out.push_back(parse_number<int>(key, trim(value.substr(pos, end - pos))));
    pos = end + 1;
  }
  return out;
}

bool in_set(int v, std::span<const int> set) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

}  // namespace

std::string_view to_string(ArrivalMode mode) {
  return mode == ArrivalMode::kFixedQueue ? "fixed" : "poisson";
}

std::string_view to_string(AdditionalMode mode) {
  switch (mode) {
    case AdditionalMode::kNone: return "none";
    case AdditionalMode::kContainers: return "containers";
    case AdditionalMode::kPlain: return "plain";
  }
  return "none";
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone: return "none";
    case SweepAxis::kNodes: return "n_nodes";
    case SweepAxis::kFrame: return "frame_min";
    case SweepAxis::kPlainExecHours: return "plain_exec_h";
  }
  return "none";
}

int ScenarioConfig::effective_repetitions() const {
  if (repetitions) return *repetitions;
  return additional == AdditionalMode::kContainers ? kContainerRepetitions
                                                   : kDefaultRepetitions;
}

void ScenarioConfig::validate() const {
  if (n_nodes < 1) throw ConfigError("n_nodes must be >= 1");
  if (horizon_slots < 1) throw ConfigError("horizon_slots must be >= 1");
  if (warmup_slots < 0 || warmup_slots >= horizon_slots) {
    throw ConfigError("warmup_slots must lie in [0, horizon_slots)");
  }
  if (repetitions && *repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (queue_target < 0) throw ConfigError("arrival.queue_length must be >= 0");
  if (arrival == ArrivalMode::kPoisson && !target_load && !trace_path &&
      !(arrival_rate > 0)) {
    throw ConfigError("poisson arrivals need arrival.rate > 0 or arrival.target_load");
  }
  if (target_load && !(*target_load > 0 && *target_load < 1)) {
    throw ConfigError("arrival.target_load must lie in (0, 1)");
  }
  if (additional == AdditionalMode::kContainers) {
    if (!in_set(sync.frame_min, kSyncFrames)) {
      throw ConfigError("additional.frame_min must be one of 30, 45, 60, 90, "
                        "120, 180, 240, 360");
    }
    try {
      sync.validate();
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what());
    }
  }
  if (additional == AdditionalMode::kPlain && !in_set(plain.exec_h, kPlainExecHours)) {
    throw ConfigError("additional.plain_exec_h must be one of 6, 12, 24, 48");
  }
  if (task_sizes.min_work < 1 || task_sizes.max_work < task_sizes.min_work) {
    throw ConfigError("additional.task_work_min_range must satisfy 1 <= lo <= hi");
  }
  if (sweep_axis != SweepAxis::kNone && sweep_values.empty()) {
    throw ConfigError("sweep.values is empty");
  }
}

std::string ScenarioConfig::key() const {
  std::ostringstream os;
  os << to_string(family) << '/' << n_nodes << '/' << to_string(arrival);
  if (trace_path) {
    std::string path = *trace_path;
    std::replace(path.begin(), path.end(), ',', ';');  // keeps the key CSV-safe
    os << "/trace:" << path;
  } else if (arrival == ArrivalMode::kFixedQueue) {
    os << ":" << queue_target;
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, ":%.17g", arrival_rate);
    os << buf;
  }
  os << '/' << to_string(additional);
  if (additional == AdditionalMode::kContainers) {
    os << ':' << sync.frame_min << ':' << sync.overhead_min << ':'
       << task_sizes.min_work << '-' << task_sizes.max_work;
  } else if (additional == AdditionalMode::kPlain) {
    os << ':' << plain.exec_h;
  }
  os << '/' << horizon_slots << '/' << warmup_slots;
  return os.str();
}

void apply_setting(ScenarioConfig& c, std::string_view key, std::string_view value) {
  if (key == "family") {
    c.family = parse_family(value);
  } else if (key == "n_nodes") {
    c.n_nodes = parse_number<int>(key, value);
  } else if (key == "arrival.mode") {
    if (value == "fixed" || value == "fixed_queue") {
      c.arrival = ArrivalMode::kFixedQueue;
    } else if (value == "poisson") {
      c.arrival = ArrivalMode::kPoisson;
    } else {
      throw ConfigError("arrival.mode must be fixed or poisson");
    }
  } else if (key == "arrival.queue_length") {
    c.queue_target = parse_number<int>(key, value);
  } else if (key == "arrival.rate") {
    c.arrival_rate = parse_number<double>(key, value);
  } else if (key == "arrival.target_load") {
    c.target_load = parse_number<double>(key, value);
  } else if (key == "additional.mode") {
    if (value == "none") {
      c.additional = AdditionalMode::kNone;
    } else if (value == "containers") {
      c.additional = AdditionalMode::kContainers;
    } else if (value == "plain") {
      c.additional = AdditionalMode::kPlain;
    } else {
      throw ConfigError("additional.mode must be none, containers or plain");
    }
  } else if (key == "additional.frame_min") {
    c.sync.frame_min = parse_number<int>(key, value);
  } else if (key == "additional.overhead_min") {
    c.sync.overhead_min = parse_number<int>(key, value);
  } else if (key == "additional.plain_exec_h") {
    c.plain.exec_h = parse_number<int>(key, value);
  } else if (key == "additional.task_work_min_range") {
    auto v = parse_int_list(key, value);
    if (v.size() != 2) throw ConfigError("additional.task_work_min_range needs lo,hi");
    c.task_sizes = {v[0], v[1]};
  } else if (key == "horizon_slots") {
    c.horizon_slots = parse_number<std::int64_t>(key, value);
  } else if (key == "warmup_slots") {
    c.warmup_slots = parse_number<std::int64_t>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "repetitions") {
    c.repetitions = parse_number<int>(key, value);
  } else if (key == "trace.path") {
    c.trace_path = std::string(value);
  } else if (key == "trace.columns") {
    c.trace_columns = parse_trace_columns(value);
  } else if (key == "l_default") {
    c.l_default = parse_number<double>(key, value);
  } else if (key == "sweep.axis") {
    if (value == "n_nodes") {
      c.sweep_axis = SweepAxis::kNodes;
    } else if (value == "frame_min") {
      c.sweep_axis = SweepAxis::kFrame;
    } else if (value == "plain_exec_h") {
      c.sweep_axis = SweepAxis::kPlainExecHours;
    } else if (value == "none") {
      c.sweep_axis = SweepAxis::kNone;
    } else {
      throw ConfigError("sweep.axis must be n_nodes, frame_min or plain_exec_h");
    }
  } else if (key == "sweep.values") {
    c.sweep_values = parse_int_list(key, value);
  } else if (key == "sweep.baseline") {
    c.sweep_baseline = parse_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig config;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace contsched
