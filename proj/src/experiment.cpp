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

#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "simulation.hpp"
#include "workload.hpp"

namespace contsched {

namespace {

[[noreturn]] void rethrow_with_seed(std::exception_ptr error, std::uint64_t seed) {
  const std::string prefix = "seed " + std::to_string(seed) + ": ";
  try {
    std::rethrow_exception(error);
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const IngestError& e) {
    throw IngestError(prefix + e.what(), 0);
  } catch (const ContractViolation& e) {
    throw ContractViolation(prefix + e.what());
  } catch (const std::exception& e) {
    throw Error(prefix + e.what());
  }
}

double mean_load(std::span<const MetricsReport> reports) {
  double sum = 0;
  for (const auto& r : reports) sum += r.l;
  return sum / static_cast<double>(reports.size());
}

double mean_job_size(Family family, int n_nodes) {
  JobGenerator gen(calibrated_model(family), 0x51e5eedull, n_nodes);
  constexpr int kDraws = 200000;
  double sum = 0;
  for (int i = 0; i < kDraws; ++i) {
    JobSpec j = gen.next(0);
    sum += static_cast<double>(j.nodes) * j.exec_min;
  }
  return sum / kDraws;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
}

template <typename T>
T csv_number(const std::string& field, long line) {
  T out{};
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc() || p != field.data() + field.size()) {
    throw IngestError("bad CSV number '" + field + "'", line);
  }
  return out;
}

AdditionalMode parse_mode(const std::string& s, long line) {
  if (s == "none") return AdditionalMode::kNone;
  if (s == "containers") return AdditionalMode::kContainers;
  if (s == "plain") return AdditionalMode::kPlain;
  throw IngestError("bad mode '" + s + "'", line);
}

ScenarioConfig at_axis_point(const ScenarioConfig& base, int value) {
  ScenarioConfig c = base;
  switch (base.sweep_axis) {
    case SweepAxis::kNodes: c.n_nodes = value; break;
    case SweepAxis::kFrame: c.sync.frame_min = value; break;
    case SweepAxis::kPlainExecHours: c.plain.exec_h = value; break;
    case SweepAxis::kNone: break;
  }
  c.validate();
  return c;
}

double axis_value(const ResultRow& row, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNodes: return row.n_nodes;
    case SweepAxis::kFrame: return row.frame_min.value_or(0);
    case SweepAxis::kPlainExecHours: return row.plain_exec_h.value_or(0);
    case SweepAxis::kNone: return 0;
  }
  return 0;
}

}  // namespace

std::vector<MetricsReport> run_repetitions(const ScenarioConfig& config,
                                           std::uint64_t seed_base, int seeds,
                                           unsigned threads) {
  if (seeds < 1) throw ContractViolation("need at least one repetition");
  std::vector<MetricsReport> reports(static_cast<std::size_t>(seeds));
  std::vector<std::exception_ptr> errors(reports.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < reports.size(); i = next++) {
      try {
        reports[i] = run_scenario(config, seed_base + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n_threads =
      std::clamp<unsigned>(threads, 1, static_cast<unsigned>(reports.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i]) rethrow_with_seed(errors[i], seed_base + i);
  }
  return reports;
}

ArrivalCalibration calibrate_arrival_rate(const ScenarioConfig& config,
                                          double target_load,
                                          const ArrivalCalibrationOptions& options) {
  if (config.additional != AdditionalMode::kNone) {
    throw ContractViolation("arrival calibration runs without an additional queue");
  }
  if (config.trace_path) {
    throw ContractViolation("arrival calibration needs the synthetic workload");
  }
  if (!(target_load > 0 && target_load < 1)) {
    throw CalibrationError("target load " + format_double(target_load) +
                           " is unreachable; it must lie in (0, 1)");
  }
  ScenarioConfig probe = config;
  probe.arrival = ArrivalMode::kPoisson;
  probe.target_load.reset();

  ArrivalCalibration best;
  double best_err = INFINITY;
  int evaluations = 0;
  auto eval = [&](double rate) {
    if (evaluations >= options.max_evaluations) {
      throw CalibrationError("arrival calibration exceeded " +
                             std::to_string(options.max_evaluations) +
                             " evaluations; best rate " + format_double(best.rate) +
                             " gives load " + format_double(best.achieved_load));
    }
    ++evaluations;
    probe.arrival_rate = rate;
    auto reports = run_repetitions(probe, config.seed, options.seeds, options.threads);
    double load = mean_load(reports);
    if (std::abs(load - target_load) < best_err) {
      best_err = std::abs(load - target_load);
      best = {rate, load, evaluations};
    }
    return load;
  };
  // Half the tolerance on the calibration seeds leaves room for seed noise.
  const double accept = options.tolerance / 2;
  auto done = [&](double load) { return std::abs(load - target_load) <= accept; };

  // Linear estimate from the offered load.
  const double r0 = target_load * config.n_nodes / mean_job_size(config.family, config.n_nodes);
  double lo = r0, hi = r0;
  double load_lo = eval(r0), load_hi = load_lo;
  if (done(load_lo)) return best;
  if (load_lo < target_load) {
    hi = r0 * 1.05;
    load_hi = eval(hi);
    while (load_hi < target_load) {
      if (done(load_hi)) return best;
      if (hi > 8 * r0) {
        throw CalibrationError("target load " + format_double(target_load) +
                               " unreachable: load saturates at " +
                               format_double(load_hi));
      }
      lo = hi;
      load_lo = load_hi;
      hi *= 1.25;
      load_hi = eval(hi);
    }
  } else {
    lo = r0 * 0.95;
    load_lo = eval(lo);
    while (load_lo > target_load) {
      if (done(load_lo)) return best;
      hi = lo;
      load_hi = load_lo;
      lo *= 0.8;
      load_lo = eval(lo);
    }
  }
  if (done(load_lo) || done(load_hi)) return best;

  // Bisection, with the probe pulled toward the linear interpolant but kept
  // inside the middle of the bracket.
  while (true) {
    double t = (target_load - load_lo) / (load_hi - load_lo);
    t = std::clamp(std::isfinite(t) ? t : 0.5, 0.2, 0.8);
    double mid = lo + t * (hi - lo);
    double load = eval(mid);
    if (done(load)) return best;
    if (load < target_load) {
      lo = mid;
      load_lo = load;
    } else {
      hi = mid;
      load_hi = load;
    }
  }
}

ScenarioConfig resolve_arrival_rate(const ScenarioConfig& config,
                                    const ArrivalCalibrationOptions& options) {
  ScenarioConfig out = config;
  if (config.arrival != ArrivalMode::kPoisson || config.arrival_rate > 0 ||
      !config.target_load) {
    return out;
  }
  ScenarioConfig base = config;
  base.additional = AdditionalMode::kNone;
  out.arrival_rate = calibrate_arrival_rate(base, *config.target_load, options).rate;
  return out;
}

ResultRow summarize(const ScenarioConfig& config, std::uint64_t seed_base,
                    std::span<const MetricsReport> reports,
                    std::optional<double> l_default) {
  std::vector<MetricsReport> with_f(reports.begin(), reports.end());
  if (l_default) {
    for (auto& r : with_f) r.F = tradeoff_factor(r.u, r.l_m, *l_default);
  }
  AggregateReport agg = aggregate(with_f);
  ResultRow row;
  row.scenario_id = config.key();
  row.seed_base = seed_base;
  row.family = config.family;
  row.n_nodes = config.n_nodes;
  row.mode = config.additional;
  if (config.additional == AdditionalMode::kContainers) row.frame_min = config.sync.frame_min;
  if (config.additional == AdditionalMode::kPlain) row.plain_exec_h = config.plain.exec_h;
  row.arrival_rate = config.arrival == ArrivalMode::kPoisson ? config.arrival_rate : 0.0;
  row.reps = static_cast<int>(agg.count);
  row.l_mean = agg.l.mean;
  row.l_sd = agg.l.sd;
  row.l_m_mean = agg.l_m.mean;
  row.l_m_sd = agg.l_m.sd;
  row.l_aux_mean = agg.l_aux.mean;
  row.l_cont_mean = agg.l_cont.mean;
  row.l_plain_mean = agg.l_plain.mean;
  row.u_mean = agg.u.mean;
  row.u_sd = agg.u.sd;
  if (agg.F.count > 0) row.F_mean = agg.F.mean;
  row.F_defined_count = static_cast<int>(agg.F.count);
  row.idle_avg_mean = agg.idle_avg_nodes.mean;
  row.wasted_avg_mean = agg.wasted_avg_nodes.mean;
  row.horizon_slots = config.horizon_slots;
  return row;
}

ResultTable run_sweep(const ScenarioConfig& config, const SweepOptions& options) {
  config.validate();
  ResultTable table;
  table.axis = config.sweep_axis;
  table.l_default = config.l_default;

  std::vector<ScenarioConfig> points;
  if (config.sweep_axis == SweepAxis::kNone) {
    points.push_back(config);
  } else {
    for (int v : config.sweep_values) points.push_back(at_axis_point(config, v));
  }

  std::map<std::pair<int, int>, double> rates;  // (family, n_nodes) -> rate
  std::map<std::string, double> baselines;      // baseline key -> l_mean
  for (ScenarioConfig point : points) {
    if (point.arrival == ArrivalMode::kPoisson && !(point.arrival_rate > 0) &&
        point.target_load) {
      auto k = std::make_pair(static_cast<int>(point.family), point.n_nodes);
      auto it = rates.find(k);
      if (it == rates.end()) {
        // Calibrate on the seeds the rows will use, so baseline and
        // additional-queue rows share the calibrated main workload.
        ArrivalCalibrationOptions cal = options.calibration;
        cal.seeds = std::max(cal.seeds, point.effective_repetitions());
        it = rates.emplace(k, resolve_arrival_rate(point, cal).arrival_rate).first;
      }
      point.arrival_rate = it->second;
    }

    std::optional<double> l_default = config.l_default;
    if (config.sweep_baseline && point.additional != AdditionalMode::kNone) {
      ScenarioConfig base = point;
      base.additional = AdditionalMode::kNone;
      auto it = baselines.find(base.key());
      if (it == baselines.end()) {
        int reps = base.effective_repetitions();
        auto reports = run_repetitions(base, base.seed, reps, options.threads);
        ResultRow row = summarize(base, base.seed, reports, std::nullopt);
        table.rows.push_back(row);
        it = baselines.emplace(base.key(), row.l_mean).first;
      }
      if (!l_default) l_default = it->second;
    }

    auto reports = run_repetitions(point, point.seed, point.effective_repetitions(),
                                   options.threads);
    table.rows.push_back(summarize(point, point.seed, reports, l_default));
  }
  return table;
}

const char* const kCsvHeader =
    "scenario_id,seed_base,family,n_nodes,mode,frame_min,plain_exec_h,"
    "arrival_rate,reps,l_mean,l_sd,l_m_mean,l_m_sd,l_aux_mean,l_cont_mean,"
    "l_plain_mean,u_mean,u_sd,F_mean,F_defined_count,idle_avg_mean,"
    "wasted_avg_mean,horizon_slots";

void write_csv(const ResultTable& table, std::ostream& out) {
  if (table.rows.empty()) throw ContractViolation("refusing to write an empty table");
  out << kCsvHeader << '\n';
  auto opt_int = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const auto& r : table.rows) {
    out << r.scenario_id << ',' << r.seed_base << ',' << to_string(r.family) << ','
        << r.n_nodes << ',' << to_string(r.mode) << ',' << opt_int(r.frame_min)
        << ',' << opt_int(r.plain_exec_h) << ',' << format_double(r.arrival_rate)
        << ',' << r.reps << ',' << format_double(r.l_mean) << ','
        << format_double(r.l_sd) << ',' << format_double(r.l_m_mean) << ','
        << format_double(r.l_m_sd) << ',' << format_double(r.l_aux_mean) << ','
        << format_double(r.l_cont_mean) << ',' << format_double(r.l_plain_mean)
        << ',' << format_double(r.u_mean) << ',' << format_double(r.u_sd) << ','
        << (r.F_mean ? format_double(*r.F_mean) : std::string()) << ','
        << r.F_defined_count << ',' << format_double(r.idle_avg_mean) << ','
        << format_double(r.wasted_avg_mean) << ',' << r.horizon_slots << '\n';
  }
}

void write_csv(const ResultTable& table, const std::string& path) {
  if (table.rows.empty()) throw ContractViolation("refusing to write an empty table");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_csv(table, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

ResultTable read_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw IngestError("missing or unexpected CSV header", 1);
  }
  ++lineno;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 23) throw IngestError("expected 23 fields", lineno);
    ResultRow r;
    r.scenario_id = f[0];
    r.seed_base = csv_number<std::uint64_t>(f[1], lineno);
    r.family = parse_family(f[2]);
    r.n_nodes = csv_number<int>(f[3], lineno);
    r.mode = parse_mode(f[4], lineno);
    if (!f[5].empty()) r.frame_min = csv_number<int>(f[5], lineno);
    if (!f[6].empty()) r.plain_exec_h = csv_number<int>(f[6], lineno);
    r.arrival_rate = csv_number<double>(f[7], lineno);
    r.reps = csv_number<int>(f[8], lineno);
    r.l_mean = csv_number<double>(f[9], lineno);
    r.l_sd = csv_number<double>(f[10], lineno);
    r.l_m_mean = csv_number<double>(f[11], lineno);
    r.l_m_sd = csv_number<double>(f[12], lineno);
    r.l_aux_mean = csv_number<double>(f[13], lineno);
    r.l_cont_mean = csv_number<double>(f[14], lineno);
    r.l_plain_mean = csv_number<double>(f[15], lineno);
    r.u_mean = csv_number<double>(f[16], lineno);
    r.u_sd = csv_number<double>(f[17], lineno);
    if (!f[18].empty()) r.F_mean = csv_number<double>(f[18], lineno);
    r.F_defined_count = csv_number<int>(f[19], lineno);
    r.idle_avg_mean = csv_number<double>(f[20], lineno);
    r.wasted_avg_mean = csv_number<double>(f[21], lineno);
    r.horizon_slots = csv_number<std::int64_t>(f[22], lineno);
    table.rows.push_back(std::move(r));
  }
  return table;
}

std::vector<std::string> write_plot_data(const ResultTable& table,
                                         const std::string& directory,
                                         const std::string& stem) {
  if (table.rows.empty()) throw ContractViolation("refusing to plot an empty table");
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create '" + directory + "': " + ec.message());

  std::vector<std::string> written;
  for (Family family : {Family::L1, Family::L2}) {
    std::vector<const ResultRow*> rows;
    for (const auto& r : table.rows) {
      if (r.family == family) rows.push_back(&r);
    }
    if (rows.empty()) continue;
    const bool has_additional = std::any_of(rows.begin(), rows.end(), [](const ResultRow* r) {
      return r->mode != AdditionalMode::kNone;
    });
    auto baseline_for = [&](const ResultRow& r) -> std::optional<double> {
      for (const ResultRow* b : rows) {
        if (b->mode == AdditionalMode::kNone && b->n_nodes == r.n_nodes &&
            b->arrival_rate == r.arrival_rate) {
          return b->l_mean;
        }
      }
      return table.l_default;
    };

    std::string path =
        (std::filesystem::path(directory) / (stem + "_" + std::string(to_string(family)) + ".tsv"))
            .string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "x\tseries\tvalue\n";
    for (const ResultRow* r : rows) {
      if (has_additional && r->mode == AdditionalMode::kNone) continue;
      const std::string x = format_double(axis_value(*r, table.axis));
      if (auto base = baseline_for(*r); base && has_additional) {
        out << x << "\tl_default\t" << format_double(*base) << '\n';
      }
      out << x << "\tl_m\t" << format_double(r->l_m_mean) << '\n';
      if (r->mode == AdditionalMode::kContainers) {
        out << x << "\tu\t" << format_double(r->u_mean) << '\n';
      } else {
        out << x << "\tl\t" << format_double(r->l_mean) << '\n';
      }
    }
    if (!out) throw IoError("write to '" + path + "' failed");
    written.push_back(path);
  }
  return written;
}

}  // namespace contsched
