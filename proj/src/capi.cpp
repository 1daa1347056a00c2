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

#include "contsched/contsched.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "checkpoint_model.hpp"
#include "experiment.hpp"
#include "scenario.hpp"
#include "simulation.hpp"
#include "workload.hpp"

struct cs_scenario {
  contsched::ScenarioConfig config;
};

struct cs_table {
  contsched::ResultTable table;
};

namespace {

thread_local std::string g_last_error;

cs_status fail(cs_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Maps the core's exception types onto status codes.
template <typename Fn>
cs_status guarded(Fn&& fn) {
  try {
    fn();
    return CS_OK;
  } catch (const contsched::ConfigError& e) {
    return fail(CS_ERR_CONFIG, e.what());
  } catch (const contsched::IngestError& e) {
    return fail(CS_ERR_IO, e.what());
  } catch (const contsched::IoError& e) {
    return fail(CS_ERR_IO, e.what());
  } catch (const contsched::CalibrationError& e) {
    return fail(CS_ERR_CALIBRATION, e.what());
  } catch (const contsched::InvariantViolation& e) {
    return fail(CS_ERR_INVARIANT, e.what());
  } catch (const contsched::ContractViolation& e) {
    return fail(CS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CS_ERR_INTERNAL, "unknown error");
  }
}

cs_family to_c(contsched::Family f) {
  return f == contsched::Family::L1 ? CS_FAMILY_L1 : CS_FAMILY_L2;
}

cs_mode to_c(contsched::AdditionalMode m) {
  switch (m) {
    case contsched::AdditionalMode::kContainers: return CS_MODE_CONTAINERS;
    case contsched::AdditionalMode::kPlain: return CS_MODE_PLAIN;
    case contsched::AdditionalMode::kNone: break;
  }
  return CS_MODE_NONE;
}

cs_linear_fit to_c(const contsched::LinearCostModel& m) {
  return {m.slope_s_per_mb, m.intercept_s, m.residual_rms_s, m.r_squared};
}

contsched::LinearCostModel from_c(const cs_linear_fit& f) {
  return {f.slope_s_per_mb, f.intercept_s, f.residual_rms_s, f.r_squared};
}

}  // namespace

extern "C" {

const char* cs_version(void) { return "1.0.0"; }

const char* cs_last_error(void) { return g_last_error.c_str(); }

cs_status cs_scenario_new(cs_scenario** out) {
  if (!out) return fail(CS_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] { *out = new cs_scenario{}; });
}

cs_status cs_scenario_load(const char* path, cs_scenario** out) {
  if (!path || !out) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new cs_scenario{contsched::load_config(path)}; });
}

cs_status cs_scenario_parse(const char* text, cs_scenario** out) {
  if (!text || !out) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new cs_scenario{contsched::parse_config(text)}; });
}

cs_status cs_scenario_set(cs_scenario* scenario, const char* key, const char* value) {
  if (!scenario || !key || !value) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { contsched::apply_setting(scenario->config, key, value); });
}

cs_status cs_scenario_validate(const cs_scenario* scenario) {
  if (!scenario) return fail(CS_ERR_INVALID_ARGUMENT, "null scenario");
  return guarded([&] { scenario->config.validate(); });
}

cs_status cs_scenario_key(const cs_scenario* scenario, char* buf, size_t cap) {
  if (!scenario || !buf || cap == 0) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  std::string key = scenario->config.key();
  std::size_t n = std::min(cap - 1, key.size());
  std::memcpy(buf, key.data(), n);
  buf[n] = '\0';
  return CS_OK;
}

int32_t cs_scenario_repetitions(const cs_scenario* scenario) {
  return scenario ? scenario->config.effective_repetitions() : 0;
}

uint64_t cs_scenario_seed(const cs_scenario* scenario) {
  return scenario ? scenario->config.seed : 0;
}

void cs_scenario_free(cs_scenario* scenario) { delete scenario; }

cs_status cs_run(const cs_scenario* scenario, uint64_t seed, cs_metrics* out) {
  if (!scenario || !out) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto config = contsched::resolve_arrival_rate(scenario->config);
    auto result = contsched::simulate(config, seed);
    const auto& r = result.report;
    *out = cs_metrics{r.n_nodes, r.horizon_slots, r.busy_main, r.busy_cont_useful,
                      r.busy_aux, r.busy_plain, r.l, r.l_m, r.l_aux, r.l_cont,
                      r.l_plain, r.u, r.idle_avg_nodes, r.wasted_avg_nodes,
                      result.stats.main_started, result.stats.reservations_checked};
  });
}

cs_status cs_calibrate_arrival_rate(const cs_scenario* scenario, double target_load,
                                    int32_t seeds, double tolerance,
                                    double* rate_out, double* achieved_load_out) {
  if (!scenario || !rate_out) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  if (seeds < 1 || !(tolerance > 0)) {
    return fail(CS_ERR_INVALID_ARGUMENT, "need seeds >= 1 and tolerance > 0");
  }
  return guarded([&] {
    contsched::ArrivalCalibrationOptions opts;
    opts.seeds = seeds;
    opts.tolerance = tolerance;
    double target = target_load;
    if (!(target > 0)) {
      if (!scenario->config.target_load) {
        throw contsched::ConfigError("no target load given and arrival.target_load unset");
      }
      target = *scenario->config.target_load;
    }
    auto cal = contsched::calibrate_arrival_rate(scenario->config, target, opts);
    *rate_out = cal.rate;
    if (achieved_load_out) *achieved_load_out = cal.achieved_load;
  });
}

cs_status cs_calibrate_workload(cs_family family, uint64_t sample_seed,
                                size_t sample_size, cs_workload_params* out) {
  if (!out) return fail(CS_ERR_INVALID_ARGUMENT, "null output pointer");
  if (sample_size < 2) return fail(CS_ERR_INVALID_ARGUMENT, "sample size must be >= 2");
  return guarded([&] {
    auto fam = family == CS_FAMILY_L1 ? contsched::Family::L1 : contsched::Family::L2;
    const auto& m = contsched::calibrated_model(fam);
    auto s = contsched::sample_moments(m, sample_size, sample_seed);
    *out = cs_workload_params{m.mu_n,   m.sigma_n, m.mu_t,   m.sigma_t,
                              m.rho,    s.mean_n,  s.sd_n,   s.mean_t,
                              s.sd_t,   s.mean_size, s.sd_size};
  });
}

cs_status cs_sweep(const cs_scenario* scenario, uint32_t threads, cs_table** out) {
  if (!scenario || !out) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    contsched::SweepOptions opts;
    opts.threads = threads == 0 ? 1 : threads;
    opts.calibration.threads = opts.threads;
    *out = new cs_table{contsched::run_sweep(scenario->config, opts)};
  });
}

cs_status cs_table_read_csv(const char* path, cs_table** out) {
  if (!path || !out) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw contsched::IoError(std::string("cannot read '") + path + "'");
    *out = new cs_table{contsched::read_csv(in)};
  });
}

size_t cs_table_rows(const cs_table* table) {
  return table ? table->table.rows.size() : 0;
}

cs_status cs_table_row(const cs_table* table, size_t index, cs_row* out) {
  if (!table || !out) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= table->table.rows.size()) {
    return fail(CS_ERR_INVALID_ARGUMENT, "row index out of range");
  }
  const auto& r = table->table.rows[index];
  cs_row row{};
  std::size_t n = std::min(sizeof row.scenario_id - 1, r.scenario_id.size());
  std::memcpy(row.scenario_id, r.scenario_id.data(), n);
  row.seed_base = r.seed_base;
  row.family = to_c(r.family);
  row.n_nodes = r.n_nodes;
  row.mode = to_c(r.mode);
  row.frame_min = r.frame_min.value_or(0);
  row.plain_exec_h = r.plain_exec_h.value_or(0);
  row.arrival_rate = r.arrival_rate;
  row.reps = r.reps;
  row.l_mean = r.l_mean;
  row.l_sd = r.l_sd;
  row.l_m_mean = r.l_m_mean;
  row.l_m_sd = r.l_m_sd;
  row.l_aux_mean = r.l_aux_mean;
  row.l_cont_mean = r.l_cont_mean;
  row.l_plain_mean = r.l_plain_mean;
  row.u_mean = r.u_mean;
  row.u_sd = r.u_sd;
  row.F_defined = r.F_mean ? 1 : 0;
  row.F_mean = r.F_mean.value_or(0.0);
  row.F_defined_count = r.F_defined_count;
  row.idle_avg_mean = r.idle_avg_mean;
  row.wasted_avg_mean = r.wasted_avg_mean;
  row.horizon_slots = r.horizon_slots;
  *out = row;
  return CS_OK;
}

cs_status cs_table_write_csv(const cs_table* table, const char* path) {
  if (!table || !path) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { contsched::write_csv(table->table, std::string(path)); });
}

cs_status cs_table_write_plot_data(const cs_table* table, const char* dir,
                                   const char* stem, size_t* files_out) {
  if (!table || !dir || !stem) return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto files = contsched::write_plot_data(table->table, dir, stem);
    if (files_out) *files_out = files.size();
  });
}

void cs_table_free(cs_table* table) { delete table; }

cs_status cs_fit_checkpoints(const char* csv_path, cs_linear_fit* create,
                             cs_linear_fit* restore) {
  if (!create || !restore) return fail(CS_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] {
    auto samples = csv_path ? contsched::read_checkpoint_csv(std::string(csv_path))
                            : contsched::builtin_checkpoint_samples();
    *create = to_c(contsched::fit_linear(samples, contsched::CheckpointPhase::kCreate));
    *restore = to_c(contsched::fit_linear(samples, contsched::CheckpointPhase::kRestore));
  });
}

double cs_predict_checkpoint(const cs_linear_fit* fit, double ram_mb) {
  return fit ? contsched::predict(from_c(*fit), ram_mb) : 0.0;
}

cs_status cs_checkpoint_budget(const cs_linear_fit* create, const cs_linear_fit* restore,
                               double ram_mb, int32_t tasks_per_frame,
                               double* seconds_out) {
  if (!create || !restore || !seconds_out) {
    return fail(CS_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    *seconds_out = contsched::overhead_budget_check(from_c(*create), from_c(*restore),
                                                    ram_mb, tasks_per_frame);
  });
}

}  // extern "C"
