/*
 * Copyright 2026 The contsched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the contsched simulator.
 *
 * Every call returns a cs_status. On failure, cs_last_error() returns a
 * message describing the most recent error on the calling thread; the string
 * stays valid until the next failing call on that thread.
 *
 * Handles (cs_scenario, cs_table) are opaque and owned by the caller, who
 * releases them with the matching *_free function. Free functions accept
 * NULL.
 */

#ifndef CONTSCHED_CONTSCHED_H
#define CONTSCHED_CONTSCHED_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CONTSCHED_BUILDING)
#    define CS_API __declspec(dllexport)
#  else
#    define CS_API __declspec(dllimport)
#  endif
#else
#  define CS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cs_status {
  CS_OK = 0,
  CS_ERR_INVALID_ARGUMENT = 1, /* NULL handle, out-of-range index, bad precondition */
  CS_ERR_CONFIG = 2,           /* unknown key, bad value, missing config file */
  CS_ERR_IO = 3,               /* unreadable input or unwritable output */
  CS_ERR_CALIBRATION = 4,      /* workload or arrival-rate calibration failed */
  CS_ERR_INVARIANT = 5,        /* simulation invariant violated */
  CS_ERR_INTERNAL = 6
} cs_status;

typedef struct cs_scenario cs_scenario;
typedef struct cs_table cs_table;

typedef enum cs_family { CS_FAMILY_L1 = 0, CS_FAMILY_L2 = 1 } cs_family;

typedef enum cs_mode {
  CS_MODE_NONE = 0,
  CS_MODE_CONTAINERS = 1,
  CS_MODE_PLAIN = 2
} cs_mode;

/* Metrics of one simulation. Counters are node-slots. */
typedef struct cs_metrics {
  int32_t n_nodes;
  int64_t horizon_slots;
  int64_t busy_main;
  int64_t busy_cont_useful;
  int64_t busy_aux;
  int64_t busy_plain;
  double l;
  double l_m;
  double l_aux;
  double l_cont;
  double l_plain;
  double u;
  double idle_avg_nodes;
  double wasted_avg_nodes;
  /* Simulation statistics. */
  uint64_t main_started;
  uint64_t reservations_checked;
} cs_metrics;

/* One aggregated row of a sweep; mirrors the CSV columns. */
typedef struct cs_row {
  char scenario_id[256];
  uint64_t seed_base;
  cs_family family;
  int32_t n_nodes;
  cs_mode mode;
  int32_t frame_min;     /* 0 when not applicable */
  int32_t plain_exec_h;  /* 0 when not applicable */
  double arrival_rate;
  int32_t reps;
  double l_mean, l_sd;
  double l_m_mean, l_m_sd;
  double l_aux_mean, l_cont_mean, l_plain_mean;
  double u_mean, u_sd;
  int32_t F_defined;     /* 1 when F_mean holds a value */
  double F_mean;
  int32_t F_defined_count;
  double idle_avg_mean, wasted_avg_mean;
  int64_t horizon_slots;
} cs_row;

typedef struct cs_workload_params {
  double mu_n, sigma_n, mu_t, sigma_t, rho;
  /* Moments of a fresh sample drawn from the fitted model. */
  double mean_n, sd_n, mean_t, sd_t, mean_size, sd_size;
} cs_workload_params;

typedef struct cs_linear_fit {
  double slope_s_per_mb;
  double intercept_s;
  double residual_rms_s;
  double r_squared;
} cs_linear_fit;

CS_API const char* cs_version(void);
CS_API const char* cs_last_error(void);

/* Scenarios */
CS_API cs_status cs_scenario_new(cs_scenario** out);
CS_API cs_status cs_scenario_load(const char* path, cs_scenario** out);
CS_API cs_status cs_scenario_parse(const char* text, cs_scenario** out);
CS_API cs_status cs_scenario_set(cs_scenario* scenario, const char* key,
                                 const char* value);
CS_API cs_status cs_scenario_validate(const cs_scenario* scenario);
/* Writes the scenario identity string (NUL-terminated, truncated to cap). */
CS_API cs_status cs_scenario_key(const cs_scenario* scenario, char* buf,
                                 size_t cap);
CS_API int32_t cs_scenario_repetitions(const cs_scenario* scenario);
/* Base seed: repetition i runs with seed + i. */
CS_API uint64_t cs_scenario_seed(const cs_scenario* scenario);
CS_API void cs_scenario_free(cs_scenario* scenario);

/* Single simulation. A Poisson scenario with only a target load is
 * calibrated first. */
CS_API cs_status cs_run(const cs_scenario* scenario, uint64_t seed,
                        cs_metrics* out);

/* Poisson rate reaching target_load, mean over `seeds` runs within
 * `tolerance`. A target_load <= 0 uses the scenario's arrival.target_load. */
CS_API cs_status cs_calibrate_arrival_rate(const cs_scenario* scenario,
                                           double target_load, int32_t seeds,
                                           double tolerance, double* rate_out,
                                           double* achieved_load_out);

CS_API cs_status cs_calibrate_workload(cs_family family, uint64_t sample_seed,
                                       size_t sample_size,
                                       cs_workload_params* out);

/* Sweeps and result tables */
CS_API cs_status cs_sweep(const cs_scenario* scenario, uint32_t threads,
                          cs_table** out);
CS_API cs_status cs_table_read_csv(const char* path, cs_table** out);
CS_API size_t cs_table_rows(const cs_table* table);
CS_API cs_status cs_table_row(const cs_table* table, size_t index, cs_row* out);
CS_API cs_status cs_table_write_csv(const cs_table* table, const char* path);
/* Writes <dir>/<stem>_<family>.tsv files; returns how many in *files_out. */
CS_API cs_status cs_table_write_plot_data(const cs_table* table,
                                          const char* dir, const char* stem,
                                          size_t* files_out);
CS_API void cs_table_free(cs_table* table);

/* Checkpoint cost model. csv_path may be NULL for the built-in data. */
CS_API cs_status cs_fit_checkpoints(const char* csv_path, cs_linear_fit* create,
                                    cs_linear_fit* restore);
CS_API double cs_predict_checkpoint(const cs_linear_fit* fit, double ram_mb);
CS_API cs_status cs_checkpoint_budget(const cs_linear_fit* create,
                                      const cs_linear_fit* restore,
                                      double ram_mb, int32_t tasks_per_frame,
                                      double* seconds_out);

#ifdef __cplusplus
}
#endif

#endif /* CONTSCHED_CONTSCHED_H */
