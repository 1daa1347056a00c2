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

// contsched command-line front end. Talks to the simulator only through the
// C interface.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "contsched/contsched.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

struct ScenarioDeleter {
  void operator()(cs_scenario* s) const { cs_scenario_free(s); }
};
struct TableDeleter {
  void operator()(cs_table* t) const { cs_table_free(t); }
};
using ScenarioPtr = std::unique_ptr<cs_scenario, ScenarioDeleter>;
using TablePtr = std::unique_ptr<cs_table, TableDeleter>;

// Thrown to unwind out of a subcommand with an already-mapped exit code.
struct Failure {
  int code;
};

int exit_code_for(cs_status status) {
  switch (status) {
    case CS_OK: return kExitOk;
    case CS_ERR_INVALID_ARGUMENT:
    case CS_ERR_CONFIG:
    case CS_ERR_IO: return kExitUsage;
    case CS_ERR_INVARIANT: return kExitInvariant;
    default: return kExitFailure;
  }
}

void check(cs_status status) {
  if (status == CS_OK) return;
  std::fprintf(stderr, "contsched: %s\n", cs_last_error());
  throw Failure{exit_code_for(status)};
}

ScenarioPtr load_scenario(const std::string& path,
                          const std::vector<std::string>& overrides) {
  cs_scenario* raw = nullptr;
  if (path.empty()) {
    check(cs_scenario_new(&raw));
  } else {
    check(cs_scenario_load(path.c_str(), &raw));
  }
  ScenarioPtr scenario(raw);
  for (const std::string& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "contsched: --set expects key=value, got '%s'\n", kv.c_str());
      throw Failure{kExitUsage};
    }
    check(cs_scenario_set(scenario.get(), kv.substr(0, eq).c_str(),
                          kv.substr(eq + 1).c_str()));
  }
  check(cs_scenario_validate(scenario.get()));
  return scenario;
}

void print_fit(const char* name, const cs_linear_fit& f) {
  std::printf("%s: slope %.6g s/MB, intercept %.6g s, rms %.4g s, R^2 %.6f\n", name,
              f.slope_s_per_mb, f.intercept_s, f.residual_rms_s, f.r_squared);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supercomputer scheduling simulator with containerized backfill jobs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cs_version()));

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_scenario_options = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Scenario file (key = value lines)")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "Override a setting, key=value (repeatable)");
  };

  auto* run = app.add_subcommand("run", "Simulate a single scenario and seed");
  add_scenario_options(run);
  std::uint64_t run_seed = 0;
  bool run_seed_given = false;
  run->add_option("--seed", run_seed, "Seed (defaults to the scenario seed)")
      ->each([&](const std::string&) { run_seed_given = true; });

  auto* sweep = app.add_subcommand("sweep", "Run all repetitions of a scenario sweep");
  add_scenario_options(sweep);
  std::string out_path;
  std::string plot_dir;
  std::string plot_stem = "plot";
  unsigned threads = 1;
  sweep->add_option("-o,--out", out_path, "CSV output path")->required();
  sweep->add_option("--plot-dir", plot_dir, "Directory for plot-data TSV files");
  sweep->add_option("--plot-stem", plot_stem, "File name stem for plot data");
  sweep->add_option("-j,--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate arrival rate or workload");
  calibrate->require_subcommand(1);
  auto* cal_arrival = calibrate->add_subcommand("arrival", "Poisson rate for a target load");
  add_scenario_options(cal_arrival);
  double target_load = -1;
  int cal_seeds = 20;
  double cal_tolerance = 0.005;
  cal_arrival->add_option("--target", target_load, "Target mean load in (0,1); defaults to arrival.target_load");
  cal_arrival->add_option("--seeds", cal_seeds, "Seeds per evaluation")
      ->check(CLI::PositiveNumber);
  cal_arrival->add_option("--tolerance", cal_tolerance, "Absolute load tolerance")
      ->check(CLI::PositiveNumber);
  auto* cal_workload = calibrate->add_subcommand("workload", "Fit workload parameters");
  std::string family = "L1";
  std::uint64_t sample_seed = 1;
  std::size_t sample_size = 1000000;
  cal_workload->add_option("--family", family, "L1 or L2")
      ->check(CLI::IsMember({"L1", "L2"}));
  cal_workload->add_option("--sample-seed", sample_seed, "Seed of the check sample");
  cal_workload->add_option("--samples", sample_size, "Size of the check sample")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));

  auto* fit = app.add_subcommand("fit-checkpoints", "Fit checkpoint/restore cost lines");
  std::string csv_path;
  double ram_mb = -1;
  int tasks_per_frame = 1;
  fit->add_option("--csv", csv_path, "CSV with ram_mb,create_s,restore_s rows");
  fit->add_option("--ram", ram_mb, "Also predict costs for this RAM size (MB)");
  fit->add_option("--tasks", tasks_per_frame, "Tasks per frame for the budget")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) {
      ScenarioPtr scenario = load_scenario(config_path, overrides);
      char key[512];
      check(cs_scenario_key(scenario.get(), key, sizeof key));
      cs_metrics m{};
      const std::uint64_t seed = run_seed_given ? run_seed : cs_scenario_seed(scenario.get());
      check(cs_run(scenario.get(), seed, &m));
      std::printf("scenario %s\nseed %llu\n", key, static_cast<unsigned long long>(seed));
      std::printf("n_nodes %d\nhorizon_slots %lld\n", m.n_nodes,
                  static_cast<long long>(m.horizon_slots));
      std::printf("l %.6f\nl_m %.6f\nl_aux %.6f\nl_cont %.6f\nl_plain %.6f\nu %.6f\n", m.l,
                  m.l_m, m.l_aux, m.l_cont, m.l_plain, m.u);
      std::printf("idle_avg_nodes %.3f\nwasted_avg_nodes %.3f\n", m.idle_avg_nodes,
                  m.wasted_avg_nodes);
      std::printf("main_started %llu\nreservations_checked %llu\n",
                  static_cast<unsigned long long>(m.main_started),
                  static_cast<unsigned long long>(m.reservations_checked));
    } else if (sweep->parsed()) {
      ScenarioPtr scenario = load_scenario(config_path, overrides);
      cs_table* raw = nullptr;
      check(cs_sweep(scenario.get(), threads, &raw));
      TablePtr table(raw);
      check(cs_table_write_csv(table.get(), out_path.c_str()));
      std::printf("wrote %zu rows to %s\n", cs_table_rows(table.get()), out_path.c_str());
      if (!plot_dir.empty()) {
        std::size_t files = 0;
        check(cs_table_write_plot_data(table.get(), plot_dir.c_str(), plot_stem.c_str(),
                                       &files));
        std::printf("wrote %zu plot-data files to %s\n", files, plot_dir.c_str());
      }
    } else if (cal_arrival->parsed()) {
      overrides.push_back("arrival.mode=poisson");
      if (target_load > 0) overrides.push_back("arrival.target_load=" + std::to_string(target_load));
      ScenarioPtr scenario = load_scenario(config_path, overrides);
      double rate = 0, achieved = 0;
      check(cs_calibrate_arrival_rate(scenario.get(), target_load, cal_seeds, cal_tolerance,
                                      &rate, &achieved));
      std::printf("arrival.rate %.10g\nachieved_load %.6f\n", rate, achieved);
    } else if (cal_workload->parsed()) {
      cs_workload_params p{};
      check(cs_calibrate_workload(family == "L1" ? CS_FAMILY_L1 : CS_FAMILY_L2, sample_seed,
                                  sample_size, &p));
      std::printf("family %s\n", family.c_str());
      std::printf("mu_n %.6f\nsigma_n %.6f\nmu_t %.6f\nsigma_t %.6f\nrho %.6f\n", p.mu_n,
                  p.sigma_n, p.mu_t, p.sigma_t, p.rho);
      std::printf("sample mean_n %.4f sd_n %.4f\n", p.mean_n, p.sd_n);
      std::printf("sample mean_t %.4f sd_t %.4f\n", p.mean_t, p.sd_t);
      std::printf("sample mean_size %.2f sd_size %.2f\n", p.mean_size, p.sd_size);
    } else if (fit->parsed()) {
      cs_linear_fit create{}, restore{};
      check(cs_fit_checkpoints(csv_path.empty() ? nullptr : csv_path.c_str(), &create,
                               &restore));
      print_fit("create", create);
      print_fit("restore", restore);
      if (ram_mb >= 0) {
        double budget = 0;
        check(cs_checkpoint_budget(&create, &restore, ram_mb, tasks_per_frame, &budget));
        std::printf("at %.6g MB: create %.4g s, restore %.4g s, budget %.4g s\n", ram_mb,
                    cs_predict_checkpoint(&create, ram_mb),
                    cs_predict_checkpoint(&restore, ram_mb), budget);
      }
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitOk;
}
