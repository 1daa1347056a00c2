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

#include "simulation.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "container.hpp"
#include "scheduler.hpp"
#include "workload.hpp"

namespace contsched {

namespace {

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, std::uint64_t seed)
      : config_(config),
        cluster_(config.n_nodes),
        ledger_(config.n_nodes, config.horizon_slots - config.warmup_slots),
        arrival_rng_(make_stream(seed, StreamPurpose::kArrivals)) {
    if (config.arrival == ArrivalMode::kFixedQueue) {
      arrivals_ = FixedQueueLength{config.queue_target};
    } else {
      if (!(config.arrival_rate > 0) && !config.trace_path) {
        throw ConfigError("poisson arrivals need a positive rate; calibrate "
                          "arrival.target_load first");
      }
      arrivals_ = PoissonArrivals{config.arrival_rate};
    }
    if (config.trace_path) {
      Rng rng = make_stream(seed, StreamPurpose::kRequestedTime);
      TraceIngest ingest =
          ingest_trace(*config.trace_path, config.trace_columns, config.family, rng);
      trace_ = std::move(ingest.jobs);
      std::stable_sort(trace_.begin(), trace_.end(),
                       [](const JobSpec& a, const JobSpec& b) {
                         return a.submit_slot < b.submit_slot;
                       });
      stats_.trace_skipped = ingest.skipped.size();
    } else {
      generator_.emplace(calibrated_model(config.family), seed, config.n_nodes);
    }
    if (config.additional == AdditionalMode::kContainers) {
      master_.emplace(config.sync, config.task_sizes, seed);
      additional_shape_ = manager_job_shape(config.sync);
    } else if (config.additional == AdditionalMode::kPlain) {
      config.plain.validate();
      additional_shape_ = plain_job_shape(config.plain);
    }
  }

  SimulationResult run() {
    for (Slot t = 0; t < config_.horizon_slots; ++t) {
      if (t > 0) complete_jobs();
      promote_managers(t);
      submit_main_jobs(t);
      replenish_additional();
      schedule(t);
      account(t);
    }
    SimulationResult out;
    out.report = finalize(ledger_, config_.key());
    if (master_) {
      stats_.container_work_min = master_->useful_minutes();
      stats_.tasks_completed = master_->queue().completed();
    }
    out.stats = stats_;
    return out;
  }

 private:
  void complete_jobs() {
    for (const RunningJob& job : cluster_.advance_slot()) {
      if (job.kind != JobKind::kManager) continue;
      master_->on_exit(job.id);
      const int occupancy = static_cast<int>(job.actual_end_slot - job.start_slot);
      if (occupancy > config_.sync.overhead_min) {
        --manager_useful_nodes_;
      } else {
        --manager_aux_nodes_;
      }
    }
  }

  // Managers past their restore/checkpoint allowance start counting as
  // useful container work.
  void promote_managers(Slot t) {
    auto it = aux_ends_.find(t);
    if (it == aux_ends_.end()) return;
    manager_aux_nodes_ -= it->second;
    manager_useful_nodes_ += it->second;
    aux_ends_.erase(it);
  }

  void push_main(JobSpec job) {
    job.nodes = std::min(job.nodes, config_.n_nodes);
    main_queue_.push_back(
        QueuedJob{next_id_++, job.nodes, job.req_min, job.exec_min, JobKind::kMain});
    ++stats_.main_submitted;
  }

  void submit_main_jobs(Slot t) {
    if (config_.trace_path) {
      while (trace_pos_ < trace_.size() && trace_[trace_pos_].submit_slot <= t) {
        push_main(trace_[trace_pos_++]);
      }
    } else {
      int n = arrivals_for_slot(arrivals_, main_queue_.size(), arrival_rng_);
      for (int i = 0; i < n; ++i) push_main(generator_->next(t));
    }
    stats_.max_main_queue = std::max(stats_.max_main_queue, main_queue_.size());
  }

  void replenish_additional() {
    if (!additional_shape_) return;
    int n = replenish_manager_jobs(additional_.size(), config_.n_nodes);
    for (int i = 0; i < n; ++i) additional_.push(next_id_++, *additional_shape_);
  }

  void schedule(Slot t) {
    ScheduleResult result =
        easy_schedule(cluster_, main_queue_, additional_,
                      [this](const QueuedJob& job, Slot now) -> Slot {
                        if (job.kind == JobKind::kManager) {
                          return publish_release_slot(now, config_.sync.frame_min);
                        }
                        return now + job.exec_min;
                      });
    for (const RunningJob& job : result.started) {
      switch (job.kind) {
        case JobKind::kMain:
          ++stats_.main_started;
          if (reserved_ && reserved_->job_id == job.id) {
            if (t > reserved_->shadow_slot) {
              throw InvariantViolation(
                  "reserved job " + std::to_string(job.id) + " started at slot " +
                  std::to_string(t) + " after its shadow slot " +
                  std::to_string(reserved_->shadow_slot));
            }
            ++stats_.reservations_checked;
            reserved_.reset();
          }
          break;
        case JobKind::kManager: {
          ++stats_.managers_started;
          ManagerRun run = master_->on_start(job.id, t);
          ++manager_aux_nodes_;
          if (run.useful_min > 0) ++aux_ends_[t + run.aux_min];
          break;
        }
        case JobKind::kPlain:
          ++stats_.plain_started;
          break;
      }
    }
    if (result.reservation &&
        (!reserved_ || reserved_->job_id != result.reservation->job_id)) {
      reserved_ = result.reservation;
    }
  }

  void account(Slot t) {
    const int managers = cluster_.running_nodes(JobKind::kManager);
    if (manager_aux_nodes_ < 0 || manager_useful_nodes_ < 0 ||
        manager_aux_nodes_ + manager_useful_nodes_ != managers) {
      throw InvariantViolation("manager phase bookkeeping out of sync at slot " +
                               std::to_string(t));
    }
    if (t < config_.warmup_slots) return;
    ledger_.record(LoadCategory::kMain, cluster_.running_nodes(JobKind::kMain));
    ledger_.record(LoadCategory::kContUseful, manager_useful_nodes_);
    ledger_.record(LoadCategory::kAux, manager_aux_nodes_);
    ledger_.record(LoadCategory::kPlain, cluster_.running_nodes(JobKind::kPlain));
  }

  const ScenarioConfig& config_;
  ClusterState cluster_;
  LoadLedger ledger_;
  Rng arrival_rng_;
  ArrivalProcess arrivals_;
  std::optional<JobGenerator> generator_;
  std::vector<JobSpec> trace_;
  std::size_t trace_pos_ = 0;
  std::optional<MasterProgram> master_;
  std::optional<AdditionalQueue::Shape> additional_shape_;

  std::vector<QueuedJob> main_queue_;
  AdditionalQueue additional_;
  JobId next_id_ = 0;

  int manager_aux_nodes_ = 0;
  int manager_useful_nodes_ = 0;
  std::map<Slot, int> aux_ends_;
  std::optional<Reservation> reserved_;
  SimulationStats stats_;
};

}  // namespace

SimulationResult simulate(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Simulation sim(config, seed);
  return sim.run();
}

MetricsReport run_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  return simulate(config, seed).report;
}

}  // namespace contsched
