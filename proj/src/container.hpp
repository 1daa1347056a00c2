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

// Container management: a master program feeding local-manager jobs into the
// low-priority queue, synchronized node release at frame boundaries, and the
// queue of checkpointable non-parallel tasks the managers work through.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "scheduler.hpp"

namespace contsched {

inline constexpr std::array<int, 8> kSyncFrames{30, 45, 60, 90, 120, 180, 240, 360};
inline constexpr std::array<int, 4> kPlainExecHours{6, 12, 24, 48};

struct SyncPolicy {
  int frame_min = 60;
  int overhead_min = 10;

  /// Requested time of every manager job.
  int manager_req_min() const { return frame_min; }
  void validate() const;
};

/// Least multiple of `frame_min` strictly after `slot`.
Slot publish_release_slot(Slot slot, int frame_min);

struct ManagerRun {
  Slot start_slot = 0;
  Slot exit_slot = 0;
  int useful_min = 0;
  int aux_min = 0;

  static ManagerRun plan(Slot start, const SyncPolicy& policy);
  int occupancy() const { return static_cast<int>(exit_slot - start_slot); }
};

struct ContainerTask {
  std::uint64_t id = 0;
  int total_work_min = 1;
  int done_min = 0;
  int checkpoints = 0;
};

struct TaskSizeRange {
  int min_work = 60;
  int max_work = 2880;
};

/// The master program's task queue. New tasks are generated lazily whenever
/// the queue runs dry, so the supply never ends.
class MasterQueue {
 public:
  MasterQueue(TaskSizeRange range, std::uint64_t seed);

  ContainerTask pull();
  void push_back(const ContainerTask& task);

  std::size_t size() const { return queue_.size(); }
  std::uint64_t issued() const { return next_id_; }
  std::uint64_t completed() const { return completed_; }
  void note_completed() { ++completed_; }

 private:
  TaskSizeRange range_;
  Rng rng_;
  std::deque<ContainerTask> queue_;
  std::uint64_t next_id_ = 0;
  std::uint64_t completed_ = 0;
};

struct TaskAssignment {
  std::vector<std::uint64_t> completed;
  std::optional<ContainerTask> checkpointed;
  int work_min = 0;
};

/// Runs tasks back to back from the head of the master queue for the
/// manager's useful minutes. Finished tasks leave the system; the task still
/// in progress at exit is checkpointed and handed back in the result.
TaskAssignment on_manager_start(const ManagerRun& run, MasterQueue& master);

/// Number of manager jobs to submit so that `n_nodes` are pending.
int replenish_manager_jobs(std::size_t pending, int n_nodes);

struct PlainAdditionalPolicy {
  int exec_h = 6;
  int exec_min() const { return exec_h * 60; }
  void validate() const;
};

/// Queue shape of a plain (non-containerized) additional job.
AdditionalQueue::Shape plain_job_shape(const PlainAdditionalPolicy& policy);

/// Queue shape of a local-manager job.
AdditionalQueue::Shape manager_job_shape(const SyncPolicy& policy);

/// Master program state inside one simulation: tasks in flight on running
/// managers go back to the tail of the queue when their manager exits.
class MasterProgram {
 public:
  MasterProgram(SyncPolicy policy, TaskSizeRange range, std::uint64_t seed);

  const SyncPolicy& policy() const { return policy_; }
  ManagerRun on_start(JobId manager, Slot start);
  void on_exit(JobId manager);

  const MasterQueue& queue() const { return queue_; }
  std::int64_t useful_minutes() const { return useful_minutes_; }
  std::size_t in_flight() const { return in_flight_.size(); }

 private:
  SyncPolicy policy_;
  MasterQueue queue_;
  std::unordered_map<JobId, ContainerTask> in_flight_;
  std::int64_t useful_minutes_ = 0;
};

}  // namespace contsched
