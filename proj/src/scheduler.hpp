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

// Discrete-time cluster state and EASY backfilling over a two-tier queue.
//
// One slot is one minute. A job started at slot s with execution time e
// occupies slots [s, s + e) and is released when the clock reaches s + e.
// The scheduler plans only with requested times; actual ends are invisible
// to it until the job completes.

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace contsched {

enum class JobKind : std::uint8_t { kMain, kManager, kPlain };

struct QueuedJob {
  JobId id = 0;
  int nodes = 1;
  int req_min = 1;
  int exec_min = 1;  // unused for managers; their end comes from the frame
  JobKind kind = JobKind::kMain;
};

struct RunningJob {
  JobId id = 0;
  int nodes = 1;
  JobKind kind = JobKind::kMain;
  Slot start_slot = 0;
  Slot planned_end_slot = 0;
  Slot actual_end_slot = 0;
};

struct ProfileStep {
  Slot from = 0;  // free count holds on [from, next step)
  int free = 0;
};

struct Reservation {
  JobId job_id = 0;
  Slot shadow_slot = 0;
  int extra_nodes = 0;
};

/// Low-priority FIFO. Consecutive jobs with the same shape are stored as one
/// run, so an effectively infinite supply of identical jobs costs O(1) per
/// scan instead of O(queue length).
class AdditionalQueue {
 public:
  struct Shape {
    int nodes = 1;
    int req_min = 1;
    int exec_min = 1;
    JobKind kind = JobKind::kManager;
    bool operator==(const Shape&) const = default;
  };
  struct Run {
    Shape shape;
    std::deque<JobId> ids;
  };

  void push(JobId id, const Shape& shape);
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::size_t count(JobKind kind) const;

  /// Queue contents in scan order.
  std::vector<QueuedJob> jobs() const;

  std::deque<Run>& runs() { return runs_; }
  const std::deque<Run>& runs() const { return runs_; }
  /// Drops runs emptied by the scheduler and refreshes the size.
  void compact();

 private:
  std::deque<Run> runs_;
  std::size_t size_ = 0;
};

class ClusterState {
 public:
  explicit ClusterState(int n_nodes);

  int n_nodes() const { return n_nodes_; }
  int free_nodes() const { return free_nodes_; }
  Slot slot() const { return slot_; }
  std::size_t running_count() const { return running_count_; }
  int running_nodes(JobKind kind) const {
    return running_by_kind_[static_cast<int>(kind)];
  }

  /// Places a job on the cluster at the current slot.
  void start(const RunningJob& job);

  /// Moves the clock one slot forward and releases every job whose actual
  /// end is the new slot, ordered by job id.
  std::vector<RunningJob> advance_slot();

  /// Free nodes over future slots from planned (requested) ends of running
  /// jobs. First step starts at the current slot; free counts never decrease.
  std::vector<ProfileStep> compute_free_profile() const;

  /// Earliest slot at which `nodes` are free according to planned ends, and
  /// the surplus at that slot.
  Reservation reserve(JobId id, int nodes) const;

  /// Every running job, ordered by id. O(running); for tests and oracles.
  std::vector<RunningJob> running_jobs() const;

 private:
  int n_nodes_;
  int free_nodes_;
  Slot slot_ = 0;
  std::size_t running_count_ = 0;
  int running_by_kind_[3] = {0, 0, 0};
  std::map<Slot, std::vector<RunningJob>> by_actual_end_;
  std::map<Slot, int> planned_release_;
};

struct ScheduleResult {
  std::vector<RunningJob> started;
  std::optional<Reservation> reservation;
};

/// Decides the actual end of a job the scheduler is about to start.
using ActualEndFn = std::function<Slot(const QueuedJob&, Slot now)>;

/// Default actual end: start + exec_min.
Slot execution_end(const QueuedJob& job, Slot now);

/// One EASY pass at the current slot:
///  1. start main-queue heads while they fit;
///  2. if a head remains, reserve it at its shadow slot;
///  3. scan the rest of the main queue, then the additional queue, starting
///     every job that fits now and either ends (per request) by the shadow
///     slot or fits in the surplus nodes at the shadow slot.
/// Started jobs are removed from their queue and placed on `state`.
ScheduleResult easy_schedule(ClusterState& state, std::vector<QueuedJob>& main_queue,
                             AdditionalQueue& additional,
                             const ActualEndFn& actual_end = execution_end);

/// Scan order: every main-queue job before any additional job, FIFO inside
/// each tier.
std::vector<JobId> priority_merge(const std::vector<QueuedJob>& main_queue,
                                  const AdditionalQueue& additional);

}  // namespace contsched
