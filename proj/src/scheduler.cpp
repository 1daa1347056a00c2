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

#include "scheduler.hpp"

#include <algorithm>
#include <string>

namespace contsched {

void AdditionalQueue::push(JobId id, const Shape& shape) {
  if (shape.nodes < 1 || shape.req_min < 1) {
    throw ContractViolation("additional job needs >= 1 node and >= 1 minute");
  }
  if (runs_.empty() || !(runs_.back().shape == shape)) {
    runs_.push_back(Run{shape, {}});
  }
  runs_.back().ids.push_back(id);
  ++size_;
}

std::size_t AdditionalQueue::count(JobKind kind) const {
  std::size_t n = 0;
  for (const auto& run : runs_) {
    if (run.shape.kind == kind) n += run.ids.size();
  }
  return n;
}

std::vector<QueuedJob> AdditionalQueue::jobs() const {
  std::vector<QueuedJob> out;
  out.reserve(size_);
  for (const auto& run : runs_) {
    for (JobId id : run.ids) {
      out.push_back(QueuedJob{id, run.shape.nodes, run.shape.req_min,
                              run.shape.exec_min, run.shape.kind});
    }
  }
  return out;
}

void AdditionalQueue::compact() {
  std::erase_if(runs_, [](const Run& r) { return r.ids.empty(); });
  size_ = 0;
  for (const auto& run : runs_) size_ += run.ids.size();
}

ClusterState::ClusterState(int n_nodes) : n_nodes_(n_nodes), free_nodes_(n_nodes) {
  if (n_nodes < 1) throw ContractViolation("cluster needs at least one node");
}

void ClusterState::start(const RunningJob& job) {
  if (job.nodes < 1) throw ContractViolation("job needs at least one node");
  if (job.nodes > free_nodes_) {
    throw InvariantViolation("oversubscription at slot " + std::to_string(slot_) +
                             ": job " + std::to_string(job.id) + " needs " +
                             std::to_string(job.nodes) + " nodes, " +
                             std::to_string(free_nodes_) + " free");
  }
  if (job.start_slot != slot_ || job.actual_end_slot <= slot_ ||
      job.actual_end_slot > job.planned_end_slot) {
    throw InvariantViolation("job " + std::to_string(job.id) +
                             " has inconsistent start/end slots");
  }
  free_nodes_ -= job.nodes;
  running_by_kind_[static_cast<int>(job.kind)] += job.nodes;
  ++running_count_;
  by_actual_end_[job.actual_end_slot].push_back(job);
  planned_release_[job.planned_end_slot] += job.nodes;
}

std::vector<RunningJob> ClusterState::advance_slot() {
  ++slot_;
  std::vector<RunningJob> done;
  auto it = by_actual_end_.find(slot_);
  if (it == by_actual_end_.end()) return done;
  done = std::move(it->second);
  by_actual_end_.erase(it);
  std::sort(done.begin(), done.end(),
            [](const RunningJob& a, const RunningJob& b) { return a.id < b.id; });
  for (const auto& job : done) {
    free_nodes_ += job.nodes;
    running_by_kind_[static_cast<int>(job.kind)] -= job.nodes;
    --running_count_;
    auto p = planned_release_.find(job.planned_end_slot);
    if (p == planned_release_.end() || p->second < job.nodes) {
      throw InvariantViolation("planned-release bookkeeping out of sync");
    }
    if ((p->second -= job.nodes) == 0) planned_release_.erase(p);
  }
  return done;
}

std::vector<ProfileStep> ClusterState::compute_free_profile() const {
  std::vector<ProfileStep> steps{{slot_, free_nodes_}};
  int free = free_nodes_;
  for (const auto& [at, nodes] : planned_release_) {
    free += nodes;
    steps.push_back({at, free});
  }
  return steps;
}

Reservation ClusterState::reserve(JobId id, int nodes) const {
  if (nodes > n_nodes_) {
    throw ContractViolation("job " + std::to_string(id) + " needs " +
                            std::to_string(nodes) + " nodes on a " +
                            std::to_string(n_nodes_) + "-node cluster");
  }
  int free = free_nodes_;
  if (free >= nodes) return {id, slot_, free - nodes};
  for (const auto& [at, released] : planned_release_) {
    free += released;
    if (free >= nodes) return {id, at, free - nodes};
  }
  throw InvariantViolation("free profile never reaches the cluster size");
}

std::vector<RunningJob> ClusterState::running_jobs() const {
  std::vector<RunningJob> out;
  out.reserve(running_count_);
  for (const auto& [end, jobs] : by_actual_end_) {
    out.insert(out.end(), jobs.begin(), jobs.end());
  }
  std::sort(out.begin(), out.end(),
            [](const RunningJob& a, const RunningJob& b) { return a.id < b.id; });
  return out;
}

Slot execution_end(const QueuedJob& job, Slot now) { return now + job.exec_min; }

ScheduleResult easy_schedule(ClusterState& state, std::vector<QueuedJob>& main_queue,
                             AdditionalQueue& additional,
                             const ActualEndFn& actual_end) {
  ScheduleResult result;
  const Slot now = state.slot();

  auto launch = [&](const QueuedJob& job) {
    RunningJob r{job.id, job.nodes, job.kind, now, now + job.req_min,
                 actual_end(job, now)};
    state.start(r);
    result.started.push_back(r);
  };

  std::size_t heads = 0;
  while (heads < main_queue.size() &&
         main_queue[heads].nodes <= state.free_nodes()) {
    launch(main_queue[heads]);
    ++heads;
  }
  main_queue.erase(main_queue.begin(), main_queue.begin() + heads);

  if (!main_queue.empty()) {
    result.reservation = state.reserve(main_queue.front().id, main_queue.front().nodes);
  }
  const Reservation* res = result.reservation ? &*result.reservation : nullptr;
  int extra = res ? res->extra_nodes : 0;

  // Backfill over the remaining main queue.
  if (main_queue.size() > 1 && state.free_nodes() > 0) {
    std::size_t keep = 1;
    for (std::size_t i = 1; i < main_queue.size(); ++i) {
      const QueuedJob& job = main_queue[i];
      bool start = false;
      if (state.free_nodes() > 0 && job.nodes <= state.free_nodes()) {
        if (!res || now + job.req_min <= res->shadow_slot) {
          start = true;
        } else if (job.nodes <= extra) {
          start = true;
          extra -= job.nodes;
        }
      }
      if (start) {
        launch(job);
      } else {
        if (keep != i) main_queue[keep] = job;
        ++keep;
      }
    }
    main_queue.resize(keep);
  }

  // Then the low-priority tier. Jobs in a run are identical, so the number
  // that pass the per-job test in sequence is computed directly.
  for (auto& run : additional.runs()) {
    const int free = state.free_nodes();
    if (free == 0) break;
    const auto& shape = run.shape;
    if (shape.nodes > free || run.ids.empty()) continue;
    std::size_t k = std::min<std::size_t>(run.ids.size(), free / shape.nodes);
    if (res && now + shape.req_min > res->shadow_slot) {
      k = std::min<std::size_t>(k, extra / shape.nodes);
      extra -= static_cast<int>(k) * shape.nodes;
    }
    for (std::size_t i = 0; i < k; ++i) {
      launch(QueuedJob{run.ids.front(), shape.nodes, shape.req_min,
                       shape.exec_min, shape.kind});
      run.ids.pop_front();
    }
  }
  additional.compact();
  return result;
}

std::vector<JobId> priority_merge(const std::vector<QueuedJob>& main_queue,
                                  const AdditionalQueue& additional) {
  std::vector<JobId> order;
  order.reserve(main_queue.size() + additional.size());
  for (const auto& job : main_queue) order.push_back(job.id);
  for (const auto& job : additional.jobs()) order.push_back(job.id);
  return order;
}

}  // namespace contsched
