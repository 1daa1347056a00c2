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

#include "container.hpp"

#include <algorithm>
#include <string>

namespace contsched {

void SyncPolicy::validate() const {
  if (frame_min < 1) throw ContractViolation("frame must be >= 1 minute");
  if (overhead_min < 0) throw ContractViolation("overhead must be >= 0");
  if (frame_min <= overhead_min) {
    throw ContractViolation("frame (" + std::to_string(frame_min) +
                            " min) must exceed the checkpoint overhead (" +
                            std::to_string(overhead_min) + " min)");
  }
}

Slot publish_release_slot(Slot slot, int frame_min) {
  if (frame_min < 1) throw ContractViolation("frame must be >= 1 minute");
  return (slot / frame_min + 1) * frame_min;
}

ManagerRun ManagerRun::plan(Slot start, const SyncPolicy& policy) {
  ManagerRun run;
  run.start_slot = start;
  run.exit_slot = publish_release_slot(start, policy.frame_min);
  int occupancy = run.occupancy();
  // A manager that cannot cover restore + checkpoint does no useful work.
  run.aux_min = std::min(occupancy, policy.overhead_min);
  run.useful_min = occupancy - run.aux_min;
  return run;
}

MasterQueue::MasterQueue(TaskSizeRange range, std::uint64_t seed)
    : range_(range), rng_(make_stream(seed, StreamPurpose::kTasks)) {
  if (range.min_work < 1 || range.max_work < range.min_work) {
    throw ContractViolation("task size range must satisfy 1 <= min <= max");
  }
}

ContainerTask MasterQueue::pull() {
  if (queue_.empty()) {
    std::uniform_int_distribution<int> size(range_.min_work, range_.max_work);
    return ContainerTask{next_id_++, size(rng_), 0, 0};
  }
  ContainerTask task = queue_.front();
  queue_.pop_front();
  return task;
}

void MasterQueue::push_back(const ContainerTask& task) { queue_.push_back(task); }

TaskAssignment on_manager_start(const ManagerRun& run, MasterQueue& master) {
  TaskAssignment out;
  int budget = run.useful_min;
  while (budget > 0) {
    ContainerTask task = master.pull();
    int remaining = task.total_work_min - task.done_min;
    int work = std::min(budget, remaining);
    task.done_min += work;
    budget -= work;
    out.work_min += work;
    if (task.done_min == task.total_work_min) {
      out.completed.push_back(task.id);
      master.note_completed();
    } else {
      ++task.checkpoints;
      out.checkpointed = task;
    }
  }
  return out;
}

int replenish_manager_jobs(std::size_t pending, int n_nodes) {
  if (n_nodes < 0) return 0;
  auto target = static_cast<std::size_t>(n_nodes);
  return pending >= target ? 0 : static_cast<int>(target - pending);
}

void PlainAdditionalPolicy::validate() const {
  if (std::find(kPlainExecHours.begin(), kPlainExecHours.end(), exec_h) ==
      kPlainExecHours.end()) {
    throw ContractViolation("plain additional execution time must be 6, 12, "
                            "24 or 48 hours, got " + std::to_string(exec_h));
  }
}

AdditionalQueue::Shape plain_job_shape(const PlainAdditionalPolicy& policy) {
  return {1, policy.exec_min(), policy.exec_min(), JobKind::kPlain};
}

AdditionalQueue::Shape manager_job_shape(const SyncPolicy& policy) {
  return {1, policy.manager_req_min(), policy.manager_req_min(), JobKind::kManager};
}

MasterProgram::MasterProgram(SyncPolicy policy, TaskSizeRange range,
                             std::uint64_t seed)
    : policy_(policy), queue_(range, seed) {
  policy_.validate();
}

ManagerRun MasterProgram::on_start(JobId manager, Slot start) {
  ManagerRun run = ManagerRun::plan(start, policy_);
  TaskAssignment assignment = on_manager_start(run, queue_);
  useful_minutes_ += assignment.work_min;
  if (assignment.checkpointed) in_flight_.emplace(manager, *assignment.checkpointed);
  return run;
}

void MasterProgram::on_exit(JobId manager) {
  auto it = in_flight_.find(manager);
  if (it == in_flight_.end()) return;
  queue_.push_back(it->second);
  in_flight_.erase(it);
}

}  // namespace contsched
