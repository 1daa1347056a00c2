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

#include <cmath>
#include <set>

#include "container.hpp"
#include "doctest.h"

using namespace contsched;

TEST_CASE("release slot is the next frame boundary strictly after the slot") {
  CHECK(publish_release_slot(0, 30) == 30);
  CHECK(publish_release_slot(30, 30) == 60);
  CHECK(publish_release_slot(47, 30) == 60);
  CHECK_THROWS_AS(publish_release_slot(5, 0), ContractViolation);
}

TEST_CASE("manager runs split occupancy into aux and useful minutes") {
  SyncPolicy p{60, 10};
  ManagerRun a = ManagerRun::plan(100, p);
  CHECK(a.exit_slot == 120);
  CHECK(a.useful_min == 10);
  CHECK(a.aux_min == 10);
  ManagerRun b = ManagerRun::plan(115, p);
  CHECK(b.exit_slot == 120);
  CHECK(b.useful_min == 0);
  CHECK(b.aux_min == 5);
  for (int frame : kSyncFrames) {
    SyncPolicy q{frame, 10};
    for (Slot s = 0; s < 3 * frame; ++s) {
      ManagerRun r = ManagerRun::plan(s, q);
      REQUIRE(r.exit_slot % frame == 0);
      REQUIRE(r.exit_slot > s);
      REQUIRE(r.exit_slot - s <= frame);
      REQUIRE(r.useful_min + r.aux_min == r.occupancy());
      REQUIRE(r.useful_min == std::max(0, r.occupancy() - 10));
    }
    CHECK(ManagerRun::plan(frame, q).useful_min == frame - 10);
  }
}

TEST_CASE("sync policy validation") {
  CHECK_NOTHROW(SyncPolicy{30, 10}.validate());
  CHECK_THROWS_AS((SyncPolicy{10, 10}.validate()), ContractViolation);
  CHECK(SyncPolicy{45, 10}.manager_req_min() == 45);
}

TEST_CASE("replenishment tops pending managers up to the node count") {
  CHECK(replenish_manager_jobs(1500, 1500) == 0);
  CHECK(replenish_manager_jobs(0, 1500) == 1500);
  CHECK(replenish_manager_jobs(1499, 1500) == 1);
  CHECK(replenish_manager_jobs(2000, 1500) == 0);
}

TEST_CASE("task progress is checkpointed and requeued") {
  MasterQueue q(TaskSizeRange{100, 100}, 1);
  ManagerRun run;
  run.useful_min = 35;
  TaskAssignment a = on_manager_start(run, q);
  CHECK(a.completed.empty());
  REQUIRE(a.checkpointed);
  CHECK(a.checkpointed->total_work_min == 100);
  CHECK(a.checkpointed->done_min == 35);
  CHECK(a.checkpointed->checkpoints == 1);
  CHECK(a.work_min == 35);
}

TEST_CASE("tasks are consumed sequentially") {
  MasterQueue q(TaskSizeRange{100, 100}, 1);
  q.push_back(ContainerTask{900, 20, 0, 0});
  q.push_back(ContainerTask{901, 30, 0, 0});
  ManagerRun run;
  run.useful_min = 60;
  TaskAssignment a = on_manager_start(run, q);
  CHECK(a.completed == std::vector<std::uint64_t>{900, 901});
  REQUIRE(a.checkpointed);
  CHECK(a.checkpointed->done_min == 10);
  CHECK(a.work_min == 60);
  CHECK(q.completed() == 2);
}

TEST_CASE("master queue supply") {
  MasterQueue q(TaskSizeRange{}, 3);
  ContainerTask first = q.pull();
  CHECK(first.done_min == 0);
  std::set<std::uint64_t> ids{first.id};
  for (int i = 1; i < 10000; ++i) ids.insert(q.pull().id);
  CHECK(ids.size() == 10000);

  MasterQueue big(TaskSizeRange{60, 2880}, 4);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += big.pull().total_work_min;
  // Discrete uniform on [60, 2880].
  const double mean = (60 + 2880) / 2.0;
  const double var = (std::pow(2880 - 60 + 1, 2) - 1) / 12.0;
  CHECK(std::abs(sum / n - mean) <= 3 * std::sqrt(var / n));
}

TEST_CASE("task conservation through the master program") {
  MasterProgram m(SyncPolicy{60, 10}, TaskSizeRange{60, 200}, 9);
  std::int64_t useful = 0;
  for (JobId id = 0; id < 500; ++id) {
    Slot start = static_cast<Slot>(id * 7);
    ManagerRun r = m.on_start(id, start);
    useful += r.useful_min;
    m.on_exit(id);
  }
  CHECK(m.useful_minutes() == useful);
  CHECK(m.in_flight() == 0);
  CHECK(m.queue().completed() > 0);
}

TEST_CASE("plain additional jobs") {
  CHECK(plain_job_shape(PlainAdditionalPolicy{6}).exec_min == 360);
  CHECK(plain_job_shape(PlainAdditionalPolicy{6}).req_min == 360);
  CHECK(plain_job_shape(PlainAdditionalPolicy{48}).exec_min == 2880);
  CHECK(plain_job_shape(PlainAdditionalPolicy{12}).nodes == 1);
  CHECK_THROWS_AS(PlainAdditionalPolicy{7}.validate(), ContractViolation);
  AdditionalQueue q;
  q.push(1, plain_job_shape(PlainAdditionalPolicy{6}));
  q.push(2, plain_job_shape(PlainAdditionalPolicy{6}));
  auto jobs = q.jobs();
  REQUIRE(jobs.size() == 2);
  CHECK(jobs[0].id != jobs[1].id);
  CHECK(jobs[0].req_min == jobs[1].req_min);
  CHECK(manager_job_shape(SyncPolicy{90, 10}).req_min == 90);
}
