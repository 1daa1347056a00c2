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

// Synthetic main-queue workload: calibrated bivariate lognormal job shapes,
// the four-case requested-time model, arrival processes and trace ingestion.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace contsched {

enum class Family { L1, L2 };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);

/// Largest node count a single job may request.
inline constexpr int kNodeCap = 1024;

/// Maximum allowed requested time: 3 days for L1, 15 days for L2.
int max_allowed_minutes(Family family);

struct JobSpec {
  int nodes = 1;
  int exec_min = 1;
  int req_min = 1;
  Family family = Family::L1;
  Slot submit_slot = 0;
};

struct MomentTargets {
  double mean_n = 0;
  double sd_n = 0;
  double mean_t = 0;
  double sd_t = 0;
  double mean_size = 0;
};

/// Published per-family job statistics (node count, execution minutes,
/// size in node-minutes).
MomentTargets published_targets(Family family);

/// Published size standard deviation; informational only.
double published_size_sd(Family family);

struct SampleMoments {
  double mean_n = 0;
  double sd_n = 0;
  double mean_t = 0;
  double sd_t = 0;
  double mean_size = 0;
  double sd_size = 0;
  std::size_t count = 0;
};

struct WorkloadModel {
  Family family = Family::L1;
  double mu_n = 0;
  double sigma_n = 1;
  double mu_t = 0;
  double sigma_t = 1;
  double rho = 0;
  int node_cap = kNodeCap;
  int exec_cap_min = 4320;
};

/// Log-space moment matching without any discretization correction.
WorkloadModel closed_form_model(Family family, const MomentTargets& targets);

/// Fits the model so that rounded and clamped draws reproduce `targets`.
/// Throws CalibrationError when the correction loop does not converge.
WorkloadModel calibrate_moments(Family family, const MomentTargets& targets);

/// Calibrated model for the published targets, computed once per process.
const WorkloadModel& calibrated_model(Family family);

/// Rounds and clamps a continuous (nodes, minutes) draw into a job shape.
std::pair<int, int> discretize(const WorkloadModel& model, double nodes,
                               double exec_min);

/// One (nodes, exec_min) draw.
std::pair<int, int> sample_job(const WorkloadModel& model, Rng& rng);

/// Moments of discretized draws built from caller-supplied standard normal
/// pairs. Deterministic for a fixed span, which calibration relies on.
SampleMoments moments_from_normals(
    const WorkloadModel& model,
    std::span<const std::array<double, 2>> normals);

/// Moments of `count` fresh draws.
SampleMoments sample_moments(const WorkloadModel& model, std::size_t count,
                             std::uint64_t seed);

enum class RequestedTimeCase { kAccurate, kRoundUp, kDefaultDay, kMaxAllowed };

/// Round requested-time values in minutes: 10m, 30m, 1h, 2h, 5h, 12h, 1d,
/// 3d, 7d, 15d.
inline constexpr std::array<int, 10> kRoundRequestMinutes{
    10, 30, 60, 120, 300, 720, 1440, 4320, 10080, 21600};

int assign_requested_time(int exec_min, Family family, RequestedTimeCase c);
RequestedTimeCase draw_requested_case(Rng& rng);

struct FixedQueueLength {
  int target = 100;
};
struct PoissonArrivals {
  double rate = 0;  // jobs per slot
};
using ArrivalProcess = std::variant<FixedQueueLength, PoissonArrivals>;

int arrivals_for_slot(const ArrivalProcess& process, std::size_t queue_len,
                      Rng& rng);

/// Main-queue job generator: shapes, requested times and node clamping.
class JobGenerator {
 public:
  JobGenerator(const WorkloadModel& model, std::uint64_t seed,
               int cluster_nodes);

  JobSpec next(Slot submit_slot);

 private:
  WorkloadModel model_;
  int cluster_nodes_;
  Rng shape_rng_;
  Rng case_rng_;
};

/// 1-based column numbers of a whitespace-separated trace. `req_time_s` may
/// be 0 when the trace carries no requested time.
struct TraceColumns {
  int submit_s = 2;
  int run_s = 4;
  int procs = 5;
  int req_time_s = 9;
};

TraceColumns parse_trace_columns(std::string_view text);

struct SkippedRecord {
  long line = 0;
  std::string reason;
};

struct TraceIngest {
  std::vector<JobSpec> jobs;
  std::vector<SkippedRecord> skipped;
};

/// Reads an SWF-style trace. Records with non-positive run time or processor
/// count, and lines that cannot be parsed, are skipped and reported. Missing
/// requested times are drawn from the four-case model with `rng`.
TraceIngest ingest_trace(const std::string& path, const TraceColumns& columns,
                         Family family, Rng& rng);
TraceIngest ingest_trace(std::istream& in, const TraceColumns& columns,
                         Family family, Rng& rng);

}  // namespace contsched
