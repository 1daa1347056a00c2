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

#include "workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace contsched {

namespace {

constexpr std::size_t kCalibrationDraws = 400000;
constexpr int kMaxCalibrationRounds = 50;
constexpr int kMaxNewtonSteps = 30;
// Relative accuracy the fit itself must reach on the common draws; leaves
// room for fresh-sample noise under the 2%/5% acceptance bands.
constexpr double kFitTolerance = 2e-3;
constexpr double kMaxLogExponent = 60.0;

struct Marginal {
  double mean = 0;
  double sd = 0;
};

int round_clamp(double x, int cap) {
  double r = std::round(std::min(x, static_cast<double>(cap)));
  if (r < 1.0) return 1;
  return static_cast<int>(r);
}

Marginal marginal_moments(double mu, double sigma, std::span<const double> z,
                          int cap) {
  double sum = 0;
  double sum_sq = 0;
  for (double v : z) {
    double x = std::exp(std::min(mu + sigma * v, kMaxLogExponent));
    double k = round_clamp(x, cap);
    sum += k;
    sum_sq += k * k;
  }
  double n = static_cast<double>(z.size());
  double mean = sum / n;
  double var = std::max(0.0, sum_sq / n - mean * mean) * n / (n - 1);
  return {mean, std::sqrt(var)};
}

// Newton iteration on (mu, log sigma) so the discretized marginal hits
// (target_mean, target_sd). Finite-difference Jacobian on common draws.
bool fit_marginal(double& mu, double& sigma, std::span<const double> z,
                  int cap, double target_mean, double target_sd) {
  auto residual = [&](double m, double log_s) {
    Marginal got = marginal_moments(m, std::exp(log_s), z, cap);
    return std::array<double, 2>{std::log(got.mean / target_mean),
                                 std::log(got.sd / target_sd)};
  };
  double log_s = std::log(sigma);
  for (int step = 0; step < kMaxNewtonSteps; ++step) {
    auto r = residual(mu, log_s);
    if (std::abs(r[0]) < kFitTolerance / 4 && std::abs(r[1]) < kFitTolerance / 4) {
      sigma = std::exp(log_s);
      return true;
    }
    constexpr double h = 5e-3;
    auto rm = residual(mu + h, log_s);
    auto rs = residual(mu, log_s + h);
    double a = (rm[0] - r[0]) / h, b = (rs[0] - r[0]) / h;
    double c = (rm[1] - r[1]) / h, d = (rs[1] - r[1]) / h;
    double det = a * d - b * c;
    if (!std::isfinite(det) || std::abs(det) < 1e-12) return false;
    double dmu = -(d * r[0] - b * r[1]) / det;
    double dls = -(-c * r[0] + a * r[1]) / det;
    double norm = std::hypot(dmu, dls);
    if (norm > 0.5) {
      dmu *= 0.5 / norm;
      dls *= 0.5 / norm;
    }
    mu += dmu;
    log_s = std::clamp(log_s + dls, std::log(0.05), std::log(5.0));
  }
  sigma = std::exp(log_s);
  auto r = residual(mu, log_s);
  return std::abs(r[0]) < kFitTolerance && std::abs(r[1]) < kFitTolerance;
}

const std::vector<std::array<double, 2>>& calibration_normals() {
  static const std::vector<std::array<double, 2>> normals = [] {
    Rng rng = make_stream(0x9e3779b97f4a7c15ull, StreamPurpose::kCalibration);
    std::normal_distribution<double> normal;
    std::vector<std::array<double, 2>> out(kCalibrationDraws);
    for (auto& p : out) {
      p[0] = normal(rng);
      p[1] = normal(rng);
    }
    return out;
  }();
  return normals;
}

std::string describe(const SampleMoments& got, const MomentTargets& want) {
  std::ostringstream os;
  os << "achieved (mean_n " << got.mean_n << ", sd_n " << got.sd_n
     << ", mean_t " << got.mean_t << ", sd_t " << got.sd_t << ", mean_size "
     << got.mean_size << ") vs target (" << want.mean_n << ", " << want.sd_n
     << ", " << want.mean_t << ", " << want.sd_t << ", " << want.mean_size
     << ")";
  return os.str();
}

double worst_relative_error(const SampleMoments& got, const MomentTargets& want) {
  return std::max({std::abs(got.mean_n / want.mean_n - 1),
                   std::abs(got.sd_n / want.sd_n - 1),
                   std::abs(got.mean_t / want.mean_t - 1),
                   std::abs(got.sd_t / want.sd_t - 1),
                   std::abs(got.mean_size / want.mean_size - 1)});
}

}  // namespace

std::string_view to_string(Family family) {
  return family == Family::L1 ? "L1" : "L2";
}

Family parse_family(std::string_view text) {
  if (text == "L1" || text == "l1") return Family::L1;
  if (text == "L2" || text == "l2") return Family::L2;
  throw ConfigError("unknown family '" + std::string(text) + "'");
}

int max_allowed_minutes(Family family) {
  return family == Family::L1 ? 4320 : 21600;
}

MomentTargets published_targets(Family family) {
  if (family == Family::L1) return {12.97, 24.13, 400.6, 979.8, 9479};
  return {4.209, 6.765, 266.3, 1332, 1450};
}

double published_size_sd(Family family) {
  return family == Family::L1 ? 40065 : 16216;
}

WorkloadModel closed_form_model(Family family, const MomentTargets& t) {
  if (!(t.mean_n > 0 && t.sd_n > 0 && t.mean_t > 0 && t.sd_t > 0 &&
        t.mean_size > 0)) {
    throw ContractViolation("calibration targets must be strictly positive");
  }
  if (t.mean_size < t.mean_n * t.mean_t) {
    throw ContractViolation(
        "mean size below mean_n * mean_t needs negative correlation");
  }
  WorkloadModel m;
  m.family = family;
  m.exec_cap_min = max_allowed_minutes(family);
  double cv_n = t.sd_n / t.mean_n;
  double cv_t = t.sd_t / t.mean_t;
  m.sigma_n = std::sqrt(std::log1p(cv_n * cv_n));
  m.sigma_t = std::sqrt(std::log1p(cv_t * cv_t));
  m.mu_n = std::log(t.mean_n) - m.sigma_n * m.sigma_n / 2;
  m.mu_t = std::log(t.mean_t) - m.sigma_t * m.sigma_t / 2;
  // E[n t] = E[n] E[t] exp(rho sigma_n sigma_t)
  m.rho = std::clamp(std::log(t.mean_size / (t.mean_n * t.mean_t)) /
                         (m.sigma_n * m.sigma_t),
                     -0.99, 0.99);
  return m;
}

WorkloadModel calibrate_moments(Family family, const MomentTargets& targets) {
  WorkloadModel m = closed_form_model(family, targets);
  const auto& normals = calibration_normals();

  std::vector<double> z0(normals.size());
  std::vector<double> w(normals.size());
  for (std::size_t i = 0; i < normals.size(); ++i) z0[i] = normals[i][0];
  auto mix = [&](double rho) {
    double c = std::sqrt(1 - rho * rho);
    for (std::size_t i = 0; i < normals.size(); ++i) {
      w[i] = rho * normals[i][0] + c * normals[i][1];
    }
  };

  auto size_residual = [&](double rho) {
    WorkloadModel probe = m;
    probe.rho = rho;
    return std::log(moments_from_normals(probe, normals).mean_size /
                    targets.mean_size);
  };

  SampleMoments got{};
  for (int round = 0; round < kMaxCalibrationRounds; ++round) {
    if (!fit_marginal(m.mu_n, m.sigma_n, z0, m.node_cap, targets.mean_n,
                      targets.sd_n)) {
      break;
    }
    mix(m.rho);
    if (!fit_marginal(m.mu_t, m.sigma_t, w, m.exec_cap_min, targets.mean_t,
                      targets.sd_t)) {
      break;
    }
    // Secant on rho for the size mean.
    double r0 = m.rho;
    double g0 = size_residual(r0);
    double r1 = std::clamp(r0 + (g0 > 0 ? -0.02 : 0.02), -0.99, 0.99);
    for (int k = 0; k < 20 && std::abs(g0) > kFitTolerance / 4; ++k) {
      double g1 = size_residual(r1);
      if (g1 == g0) break;
      double next = std::clamp(r1 - g1 * (r1 - r0) / (g1 - g0), -0.99, 0.99);
      r0 = r1;
      g0 = g1;
      r1 = next;
    }
    m.rho = std::abs(g0) <= kFitTolerance / 4 ? r0 : r1;

    got = moments_from_normals(m, normals);
    if (worst_relative_error(got, targets) < kFitTolerance) return m;
  }
  got = moments_from_normals(m, normals);
  throw CalibrationError("workload calibration for " +
                         std::string(to_string(family)) +
                         " did not converge: " + describe(got, targets));
}

const WorkloadModel& calibrated_model(Family family) {
  static const WorkloadModel l1 =
      calibrate_moments(Family::L1, published_targets(Family::L1));
  static const WorkloadModel l2 =
      calibrate_moments(Family::L2, published_targets(Family::L2));
  return family == Family::L1 ? l1 : l2;
}

std::pair<int, int> discretize(const WorkloadModel& model, double nodes,
                               double exec_min) {
  return {round_clamp(nodes, model.node_cap),
          round_clamp(exec_min, model.exec_cap_min)};
}

namespace {

std::pair<int, int> draw_from_normals(const WorkloadModel& m, double z0,
                                      double z1) {
  double x = m.mu_n + m.sigma_n * z0;
  double y = m.mu_t +
             m.sigma_t * (m.rho * z0 + std::sqrt(1 - m.rho * m.rho) * z1);
  return discretize(m, std::exp(std::min(x, kMaxLogExponent)),
                    std::exp(std::min(y, kMaxLogExponent)));
}

struct MomentAccumulator {
  double n = 0, sn = 0, snn = 0, st = 0, stt = 0, ss = 0, sss = 0;
  void add(int nodes, int exec) {
    double a = nodes, b = exec, s = a * b;
    n += 1;
    sn += a;
    snn += a * a;
    st += b;
    stt += b * b;
    ss += s;
    sss += s * s;
  }
  SampleMoments finish() const {
    auto sd = [&](double sum, double sq) {
      double mean = sum / n;
      return std::sqrt(std::max(0.0, sq / n - mean * mean) * n / (n - 1));
    };
    SampleMoments r;
    r.count = static_cast<std::size_t>(n);
    r.mean_n = sn / n;
    r.sd_n = sd(sn, snn);
    r.mean_t = st / n;
    r.sd_t = sd(st, stt);
    r.mean_size = ss / n;
    r.sd_size = sd(ss, sss);
    return r;
  }
};

}  // namespace

std::pair<int, int> sample_job(const WorkloadModel& model, Rng& rng) {
  std::normal_distribution<double> normal;
  double z0 = normal(rng);
  double z1 = normal(rng);
  return draw_from_normals(model, z0, z1);
}

SampleMoments moments_from_normals(
    const WorkloadModel& model, std::span<const std::array<double, 2>> normals) {
  MomentAccumulator acc;
  for (const auto& p : normals) {
    auto [n, t] = draw_from_normals(model, p[0], p[1]);
    acc.add(n, t);
  }
  return acc.finish();
}

SampleMoments sample_moments(const WorkloadModel& model, std::size_t count,
                             std::uint64_t seed) {
  Rng rng = make_stream(seed, StreamPurpose::kWorkload);
  MomentAccumulator acc;
  for (std::size_t i = 0; i < count; ++i) {
    auto [n, t] = sample_job(model, rng);
    acc.add(n, t);
  }
  return acc.finish();
}

int assign_requested_time(int exec_min, Family family, RequestedTimeCase c) {
  const int cap = max_allowed_minutes(family);
  if (exec_min < 1 || exec_min > cap) {
    throw ContractViolation("execution time " + std::to_string(exec_min) +
                            " outside [1, " + std::to_string(cap) + "]");
  }
  auto round_up = [&] {
    for (int v : kRoundRequestMinutes) {
      if (v > cap) break;
      if (v > exec_min) return v;
    }
    return cap;
  };
  switch (c) {
    case RequestedTimeCase::kAccurate:
      return exec_min;
    case RequestedTimeCase::kRoundUp:
      return round_up();
    case RequestedTimeCase::kDefaultDay:
      return exec_min <= 1440 ? 1440 : round_up();
    case RequestedTimeCase::kMaxAllowed:
      return cap;
  }
  return cap;
}

RequestedTimeCase draw_requested_case(Rng& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  return static_cast<RequestedTimeCase>(pick(rng));
}

int arrivals_for_slot(const ArrivalProcess& process, std::size_t queue_len,
                      Rng& rng) {
  if (const auto* fixed = std::get_if<FixedQueueLength>(&process)) {
    auto target = static_cast<std::size_t>(std::max(0, fixed->target));
    return queue_len >= target ? 0 : static_cast<int>(target - queue_len);
  }
  double rate = std::get<PoissonArrivals>(process).rate;
  if (rate <= 0) return 0;
  std::poisson_distribution<int> poisson(rate);
  return poisson(rng);
}

JobGenerator::JobGenerator(const WorkloadModel& model, std::uint64_t seed,
                           int cluster_nodes)
    : model_(model),
      cluster_nodes_(cluster_nodes),
      shape_rng_(make_stream(seed, StreamPurpose::kWorkload)),
      case_rng_(make_stream(seed, StreamPurpose::kRequestedTime)) {
  if (cluster_nodes < 1) throw ContractViolation("cluster needs >= 1 node");
}

JobSpec JobGenerator::next(Slot submit_slot) {
  auto [nodes, exec] = sample_job(model_, shape_rng_);
  JobSpec job;
  job.family = model_.family;
  job.nodes = std::min(nodes, cluster_nodes_);
  job.exec_min = exec;
  job.req_min = assign_requested_time(exec, model_.family,
                                      draw_requested_case(case_rng_));
  job.submit_slot = submit_slot;
  return job;
}

TraceColumns parse_trace_columns(std::string_view text) {
  std::vector<int> cols;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    int v = -1;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size() || v < 0) {
      throw ConfigError("trace.columns: bad column '" + std::string(item) + "'");
    }
    cols.push_back(v);
    pos = end + 1;
  }
  if (cols.size() != 4) {
    throw ConfigError(
        "trace.columns needs four entries: submit,run,procs,req (req may be 0)");
  }
  if (cols[0] < 1 || cols[1] < 1 || cols[2] < 1) {
    throw ConfigError("trace.columns: submit, run and procs columns are 1-based");
  }
  return {cols[0], cols[1], cols[2], cols[3]};
}

TraceIngest ingest_trace(const std::string& path, const TraceColumns& columns,
                         Family family, Rng& rng) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot read trace '" + path + "'", 0);
  return ingest_trace(in, columns, family, rng);
}

TraceIngest ingest_trace(std::istream& in, const TraceColumns& columns,
                         Family family, Rng& rng) {
  TraceIngest out;
  const int cap = max_allowed_minutes(family);
  const int needed = std::max({columns.submit_s, columns.run_s, columns.procs,
                               columns.req_time_s});
  std::string line;
  long lineno = 0;
  std::vector<double> fields;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == ';' || line[first] == '#') continue;

    fields.clear();
    std::istringstream ls(line);
    std::string tok;
    bool ok = true;
    while (ls >> tok) {
      double v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size()) {
        ok = false;
        break;
      }
      fields.push_back(v);
    }
    if (!ok || static_cast<int>(fields.size()) < needed) {
      out.skipped.push_back({lineno, "malformed record"});
      continue;
    }
    double run = fields[columns.run_s - 1];
    double procs = fields[columns.procs - 1];
    if (run <= 0 || procs <= 0) {
      out.skipped.push_back({lineno, "non-positive run time or processors"});
      continue;
    }
    JobSpec job;
    job.family = family;
    job.submit_slot = static_cast<Slot>(
        std::max(0.0, std::floor(fields[columns.submit_s - 1] / 60)));
    job.nodes = static_cast<int>(std::clamp(procs, 1.0, double(kNodeCap)));
    job.exec_min = static_cast<int>(
        std::clamp(std::ceil(run / 60), 1.0, static_cast<double>(cap)));
    double req = columns.req_time_s > 0 ? fields[columns.req_time_s - 1] : -1;
    if (req > 0) {
      job.req_min = static_cast<int>(
          std::clamp(std::ceil(req / 60), 1.0, static_cast<double>(cap)));
      // The scheduler kills jobs at their limit.
      job.exec_min = std::min(job.exec_min, job.req_min);
    } else {
      job.req_min =
          assign_requested_time(job.exec_min, family, draw_requested_case(rng));
    }
    out.jobs.push_back(job);
  }
  if (in.bad()) throw IngestError("read failure", lineno);
  return out;
}

}  // namespace contsched
