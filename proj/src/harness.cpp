// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cran/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cran/parallel.hpp"
#include "cran/serialize.hpp"

namespace cran {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kPowerVsN: return "power-vs-N";
    case ExperimentKind::kPowerVsEta: return "power-vs-eta";
    case ExperimentKind::kCdf: return "cdf";
    case ExperimentKind::kPerDeviceProfile: return "per-device-profile";
    case ExperimentKind::kDnnEval: return "dnn-eval";
    case ExperimentKind::kTiming: return "timing";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::kPowerVsN, ExperimentKind::kPowerVsEta, ExperimentKind::kCdf,
                 ExperimentKind::kPerDeviceProfile, ExperimentKind::kDnnEval,
                 ExperimentKind::kTiming})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

const char* to_string(Method method) {
  switch (method) {
    case Method::kJoint: return "joint";
    case Method::kFixedF: return "fixed-f";
    case Method::kFixedVarpi: return "fixed-varpi";
    case Method::kFdsf: return "fdsf";
    case Method::kDnn: return "dnn";
  }
  return "unknown";
}

std::vector<Method> ExperimentPlan::methods() const {
  switch (kind) {
    case ExperimentKind::kPowerVsN:
    case ExperimentKind::kPowerVsEta:
      return {Method::kJoint, Method::kFixedF, Method::kFixedVarpi, Method::kFdsf};
    case ExperimentKind::kCdf:
      if (model) return {Method::kJoint, Method::kFixedF, Method::kFixedVarpi, Method::kDnn};
      return {Method::kJoint, Method::kFixedF, Method::kFixedVarpi};
    case ExperimentKind::kPerDeviceProfile:
      return {Method::kJoint};
    case ExperimentKind::kDnnEval:
    case ExperimentKind::kTiming:
      return {Method::kJoint, Method::kDnn};
  }
  return {};
}

void ExperimentPlan::validate() const {
  if (trials < 1) throw std::invalid_argument("plan: trials must be at least 1");
  const bool sweeps = kind == ExperimentKind::kPowerVsN || kind == ExperimentKind::kPowerVsEta;
  if (sweeps && sweep.empty()) throw std::invalid_argument("plan: sweep values are empty");
  const auto m = methods();
  if (std::find(m.begin(), m.end(), Method::kDnn) != m.end()) {
    if (!model) throw std::invalid_argument(std::string("plan: ") + to_string(kind) + " needs a model");
    if (model->config.devices != base.devices)
      throw std::invalid_argument("plan: model was trained for a different device count");
  }
  base.validate();
}

ExperimentPlan default_plan(ExperimentKind kind) {
  ExperimentPlan plan;
  plan.kind = kind;
  if (kind == ExperimentKind::kPowerVsN) plan.sweep = {32, 64, 128, 256};
  if (kind == ExperimentKind::kPowerVsEta) plan.sweep = {25, 50, 100};
  if (kind == ExperimentKind::kCdf) plan.trials = 5000;
  if (kind == ExperimentKind::kPerDeviceProfile) plan.trials = 1;
  if (kind == ExperimentKind::kTiming) plan.record_timing = true;
  return plan;
}

namespace {

struct Point {
  double value = 0.0;
  SystemConfig config;
};

std::vector<Point> sweep_points(const ExperimentPlan& plan) {
  std::vector<Point> pts;
  if (plan.kind == ExperimentKind::kPowerVsN || plan.kind == ExperimentKind::kPowerVsEta) {
    for (double v : plan.sweep) {
      Point p{v, plan.base};
      if (plan.kind == ExperimentKind::kPowerVsN) {
        if (!(v >= 1.0) || v != std::floor(v))
          throw std::invalid_argument("plan: antenna counts must be positive integers");
        p.config.antennas = static_cast<std::size_t>(v);
      } else {
        p.config.cycles_per_bit = v;
      }
      p.config.validate();
      pts.push_back(p);
    }
  } else {
    pts.push_back({static_cast<double>(plan.base.antennas), plan.base});
  }
  return pts;
}

void fill_from_audit(ResultRow& row, const Allocation& alloc, const AuditReport& audit) {
  row.feasible = audit.passed;
  if (!audit.passed) row.status = "audit-failed";
  row.power = alloc.power;
  row.cpu = alloc.cpu;
  row.latency = audit.latency;
  row.bits = alloc.bits;
  row.p_sum = 0.0;
  for (double p : alloc.power) row.p_sum += p;
}

ResultRow run_method(const ExperimentPlan& plan, const Scenario& sc, Method method) {
  ResultRow row;
  row.method = method;
  const auto start = std::chrono::steady_clock::now();
  if (method == Method::kDnn) {
    const Instance inst = sc.instance(FilterKind::kHybrid);
    const Allocation alloc = infer(*plan.model, inst);
    const auto stop = std::chrono::steady_clock::now();
    row.status = "ok";
    fill_from_audit(row, alloc, audit_allocation(inst, combiner_for(inst, alloc), alloc));
    if (plan.record_timing) row.wall_time_s = std::chrono::duration<double>(stop - start).count();
    return row;
  }
  const Instance inst =
      sc.instance(method == Method::kFdsf ? FilterKind::kFullyDigital : FilterKind::kHybrid);
  Solution sol;
  switch (method) {
    case Method::kFixedF: sol = baseline_fixed_f(inst, plan.solver); break;
    case Method::kFixedVarpi: sol = baseline_fixed_varpi(inst, plan.solver); break;
    default: sol = alternating_optimize(inst, plan.solver); break;
  }
  const auto stop = std::chrono::steady_clock::now();
  if (plan.record_timing) row.wall_time_s = std::chrono::duration<double>(stop - start).count();
  row.status = to_string(sol.status);
  row.outer_iterations = sol.trace.outer_iterations;
  for (int n : sol.trace.inner_iterations) row.inner_iterations += n;
  row.bits = sol.bits;
  if (sol.usable()) fill_from_audit(row, sol.allocation(), audit_solution(inst, sol));
  return row;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const auto points = sweep_points(plan);
  const auto methods = plan.methods();
  const std::size_t per_trial = methods.size();
  std::vector<ResultRow> rows(points.size() * plan.trials * per_trial);

  parallel_for(points.size() * plan.trials, plan.jobs, [&](std::size_t task) {
    const std::size_t pi = task / plan.trials;
    const std::size_t trial = task % plan.trials;
    const std::uint64_t seed = Rng::derive(plan.master_seed, trial);
    const Scenario sc = make_scenario(points[pi].config, seed);
    for (std::size_t m = 0; m < per_trial; ++m) {
      ResultRow row = run_method(plan, sc, methods[m]);
      row.experiment = to_string(plan.kind);
      row.sweep_value = points[pi].value;
      row.trial = trial;
      row.trial_seed = seed;
      rows[task * per_trial + m] = std::move(row);
    }
  });

  ExperimentResult result;
  result.plan = plan;
  result.rows = std::move(rows);
  result.summary = summarize(result.rows);
  for (const auto& s : result.summary) {
    if (s.method != Method::kJoint) continue;
    if (2 * s.feasible < s.trials) {
      std::ostringstream msg;
      msg << "sweep value " << format_double(s.sweep_value) << ": " << s.trials - s.feasible
          << " of " << s.trials << " joint solves infeasible";
      result.failures.push_back(msg.str());
    }
  }
  return result;
}

std::vector<PointSummary> summarize(const std::vector<ResultRow>& rows) {
  std::vector<PointSummary> out;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> times;
  for (const auto& r : rows) {
    std::size_t i = 0;
    while (i < out.size() && !(out[i].sweep_value == r.sweep_value && out[i].method == r.method)) ++i;
    if (i == out.size()) {
      out.push_back(PointSummary{r.sweep_value, r.method, 0, 0, 0, 0, 0, 0, std::nullopt});
      values.emplace_back();
      times.emplace_back();
    }
    ++out[i].trials;
    if (r.feasible) {
      ++out[i].feasible;
      values[i].push_back(r.p_sum);
    }
    if (r.wall_time_s) times[i].push_back(*r.wall_time_s);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& v = values[i];
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    out[i].mean_p_sum = v.empty() ? std::nan("") : sum / static_cast<double>(v.size());
    out[i].median_p_sum = quantile(v, 0.5);
    out[i].q10_p_sum = quantile(v, 0.1);
    out[i].q90_p_sum = quantile(v, 0.9);
    if (!times[i].empty()) {
      double t = 0.0;
      for (double x : times[i]) t += x;
      out[i].mean_wall_time_s = t / static_cast<double>(times[i].size());
    }
  }
  return out;
}

std::string rows_csv(const std::vector<ResultRow>& rows) {
  std::size_t k = 0;
  for (const auto& r : rows) k = std::max(k, r.power.size());
  std::ostringstream out;
  out << "experiment,sweep_value,trial,trial_seed,method,feasible,status,p_sum_w,bits,"
         "outer_iterations,inner_iterations,wall_time_s";
  for (const char* g : {"p", "f", "latency"})
    for (std::size_t i = 1; i <= k; ++i) out << ',' << g << '_' << i;
  out << '\n';
  auto list = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < k; ++i) {
      out << ',';
      if (i < v.size()) out << format_double(v[i]);
    }
  };
  for (const auto& r : rows) {
    out << r.experiment << ',' << format_double(r.sweep_value) << ',' << r.trial << ','
        << r.trial_seed << ',' << to_string(r.method) << ',' << (r.feasible ? 1 : 0) << ','
        << r.status << ',';
    if (r.feasible) out << format_double(r.p_sum);
    out << ',' << r.bits << ',' << r.outer_iterations << ',' << r.inner_iterations << ',';
    if (r.wall_time_s) out << format_double(*r.wall_time_s);
    list(r.feasible ? r.power : std::vector<double>{});
    list(r.feasible ? r.cpu : std::vector<double>{});
    list(r.feasible ? r.latency : std::vector<double>{});
    out << '\n';
  }
  return out.str();
}

std::string summary_json(const ExperimentResult& result) {
  const ExperimentPlan& plan = result.plan;
  Json j;
  j["experiment"] = to_string(plan.kind);
  j["master_seed"] = plan.master_seed;
  j["trials"] = plan.trials;
  j["sweep"] = plan.sweep;
  Json methods = Json::array();
  for (Method m : plan.methods()) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["config"] = config_to_json(plan.base);
  Json points = Json::array();
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  for (const auto& s : result.summary) {
    Json p;
    p["sweep_value"] = s.sweep_value;
    p["method"] = to_string(s.method);
    p["trials"] = s.trials;
    p["feasible"] = s.feasible;
    p["mean_p_sum_w"] = num(s.mean_p_sum);
    p["median_p_sum_w"] = num(s.median_p_sum);
    p["q10_p_sum_w"] = num(s.q10_p_sum);
    p["q90_p_sum_w"] = num(s.q90_p_sum);
    if (s.mean_wall_time_s) p["mean_wall_time_s"] = *s.mean_wall_time_s;
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  j["failures"] = result.failures;
  return j.dump(2) + "\n";
}

std::string cdf_csv(const std::vector<ResultRow>& rows) {
  std::map<std::pair<double, int>, std::vector<double>> groups;
  for (const auto& r : rows)
    if (r.feasible) groups[{r.sweep_value, static_cast<int>(r.method)}].push_back(r.p_sum);
  std::ostringstream out;
  out << "sweep_value,method,p_sum_w,cdf\n";
  for (auto& [key, v] : groups) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i)
      out << format_double(key.first) << ',' << to_string(static_cast<Method>(key.second)) << ','
          << format_double(v[i]) << ','
          << format_double(static_cast<double>(i + 1) / static_cast<double>(v.size())) << '\n';
  }
  return out.str();
}

ProfileResult per_device_profile(const Instance& instance, const SolverOptions& options) {
  ProfileResult out;
  out.solution = alternating_optimize(instance, options);
  if (!out.solution.usable())
    throw std::runtime_error("profile: instance is not solvable (" + out.solution.diagnostic + ")");
  const AuditReport audit = audit_solution(instance, out.solution);
  if (!audit.passed) throw std::runtime_error("profile: solution failed the audit");
  const auto gain = diagonal_gain_magnitudes(instance.filter, instance.h);
  for (std::size_t k = 0; k < instance.tasks.size(); ++k) {
    out.devices.push_back(DeviceProfile{gain[k], instance.tasks[k].bits,
                                        instance.tasks[k].deadline_s, out.solution.power[k],
                                        out.solution.cpu[k] / instance.config.cpu_hz,
                                        audit.latency[k]});
  }
  return out;
}

std::string profile_csv(const ProfileResult& profile) {
  std::ostringstream out;
  out << "device,gain_abs,bits,deadline_s,power_w,cpu_share,latency_s\n";
  for (std::size_t k = 0; k < profile.devices.size(); ++k) {
    const auto& d = profile.devices[k];
    out << k + 1 << ',' << format_double(d.gain) << ',' << format_double(d.bits) << ','
        << format_double(d.deadline_s) << ',' << format_double(d.power_w) << ','
        << format_double(d.cpu_share) << ',' << format_double(d.latency_s) << '\n';
  }
  return out.str();
}

std::filesystem::path results_root() {
  if (const char* env = std::getenv("CRAN_OFFLOAD_RESULTS"); env && *env) return env;
  return "results";
}

std::filesystem::path timestamped_dir(const std::filesystem::path& root,
                                      const std::string& experiment) {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
  std::filesystem::path dir = root / experiment / stamp;
  for (int n = 1; std::filesystem::exists(dir); ++n)
    dir = root / experiment / (std::string(stamp) + "-" + std::to_string(n));
  return dir;
}

void emit_results(const ExperimentResult& result, const std::filesystem::path& dir) {
  try {
    std::filesystem::create_directories(dir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw std::runtime_error("cannot create " + dir.string() + ": " + e.what());
  }
  save_text(dir / "rows.csv", rows_csv(result.rows));
  save_text(dir / "summary.json", summary_json(result));
  save_text(dir / "cdf.csv", cdf_csv(result.rows));
}

}  // namespace cran
