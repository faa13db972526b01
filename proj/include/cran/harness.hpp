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

// Monte-Carlo experiment runner. Trial t of every sweep point uses the
// scenario seed Rng::derive(master_seed, t), so sweep points see the same
// task draws and device positions wherever the config allows. Rows are
// stored in (sweep point, trial, method) order whatever the thread count.

#ifndef CRAN_HARNESS_HPP
#define CRAN_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cran/config.hpp"
#include "cran/learner.hpp"
#include "cran/scenario.hpp"
#include "cran/solver.hpp"

namespace cran {

enum class ExperimentKind { kPowerVsN, kPowerVsEta, kCdf, kPerDeviceProfile, kDnnEval, kTiming };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

enum class Method { kJoint, kFixedF, kFixedVarpi, kFdsf, kDnn };

const char* to_string(Method method);

struct ExperimentPlan {
  ExperimentKind kind = ExperimentKind::kPowerVsN;
  /// Antenna counts for power-vs-N, eta values for power-vs-eta; other
  /// kinds use a single point and ignore the values.
  std::vector<double> sweep;
  std::size_t trials = 100;
  SystemConfig base = default_config();
  std::uint64_t master_seed = 1;
  std::size_t jobs = 1;
  /// Fill the wall-time column. Off by default so files are reproducible.
  bool record_timing = false;
  /// Required for methods that include kDnn.
  std::shared_ptr<const Model> model;
  SolverOptions solver{};

  void validate() const;
  /// Methods run at every trial for this experiment kind.
  std::vector<Method> methods() const;
};

/// Default sweep for each kind: N in {32, 64, 128, 256}, eta in {25, 50, 100}.
ExperimentPlan default_plan(ExperimentKind kind);

struct ResultRow {
  std::string experiment;
  double sweep_value = 0.0;
  std::size_t trial = 0;
  std::uint64_t trial_seed = 0;
  Method method = Method::kJoint;
  bool feasible = false;       // usable and passed the audit
  std::string status;          // solver status, "audit-failed" or "ok" for dnn
  double p_sum = 0.0;
  std::vector<double> power;
  std::vector<double> cpu;
  std::vector<double> latency;
  int bits = 0;
  int outer_iterations = 0;
  int inner_iterations = 0;    // summed over outer iterations
  std::optional<double> wall_time_s;
};

struct PointSummary {
  double sweep_value = 0.0;
  Method method = Method::kJoint;
  std::size_t trials = 0;
  std::size_t feasible = 0;
  double mean_p_sum = 0.0;     // over feasible trials; NaN when none
  double median_p_sum = 0.0;
  double q10_p_sum = 0.0;
  double q90_p_sum = 0.0;
  std::optional<double> mean_wall_time_s;
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<ResultRow> rows;
  std::vector<PointSummary> summary;
  /// One message per sweep point where more than half of the joint solves
  /// were infeasible.
  std::vector<std::string> failures;
};

ExperimentResult run_experiment(const ExperimentPlan& plan);

/// Per-device table for one instance: |G_kk|, b_k, deadline, p_k, f_k / F_T,
/// total latency.
struct DeviceProfile {
  double gain = 0.0;
  double bits = 0.0;
  double deadline_s = 0.0;
  double power_w = 0.0;
  double cpu_share = 0.0;
  double latency_s = 0.0;
};

struct ProfileResult {
  Solution solution;
  std::vector<DeviceProfile> devices;
};

ProfileResult per_device_profile(const Instance& instance, const SolverOptions& options = {});

/// Summary statistics of the rows, grouped by (sweep value, method).
std::vector<PointSummary> summarize(const std::vector<ResultRow>& rows);

std::string rows_csv(const std::vector<ResultRow>& rows);
std::string summary_json(const ExperimentResult& result);
/// Empirical CDF of P_sum over feasible rows, per sweep value and method.
std::string cdf_csv(const std::vector<ResultRow>& rows);
std::string profile_csv(const ProfileResult& profile);

/// $CRAN_OFFLOAD_RESULTS when set, otherwise ./results.
std::filesystem::path results_root();
/// <root>/<experiment>/<UTC timestamp>, with a numeric suffix on collision.
std::filesystem::path timestamped_dir(const std::filesystem::path& root,
                                      const std::string& experiment);
/// Writes rows.csv, summary.json and cdf.csv into `dir`.
void emit_results(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace cran

#endif  // CRAN_HARNESS_HPP
