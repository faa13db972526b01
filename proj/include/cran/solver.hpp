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

// Joint power / CPU / bit-width allocation.
//
// For a fixed combiner the post-combining interference-plus-noise seen by
// device k is affine in the power vector, D_k(p) = c0_k + sum_j c_kj p_j,
// where the quantization part scales with 2^{-2 varpi}. The inner loop
// works on q = log2 p and replaces log2(1 + SINR) by the tangent lower
// bound psi * log2(SINR) + beta around the previous iterate; with the
// deadline written as a rate requirement, the KKT system of that convex
// surrogate has closed-form CPU shares and powers. The outer loop
// alternates MMSE combining, the inner loop, and a scan over bit widths.

#ifndef CRAN_SOLVER_HPP
#define CRAN_SOLVER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cran/config.hpp"
#include "cran/latency.hpp"
#include "cran/numerics.hpp"

namespace cran {

class InfeasibleError : public std::runtime_error {
 public:
  enum class Reason {
    kDeadline,        // fronthaul or compute time alone exhausts a deadline
    kCpuBudget,       // F_T below the sum of minimal CPU shares
    kUnservable,      // a device has zero effective gain
    kPowerOverflow,   // required power is not representable
    kQuantization,    // no bit width satisfies every deadline
  };

  InfeasibleError(Reason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}

  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

/// Link gains for a fixed filter and combiner.
struct LinkCoefficients {
  std::size_t devices = 0;
  std::size_t chains = 0;
  std::vector<double> gain;             // K x K, |w_k^H V h_j|^2
  std::vector<double> noise;            // K, sigma^2 ||w_k^H V||^2
  std::vector<double> combiner_weight;  // R x K, 3 |w_{k,r}|^2
  std::vector<double> chain_gain;       // R x K, |v_r^T h_j|^2
  std::vector<double> chain_noise;      // R, sigma^2 ||v_r||^2
  std::vector<double> quant_gain;       // K x K, sum_r 3|w_{k,r}|^2 |v_r^T h_j|^2
  std::vector<double> quant_floor;      // K, sum_r 3|w_{k,r}|^2 sigma^2 ||v_r||^2

  double alpha(std::size_t k, std::size_t j) const { return gain[k * devices + j]; }

  /// Xi_{r,k}(p): chain-r contribution to device k's quantization noise
  /// before the 2^{-2 varpi} factor.
  double xi(std::size_t r, std::size_t k, std::span<const double> power) const;

  double quantization_noise(std::size_t k, std::span<const double> power, int bits) const;
  /// eta_k plus the quantization noise.
  double eta_bar(std::size_t k, std::span<const double> power, int bits) const;
  /// eta_bar plus inter-device interference: the SINR denominator.
  double interference(std::size_t k, std::span<const double> power, int bits) const;
  double sinr(std::size_t k, std::span<const double> power, int bits) const;
  std::vector<double> sinr(std::span<const double> power, int bits) const;
};

LinkCoefficients link_coefficients(const ComplexMatrix& filter, const ComplexMatrix& combiner,
                                   const ComplexMatrix& h, double noise_power);

/// Tangent of log2(1 + x) in log2(x) at x = zeta, per device.
struct SurrogateState {
  std::vector<double> psi;   // zeta / (1 + zeta)
  std::vector<double> beta;  // log2(1 + zeta) - psi log2(zeta)
  std::vector<double> zeta;  // SINR at the expansion point
};

/// psi and beta for a single expansion point zeta > 0.
void surrogate_terms(double zeta, double& psi, double& beta);

/// Throws InfeasibleError(kUnservable) when some zeta_k is zero.
SurrogateState surrogate_coefficients(std::span<const double> power_prev, int bits,
                                      const LinkCoefficients& link);

/// Deadline left after the fronthaul hop at bit width `bits`.
double compute_window(const TaskSpec& task, const SystemConfig& cfg, int bits);

/// Spectral efficiency needed so that transmission plus computation fits
/// `window` with CPU rate `cpu`: cpu b / (B_W (cpu window - cycles)).
/// +inf when cpu * window <= cycles.
double required_rate(double cpu, const TaskSpec& task, double window, double bandwidth_hz);

/// Closed-form CPU shares that spend F_T exactly. Throws
/// InfeasibleError(kCpuBudget / kDeadline) when no positive split exists.
std::vector<double> update_f(std::span<const double> power, const SurrogateState& surrogate,
                             std::span<const TaskSpec> tasks, const SystemConfig& cfg, int bits);

struct PowerUpdate {
  std::vector<double> power;
  bool exceeds_cap = false;
};

/// Powers that make every surrogate deadline constraint active, with the
/// interference evaluated at `power_prev`.
PowerUpdate update_p(std::span<const double> cpu, const SurrogateState& surrogate,
                     const LinkCoefficients& link, std::span<const TaskSpec> tasks,
                     const SystemConfig& cfg, int bits, std::span<const double> power_prev);

struct SurrogateSolution {
  std::vector<double> power;
  std::vector<double> cpu;
  double cpu_price = 0.0;  // multiplier of the CPU budget
  bool exceeds_cap = false;
};

/// Exact minimizer of one surrogate subproblem (interference frozen at
/// `power_prev`): CPU shares and powers satisfying the CPU closed form and
/// the power closed form at the same time. Alternating the two closed forms
/// instead oscillates once the required rate exceeds a few bit/s/Hz.
SurrogateSolution solve_surrogate(const SurrogateState& surrogate, const LinkCoefficients& link,
                                  std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                                  int bits, std::span<const double> power_prev);

/// Standard interference function whose fixed point is the power update.
std::vector<double> interference_map(std::span<const double> power, std::span<const double> cpu,
                                     const SurrogateState& surrogate,
                                     const LinkCoefficients& link,
                                     std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                                     int bits);

struct InnerOptions {
  double tolerance = 1e-8;
  int max_iterations = 500;
  /// When set, CPU shares stay at this vector instead of the closed form.
  std::optional<std::vector<double>> fixed_cpu;
};

struct InnerResult {
  std::vector<double> power;
  std::vector<double> cpu;
  SurrogateState surrogate;        // surrogate used for the last update
  std::vector<double> objective;   // sum of powers, entry 0 is the start
  int iterations = 0;
  bool converged = false;
  bool exceeds_cap = false;
};

/// Surrogate refresh, then the joint CPU / power update, until both the
/// objective and every power move by less than `tolerance` (relative).
InnerResult sca_inner_loop(std::span<const double> power0, int bits, const LinkCoefficients& link,
                           std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                           const InnerOptions& options = {});

/// Largest bit width in [1, max_quantization_bits] keeping every deadline
/// at the given powers and CPU shares. Throws InfeasibleError(kQuantization).
int line_search_varpi(std::span<const double> power, std::span<const double> cpu,
                      const LinkCoefficients& link, std::span<const TaskSpec> tasks,
                      const SystemConfig& cfg);

/// One offloading scenario, ready for optimization.
struct Instance {
  SystemConfig config;
  std::vector<TaskSpec> tasks;
  ComplexMatrix h;       // K x N
  ComplexMatrix filter;  // R x N
};

enum class CpuPolicy { kOptimized, kProportional };
enum class BitPolicy { kLineSearch, kFixedHalf };

struct SolverOptions {
  double inner_tolerance = 1e-8;
  int max_inner = 500;
  double outer_tolerance = 1e-6;
  int max_outer = 100;
  CpuPolicy cpu_policy = CpuPolicy::kOptimized;
  BitPolicy bit_policy = BitPolicy::kLineSearch;
  std::optional<std::vector<double>> initial_power;  // default P_max / 2
  std::optional<int> initial_bits;                   // default mid-range width
};

enum class SolveStatus { kConverged, kIterationCap, kInfeasible, kPowerCapExceeded };

const char* to_string(SolveStatus status);

struct SolveTrace {
  std::vector<double> objective;     // sum power; entry 0 is the initial point
  std::vector<int> bits;             // bit width after each outer iteration
  std::vector<int> inner_iterations;
  int outer_iterations = 0;
  bool converged = false;
};

struct Solution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::string diagnostic;
  ComplexMatrix combiner;
  std::vector<double> power;
  std::vector<double> cpu;
  int bits = 0;
  SurrogateState surrogate;
  SolveTrace trace;

  bool usable() const {
    return status == SolveStatus::kConverged || status == SolveStatus::kIterationCap;
  }
  double total_power() const;
  Allocation allocation() const { return {power, cpu, bits}; }
};

/// (1 + max_quantization_bits) / 2, rounded.
int midpoint_quantization_bits(const SystemConfig& cfg);
/// ceil(C_F / (4 B_W R)).
int half_quantization_bits(const SystemConfig& cfg);
/// cycles_k F_T / sum cycles.
std::vector<double> proportional_cpu(std::span<const TaskSpec> tasks, const SystemConfig& cfg);

Solution alternating_optimize(const Instance& instance, const SolverOptions& options = {});
Solution baseline_fixed_f(const Instance& instance, SolverOptions options = {});
Solution baseline_fixed_varpi(const Instance& instance, SolverOptions options = {});

/// Independent recomputation of SINR, latency and every constraint.
struct AuditReport {
  bool passed = false;
  bool deadlines_met = false;
  bool cpu_within_budget = false;
  bool power_within_cap = false;
  bool bits_valid = false;
  std::vector<double> sinr;
  std::vector<double> latency;
  double cpu_sum = 0.0;
  double cpu_utilization_error = 0.0;  // |sum f - F_T| / F_T
  /// required rate minus log2(1 + SINR) per device; zero when the
  /// deadline is met with equality.
  std::vector<double> rate_residual;
};

AuditReport audit_allocation(const Instance& instance, const ComplexMatrix& combiner,
                             const Allocation& alloc, double relative_tolerance = 1e-9);
AuditReport audit_solution(const Instance& instance, const Solution& solution,
                           double relative_tolerance = 1e-9);

}  // namespace cran

#endif  // CRAN_SOLVER_HPP
