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

#ifndef CRAN_LATENCY_HPP
#define CRAN_LATENCY_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cran/config.hpp"
#include "cran/numerics.hpp"

namespace cran {

/// Latency sentinel for links that cannot deliver (zero rate or zero CPU).
inline constexpr double kInfiniteLatency = std::numeric_limits<double>::infinity();

/// Offloaded task: payload bits, CPU cycles, deadline.
struct TaskSpec {
  double bits = 0.0;
  double cycles = 0.0;
  double deadline_s = 0.0;

  void validate() const;
};

/// Decision vector: transmit powers (W), CPU rates (cycles/s), bit width.
struct Allocation {
  std::vector<double> power;
  std::vector<double> cpu;
  int bits = 0;
};

/// b_k ~ U[bits_min, bits_max], deadline ~ U[deadline_min, deadline_max],
/// cycles = cycles_per_bit * b_k.
std::vector<TaskSpec> generate_tasks(Rng& rng, const SystemConfig& cfg);

double transmission_latency(double sinr, double bits, double bandwidth_hz);

double fronthaul_latency(double bits, std::size_t chains, int quant_bits, double fronthaul_bps,
                         unsigned modulation_order);

double computational_latency(double cycles, double cpu_hz);

/// Three-term latency per device; any infinite component gives an infinite total.
std::vector<double> total_latency(const Allocation& alloc, std::span<const TaskSpec> tasks,
                                  const SystemConfig& cfg, std::span<const double> sinr);

/// Fronthaul term used inside the aggregate CPU condition. kPerDevice is
/// the per-device fronthaul latency; kBandwidthRatio is 2 B_W R varpi / C_F,
/// kept for comparison only.
enum class FronthaulTerm { kPerDevice, kBandwidthRatio };

struct FeasibilityReport {
  bool feasible = false;
  bool deadlines_reachable = false;  // every device strictly inside its deadline
  bool cpu_sufficient = false;       // minimal CPU shares fit in F_T
  std::vector<double> slack_s;       // deadline - transmission - fronthaul
  double cpu_required_hz = 0.0;      // sum of cycles / slack (inf when a slack <= 0)
};

/// Feasibility verdict for given per-device SINRs at bit width `quant_bits`.
FeasibilityReport check_feasibility(std::span<const double> sinr, int quant_bits,
                                    std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                                    FronthaulTerm term = FronthaulTerm::kPerDevice);

/// Same verdict with SINRs evaluated under the MMSE combiner at `power`.
/// Requires power in [0, P_max] and 1 <= quant_bits <= cfg.max_quantization_bits().
FeasibilityReport check_feasibility(std::span<const double> power, int quant_bits,
                                    std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                                    const ComplexMatrix& filter, const ComplexMatrix& h,
                                    FronthaulTerm term = FronthaulTerm::kPerDevice);

}  // namespace cran

#endif  // CRAN_LATENCY_HPP
