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

#include "cran/latency.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cran/frontend.hpp"

namespace cran {

void TaskSpec::validate() const {
  if (!(bits > 0.0) || !(cycles > 0.0) || !(deadline_s > 0.0))
    throw std::invalid_argument("TaskSpec: bits, cycles and deadline must all be positive");
}

std::vector<TaskSpec> generate_tasks(Rng& rng, const SystemConfig& cfg) {
  std::vector<TaskSpec> tasks(cfg.devices);
  for (auto& t : tasks) {
    t.bits = rng.uniform(cfg.bits_min, cfg.bits_max);
    t.deadline_s = rng.uniform(cfg.deadline_min_s, cfg.deadline_max_s);
    t.cycles = cfg.cycles_per_bit * t.bits;
  }
  return tasks;
}

double transmission_latency(double sinr, double bits, double bandwidth_hz) {
  if (!(sinr > 0.0)) return kInfiniteLatency;
  if (std::isinf(sinr)) return 0.0;
  return bits / (bandwidth_hz * std::log2(1.0 + sinr));
}

double fronthaul_latency(double bits, std::size_t chains, int quant_bits, double fronthaul_bps,
                         unsigned modulation_order) {
  return 2.0 * bits * static_cast<double>(chains) * static_cast<double>(quant_bits) /
         (fronthaul_bps * std::log2(static_cast<double>(modulation_order)));
}

double computational_latency(double cycles, double cpu_hz) {
  if (!(cpu_hz > 0.0)) return kInfiniteLatency;
  return cycles / cpu_hz;
}

std::vector<double> total_latency(const Allocation& alloc, std::span<const TaskSpec> tasks,
                                  const SystemConfig& cfg, std::span<const double> sinr) {
  const std::size_t k = tasks.size();
  if (alloc.cpu.size() != k || sinr.size() != k)
    throw std::invalid_argument("total_latency: allocation, tasks and sinr lengths differ");
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double tl = transmission_latency(sinr[i], tasks[i].bits, cfg.bandwidth_hz);
    const double fl = fronthaul_latency(tasks[i].bits, cfg.rf_chains, alloc.bits,
                                        cfg.fronthaul_bps, cfg.modulation_order);
    const double cl = computational_latency(tasks[i].cycles, alloc.cpu[i]);
    out[i] = (std::isinf(tl) || std::isinf(cl)) ? kInfiniteLatency : tl + fl + cl;
  }
  return out;
}

FeasibilityReport check_feasibility(std::span<const double> sinr, int quant_bits,
                                    std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                                    FronthaulTerm term) {
  if (sinr.size() != tasks.size())
    throw std::invalid_argument("check_feasibility: sinr and task counts differ");
  FeasibilityReport rep;
  rep.slack_s.resize(tasks.size());
  rep.deadlines_reachable = true;
  double cpu = 0.0;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const double tl = transmission_latency(sinr[k], tasks[k].bits, cfg.bandwidth_hz);
    const double fl = fronthaul_latency(tasks[k].bits, cfg.rf_chains, quant_bits,
                                        cfg.fronthaul_bps, cfg.modulation_order);
    const double slack = tasks[k].deadline_s - tl - fl;
    rep.slack_s[k] = std::isinf(tl) ? -kInfiniteLatency : slack;
    if (!(slack > 0.0)) rep.deadlines_reachable = false;

    const double cpu_term_fl =
        term == FronthaulTerm::kPerDevice
            ? fl
            : 2.0 * cfg.bandwidth_hz * static_cast<double>(cfg.rf_chains) * quant_bits /
                  cfg.fronthaul_bps;
    const double cpu_slack = tasks[k].deadline_s - tl - cpu_term_fl;
    cpu = cpu_slack > 0.0 ? cpu + tasks[k].cycles / cpu_slack : kInfiniteLatency;
  }
  rep.cpu_required_hz = cpu;
  rep.cpu_sufficient = cpu <= cfg.cpu_hz;
  rep.feasible = rep.deadlines_reachable && rep.cpu_sufficient;
  return rep;
}

FeasibilityReport check_feasibility(std::span<const double> power, int quant_bits,
                                    std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                                    const ComplexMatrix& filter, const ComplexMatrix& h,
                                    FronthaulTerm term) {
  for (double p : power)
    if (!(p >= 0.0 && p <= cfg.max_power_w))
      throw std::invalid_argument("check_feasibility: power outside [0, P_max]");
  if (quant_bits < 1 || quant_bits > cfg.max_quantization_bits())
    throw std::invalid_argument("check_feasibility: bit width " + std::to_string(quant_bits) +
                                " outside the fronthaul-feasible range");
  const QuantizationModel q =
      quantization_variances(power, filter, h, cfg.noise_power_w, quant_bits);
  const ComplexMatrix w = mmse_combiner(power, filter, h, cfg.noise_power_w, q);
  const std::vector<double> gamma = sinr(power, filter, w, h, cfg.noise_power_w, q);
  return check_feasibility(gamma, quant_bits, tasks, cfg, term);
}

}  // namespace cran
