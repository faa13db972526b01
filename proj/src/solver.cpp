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

#include "cran/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "cran/frontend.hpp"

namespace cran {

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void require_devices(std::size_t n, std::size_t k, const char* what) {
  if (n != k) throw std::invalid_argument(std::string(what) + ": length does not match devices");
}

}  // namespace

// ---------------------------------------------------------------------------
// Link coefficients

double LinkCoefficients::xi(std::size_t r, std::size_t k, std::span<const double> power) const {
  double chain_power = chain_noise[r];
  for (std::size_t j = 0; j < devices; ++j) chain_power += power[j] * chain_gain[r * devices + j];
  return combiner_weight[r * devices + k] * chain_power;
}

double LinkCoefficients::quantization_noise(std::size_t k, std::span<const double> power,
                                            int bits) const {
  const double scale = quantization_scale(bits);
  if (scale == 0.0) return 0.0;
  double s = quant_floor[k];
  for (std::size_t j = 0; j < devices; ++j) s += quant_gain[k * devices + j] * power[j];
  return scale * s;
}

double LinkCoefficients::eta_bar(std::size_t k, std::span<const double> power, int bits) const {
  return noise[k] + quantization_noise(k, power, bits);
}

double LinkCoefficients::interference(std::size_t k, std::span<const double> power,
                                      int bits) const {
  double d = eta_bar(k, power, bits);
  for (std::size_t j = 0; j < devices; ++j)
    if (j != k) d += gain[k * devices + j] * power[j];
  return d;
}

double LinkCoefficients::sinr(std::size_t k, std::span<const double> power, int bits) const {
  if (bits == 0) return 0.0;
  const double signal = power[k] * alpha(k, k);
  if (signal == 0.0) return 0.0;
  return signal / interference(k, power, bits);
}

std::vector<double> LinkCoefficients::sinr(std::span<const double> power, int bits) const {
  std::vector<double> g(devices);
  for (std::size_t k = 0; k < devices; ++k) g[k] = sinr(k, power, bits);
  return g;
}

LinkCoefficients link_coefficients(const ComplexMatrix& filter, const ComplexMatrix& combiner,
                                   const ComplexMatrix& h, double noise_power) {
  const ComplexMatrix g = effective_channel(filter, h);
  const std::size_t kcount = h.rows();
  const std::size_t chains = filter.rows();
  if (combiner.rows() != chains || combiner.cols() != kcount)
    throw std::invalid_argument("link_coefficients: combiner must be R x K");

  LinkCoefficients c;
  c.devices = kcount;
  c.chains = chains;
  const ComplexMatrix wg = combiner.adjoint() * g;
  const ComplexMatrix wv = combiner.adjoint() * filter;
  c.gain.resize(kcount * kcount);
  c.noise.resize(kcount);
  for (std::size_t k = 0; k < kcount; ++k) {
    for (std::size_t j = 0; j < kcount; ++j) c.gain[k * kcount + j] = std::norm(wg(k, j));
    c.noise[k] = noise_power * squared_norm(wv.row(k));
  }
  c.combiner_weight.resize(chains * kcount);
  c.chain_gain.resize(chains * kcount);
  c.chain_noise.resize(chains);
  for (std::size_t r = 0; r < chains; ++r) {
    for (std::size_t k = 0; k < kcount; ++k) {
      c.combiner_weight[r * kcount + k] = 3.0 * std::norm(combiner(r, k));
      c.chain_gain[r * kcount + k] = std::norm(g(r, k));
    }
    c.chain_noise[r] = noise_power * squared_norm(filter.row(r));
  }
  c.quant_gain.assign(kcount * kcount, 0.0);
  c.quant_floor.assign(kcount, 0.0);
  for (std::size_t k = 0; k < kcount; ++k) {
    for (std::size_t r = 0; r < chains; ++r) {
      const double w = c.combiner_weight[r * kcount + k];
      c.quant_floor[k] += w * c.chain_noise[r];
      for (std::size_t j = 0; j < kcount; ++j)
        c.quant_gain[k * kcount + j] += w * c.chain_gain[r * kcount + j];
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Surrogate and closed-form updates

void surrogate_terms(double zeta, double& psi, double& beta) {
  psi = zeta / (1.0 + zeta);
  beta = std::log1p(zeta) / std::numbers::ln2 - psi * std::log2(zeta);
}

SurrogateState surrogate_coefficients(std::span<const double> power_prev, int bits,
                                      const LinkCoefficients& link) {
  require_devices(power_prev.size(), link.devices, "surrogate_coefficients");
  SurrogateState s;
  s.psi.resize(link.devices);
  s.beta.resize(link.devices);
  s.zeta.resize(link.devices);
  for (std::size_t k = 0; k < link.devices; ++k) {
    const double zeta = link.sinr(k, power_prev, bits);
    if (!(zeta > 0.0))
      throw InfeasibleError(InfeasibleError::Reason::kUnservable,
                            "device " + std::to_string(k) + " has zero SINR");
    s.zeta[k] = zeta;
    surrogate_terms(zeta, s.psi[k], s.beta[k]);
  }
  return s;
}

double compute_window(const TaskSpec& task, const SystemConfig& cfg, int bits) {
  return task.deadline_s -
         fronthaul_latency(task.bits, cfg.rf_chains, bits, cfg.fronthaul_bps, cfg.modulation_order);
}

double required_rate(double cpu, const TaskSpec& task, double window, double bandwidth_hz) {
  const double excess = cpu * window - task.cycles;
  if (!(excess > 0.0)) return std::numeric_limits<double>::infinity();
  return cpu * task.bits / (bandwidth_hz * excess);
}

std::vector<double> update_f(std::span<const double> power, const SurrogateState& surrogate,
                             std::span<const TaskSpec> tasks, const SystemConfig& cfg, int bits) {
  const std::size_t k = tasks.size();
  require_devices(power.size(), k, "update_f");
  std::vector<double> window(k);
  double floor_hz = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    window[i] = compute_window(tasks[i], cfg, bits);
    if (!(window[i] > 0.0))
      throw InfeasibleError(InfeasibleError::Reason::kDeadline,
                            "fronthaul latency exhausts the deadline of device " +
                                std::to_string(i));
    floor_hz += tasks[i].cycles / window[i];
  }
  const double spare = cfg.cpu_hz - floor_hz;
  if (!(spare > 0.0))
    throw InfeasibleError(InfeasibleError::Reason::kCpuBudget,
                          "CPU budget below the minimal shares (" + std::to_string(floor_hz) +
                              " cycles/s needed)");

  // The KKT weight of each device is sqrt(ln2 b w p / psi); the printed
  // closed form names it a_k, which has to be psi for the sum to close.
  std::vector<double> weight(k);
  double norm = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    weight[i] = std::sqrt(std::numbers::ln2 * tasks[i].bits * tasks[i].cycles * power[i] /
                          surrogate.psi[i]);
    norm += weight[i] / (cfg.bandwidth_hz * window[i]);
  }
  if (!(norm > 0.0)) throw std::invalid_argument("update_f: powers must be positive");

  std::vector<double> f(k);
  for (std::size_t i = 0; i < k; ++i) {
    f[i] = (spare * weight[i] / norm + cfg.bandwidth_hz * tasks[i].cycles) /
           (cfg.bandwidth_hz * window[i]);
  }
  return f;
}

namespace {

// Exponent of the power update for device k, given its interference term.
double power_exponent(std::size_t k, double cpu, const SurrogateState& s,
                      const TaskSpec& task, const SystemConfig& cfg,
                      int bits) {
  const double rate = required_rate(cpu, task, compute_window(task, cfg, bits), cfg.bandwidth_hz);
  if (std::isinf(rate))
    throw InfeasibleError(InfeasibleError::Reason::kDeadline,
                          "CPU share of device " + std::to_string(k) +
                              " cannot finish its cycles in time");
  return (rate - s.beta[k]) / s.psi[k];
}

}  // namespace

PowerUpdate update_p(std::span<const double> cpu, const SurrogateState& surrogate,
                     const LinkCoefficients& link, std::span<const TaskSpec> tasks,
                     const SystemConfig& cfg, int bits, std::span<const double> power_prev) {
  const std::size_t k = tasks.size();
  require_devices(cpu.size(), k, "update_p");
  require_devices(power_prev.size(), k, "update_p");
  PowerUpdate out;
  out.power.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = link.alpha(i, i);
    if (!(a > 0.0))
      throw InfeasibleError(InfeasibleError::Reason::kUnservable,
                            "device " + std::to_string(i) + " has zero effective gain");
    const double gamma_bar = std::log2(a) - std::log2(link.interference(i, power_prev, bits));
    const double e =
        power_exponent(i, cpu[i], surrogate, tasks[i], cfg, bits) - gamma_bar;
    if (!(e < 1000.0))
      throw InfeasibleError(InfeasibleError::Reason::kPowerOverflow,
                            "device " + std::to_string(i) + " needs an unbounded power");
    out.power[i] = std::exp2(e);
    if (out.power[i] > cfg.max_power_w) out.exceeds_cap = true;
  }
  return out;
}

std::vector<double> interference_map(std::span<const double> power, std::span<const double> cpu,
                                     const SurrogateState& surrogate,
                                     const LinkCoefficients& link,
                                     std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                                     int bits) {
  const std::size_t k = tasks.size();
  require_devices(power.size(), k, "interference_map");
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double target =
        std::exp2(power_exponent(i, cpu[i], surrogate, tasks[i], cfg, bits));
    out[i] = target * link.interference(i, power, bits) / link.alpha(i, i);
  }
  return out;
}

namespace {

// Excess cycles E = f * window - cycles at which device k's marginal power
// saving per cycle equals exp(log_price). In u = ln E the stationarity
// condition h(u) = base + ln2 (a + c e^{-u}) - 2u - log_price = 0 is convex
// and decreasing, so Newton from the left of the root is monotone.
struct PriceResponse {
  double a = 0.0;     // exponent of p_k (in bits) that does not depend on E
  double c = 0.0;     // coefficient of 1/E in that exponent
  double base = 0.0;  // ln(ln2 b omega / (psi B_W^2))
  double u_max = 0.0; // ln of the largest excess the whole budget allows

  double h(double u, double log_price) const {
    return base + std::numbers::ln2 * (a + c * std::exp(-u)) - 2.0 * u - log_price;
  }

  double excess(double log_price) const {
    if (h(u_max, log_price) >= 0.0) return std::exp(u_max);
    double hi = u_max;
    double lo = u_max - 1.0;
    for (double step = 1.0; !(h(lo, log_price) > 0.0); step *= 2.0) {
      hi = lo;
      lo -= step;
    }
    double u = lo;
    for (int it = 0; it < 200; ++it) {
      const double val = h(u, log_price);
      if (val > 0.0) lo = u; else hi = u;
      const double slope = -std::numbers::ln2 * c * std::exp(-u) - 2.0;
      double next = u - val / slope;
      if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
      if (std::abs(next - u) <= 1e-15 * (1.0 + std::abs(u)) || hi - lo <= 1e-15 * (1.0 + std::abs(u))) {
        u = next;
        break;
      }
      u = next;
    }
    return std::exp(u);
  }
};

}  // namespace

SurrogateSolution solve_surrogate(const SurrogateState& surrogate, const LinkCoefficients& link,
                                  std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                                  int bits, std::span<const double> power_prev) {
  const std::size_t k = tasks.size();
  require_devices(power_prev.size(), k, "solve_surrogate");
  std::vector<double> window(k);
  double floor_hz = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    window[i] = compute_window(tasks[i], cfg, bits);
    if (!(window[i] > 0.0))
      throw InfeasibleError(InfeasibleError::Reason::kDeadline,
                            "fronthaul latency exhausts the deadline of device " +
                                std::to_string(i));
    floor_hz += tasks[i].cycles / window[i];
  }
  if (!(cfg.cpu_hz > floor_hz))
    throw InfeasibleError(InfeasibleError::Reason::kCpuBudget,
                          "CPU budget below the minimal shares (" + std::to_string(floor_hz) +
                              " cycles/s needed)");

  std::vector<PriceResponse> resp(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double alpha = link.alpha(i, i);
    if (!(alpha > 0.0))
      throw InfeasibleError(InfeasibleError::Reason::kUnservable,
                            "device " + std::to_string(i) + " has zero effective gain");
    const TaskSpec& t = tasks[i];
    const double psi = surrogate.psi[i];
    const double gamma_bar = std::log2(alpha) - std::log2(link.interference(i, power_prev, bits));
    const double scale = t.bits / (cfg.bandwidth_hz * window[i] * psi);
    resp[i].a = scale - surrogate.beta[i] / psi - gamma_bar;
    resp[i].c = scale * t.cycles;
    resp[i].base = std::log(std::numbers::ln2 * t.bits * t.cycles /
                            (psi * cfg.bandwidth_hz * cfg.bandwidth_hz));
    resp[i].u_max = std::log(cfg.cpu_hz * window[i]);
  }

  auto total_cpu = [&](double log_price) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      s += (resp[i].excess(log_price) + tasks[i].cycles) / window[i];
    return s;
  };

  // Total demand falls as the price rises; bracket, then bisect.
  double lo = 0.0;
  double hi = 0.0;
  if (total_cpu(0.0) > cfg.cpu_hz) {
    for (double step = 1.0; total_cpu(hi) > cfg.cpu_hz; step *= 2.0) {
      lo = hi;
      hi += step;
    }
  } else {
    for (double step = 1.0; total_cpu(lo) <= cfg.cpu_hz; step *= 2.0) {
      hi = lo;
      lo -= step;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total_cpu(mid) > cfg.cpu_hz) lo = mid; else hi = mid;
  }

  SurrogateSolution out;
  out.cpu_price = std::exp(0.5 * (lo + hi));
  std::vector<double> guess(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double e = resp[i].a + resp[i].c / resp[i].excess(0.5 * (lo + hi));
    if (!(e < 1000.0))
      throw InfeasibleError(InfeasibleError::Reason::kPowerOverflow,
                            "device " + std::to_string(i) + " needs an unbounded power");
    guess[i] = std::exp2(e);
  }
  // Re-derive both variables from the closed forms so the CPU budget is
  // spent exactly and every surrogate deadline is active.
  out.cpu = update_f(guess, surrogate, tasks, cfg, bits);
  PowerUpdate p = update_p(out.cpu, surrogate, link, tasks, cfg, bits, power_prev);
  out.power = std::move(p.power);
  out.exceeds_cap = p.exceeds_cap;
  return out;
}

InnerResult sca_inner_loop(std::span<const double> power0, int bits, const LinkCoefficients& link,
                           std::span<const TaskSpec> tasks, const SystemConfig& cfg,
                           const InnerOptions& options) {
  require_devices(power0.size(), tasks.size(), "sca_inner_loop");
  for (double p : power0)
    if (!(p > 0.0)) throw std::invalid_argument("sca_inner_loop: initial powers must be positive");
  if (options.fixed_cpu) require_devices(options.fixed_cpu->size(), tasks.size(), "fixed_cpu");

  InnerResult res;
  res.power.assign(power0.begin(), power0.end());
  res.objective.push_back(sum(res.power));
  for (int t = 1; t <= options.max_iterations; ++t) {
    res.surrogate = surrogate_coefficients(res.power, bits, link);
    PowerUpdate next;
    if (options.fixed_cpu) {
      res.cpu = *options.fixed_cpu;
      next = update_p(res.cpu, res.surrogate, link, tasks, cfg, bits, res.power);
    } else {
      SurrogateSolution sol = solve_surrogate(res.surrogate, link, tasks, cfg, bits, res.power);
      res.cpu = std::move(sol.cpu);
      next = PowerUpdate{std::move(sol.power), sol.exceeds_cap};
    }

    double max_step = 0.0;
    for (std::size_t i = 0; i < next.power.size(); ++i)
      max_step = std::max(max_step, std::abs(next.power[i] - res.power[i]) / res.power[i]);
    const double obj = sum(next.power);
    const double obj_step = std::abs(obj - res.objective.back()) / res.objective.back();

    res.power = std::move(next.power);
    res.exceeds_cap = next.exceeds_cap;
    res.objective.push_back(obj);
    res.iterations = t;
    if (max_step <= options.tolerance && obj_step <= options.tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

int line_search_varpi(std::span<const double> power, std::span<const double> cpu,
                      const LinkCoefficients& link, std::span<const TaskSpec> tasks,
                      const SystemConfig& cfg) {
  require_devices(power.size(), tasks.size(), "line_search_varpi");
  require_devices(cpu.size(), tasks.size(), "line_search_varpi");
  // Deadlines that are met with equality must survive rounding.
  constexpr double kSlack = 1e-9;
  for (int b = cfg.max_quantization_bits(); b >= 1; --b) {
    bool ok = true;
    for (std::size_t k = 0; k < tasks.size() && ok; ++k) {
      const double tl = transmission_latency(link.sinr(k, power, b), tasks[k].bits, cfg.bandwidth_hz);
      const double fl = fronthaul_latency(tasks[k].bits, cfg.rf_chains, b, cfg.fronthaul_bps,
                                          cfg.modulation_order);
      const double budget = tasks[k].deadline_s - computational_latency(tasks[k].cycles, cpu[k]);
      ok = tl + fl <= budget + kSlack * tasks[k].deadline_s;
    }
    if (ok) return b;
  }
  throw InfeasibleError(InfeasibleError::Reason::kQuantization,
                        "no bit width keeps every deadline");
}

// ---------------------------------------------------------------------------
// Alternating optimization

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kIterationCap: return "iteration-cap";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kPowerCapExceeded: return "power-cap";
  }
  return "unknown";
}

double Solution::total_power() const { return sum(power); }

int midpoint_quantization_bits(const SystemConfig& cfg) {
  return static_cast<int>(std::lround((1.0 + cfg.max_quantization_bits()) / 2.0));
}

int half_quantization_bits(const SystemConfig& cfg) {
  return static_cast<int>(
      std::ceil(cfg.fronthaul_bps / (4.0 * cfg.bandwidth_hz * static_cast<double>(cfg.rf_chains))));
}

std::vector<double> proportional_cpu(std::span<const TaskSpec> tasks, const SystemConfig& cfg) {
  double total = 0.0;
  for (const auto& t : tasks) total += t.cycles;
  std::vector<double> f(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) f[i] = tasks[i].cycles * cfg.cpu_hz / total;
  return f;
}

Solution alternating_optimize(const Instance& instance, const SolverOptions& options) {
  const SystemConfig& cfg = instance.config;
  cfg.validate();
  const std::size_t k = cfg.devices;
  if (instance.tasks.size() != k || instance.h.rows() != k || instance.filter.rows() != cfg.rf_chains)
    throw std::invalid_argument("alternating_optimize: instance shapes do not match the config");

  Solution sol;
  sol.power = options.initial_power.value_or(std::vector<double>(k, cfg.max_power_w / 2.0));
  require_devices(sol.power.size(), k, "initial_power");
  sol.bits = options.bit_policy == BitPolicy::kFixedHalf
                 ? half_quantization_bits(cfg)
                 : options.initial_bits.value_or(midpoint_quantization_bits(cfg));
  if (sol.bits < 1 || sol.bits > cfg.max_quantization_bits()) {
    sol.diagnostic = "bit width " + std::to_string(sol.bits) + " violates the fronthaul capacity";
    return sol;
  }

  const FeasibilityReport start = check_feasibility(sol.power, sol.bits, instance.tasks, cfg,
                                                    instance.filter, instance.h);
  if (!start.feasible) {
    sol.diagnostic = start.deadlines_reachable ? "initial point: CPU budget insufficient"
                                               : "initial point: a deadline is unreachable";
    return sol;
  }

  InnerOptions inner_opts;
  inner_opts.tolerance = options.inner_tolerance;
  inner_opts.max_iterations = options.max_inner;
  if (options.cpu_policy == CpuPolicy::kProportional)
    inner_opts.fixed_cpu = proportional_cpu(instance.tasks, cfg);

  sol.trace.objective.push_back(sum(sol.power));
  try {
    for (int outer = 1; outer <= options.max_outer; ++outer) {
      const QuantizationModel q = quantization_variances(sol.power, instance.filter, instance.h,
                                                         cfg.noise_power_w, sol.bits);
      sol.combiner = mmse_combiner(sol.power, instance.filter, instance.h, cfg.noise_power_w, q);
      const LinkCoefficients link =
          link_coefficients(instance.filter, sol.combiner, instance.h, cfg.noise_power_w);

      InnerResult inner = sca_inner_loop(sol.power, sol.bits, link, instance.tasks, cfg, inner_opts);
      sol.power = std::move(inner.power);
      sol.cpu = std::move(inner.cpu);
      sol.surrogate = std::move(inner.surrogate);
      sol.trace.inner_iterations.push_back(inner.iterations);
      sol.trace.outer_iterations = outer;
      if (inner.exceeds_cap) {
        sol.status = SolveStatus::kPowerCapExceeded;
        sol.diagnostic = "optimal powers exceed P_max";
        sol.trace.objective.push_back(sum(sol.power));
        sol.trace.bits.push_back(sol.bits);
        return sol;
      }
      if (options.bit_policy == BitPolicy::kLineSearch)
        sol.bits = line_search_varpi(sol.power, sol.cpu, link, instance.tasks, cfg);

      const double prev = sol.trace.objective.back();
      const double obj = sum(sol.power);
      sol.trace.objective.push_back(obj);
      sol.trace.bits.push_back(sol.bits);
      if (std::abs(prev - obj) / prev < options.outer_tolerance) {
        sol.trace.converged = true;
        break;
      }
    }
  } catch (const InfeasibleError& e) {
    sol.status = SolveStatus::kInfeasible;
    sol.diagnostic = e.what();
    return sol;
  }
  sol.status = sol.trace.converged ? SolveStatus::kConverged : SolveStatus::kIterationCap;
  return sol;
}

Solution baseline_fixed_f(const Instance& instance, SolverOptions options) {
  options.cpu_policy = CpuPolicy::kProportional;
  return alternating_optimize(instance, options);
}

Solution baseline_fixed_varpi(const Instance& instance, SolverOptions options) {
  options.bit_policy = BitPolicy::kFixedHalf;
  return alternating_optimize(instance, options);
}

// ---------------------------------------------------------------------------
// Audit

AuditReport audit_allocation(const Instance& instance, const ComplexMatrix& combiner,
                             const Allocation& alloc, double relative_tolerance) {
  const SystemConfig& cfg = instance.config;
  const std::size_t k = instance.tasks.size();
  require_devices(alloc.power.size(), k, "audit power");
  require_devices(alloc.cpu.size(), k, "audit cpu");

  AuditReport rep;
  rep.bits_valid = alloc.bits >= 1 && alloc.bits <= cfg.max_quantization_bits();
  const QuantizationModel q = quantization_variances(alloc.power, instance.filter, instance.h,
                                                     cfg.noise_power_w, std::max(alloc.bits, 0));
  rep.sinr = sinr(alloc.power, instance.filter, combiner, instance.h, cfg.noise_power_w, q);
  rep.latency = total_latency(alloc, instance.tasks, cfg, rep.sinr);

  rep.deadlines_met = true;
  rep.rate_residual.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const TaskSpec& t = instance.tasks[i];
    if (!(rep.latency[i] <= t.deadline_s * (1.0 + relative_tolerance))) rep.deadlines_met = false;
    const double rate =
        required_rate(alloc.cpu[i], t, compute_window(t, cfg, alloc.bits), cfg.bandwidth_hz);
    rep.rate_residual[i] = rate - std::log1p(rep.sinr[i]) / std::numbers::ln2;
  }
  rep.cpu_sum = sum(alloc.cpu);
  rep.cpu_utilization_error = std::abs(rep.cpu_sum - cfg.cpu_hz) / cfg.cpu_hz;
  rep.cpu_within_budget = rep.cpu_sum <= cfg.cpu_hz * (1.0 + relative_tolerance) &&
                          std::all_of(alloc.cpu.begin(), alloc.cpu.end(),
                                      [](double f) { return f > 0.0; });
  rep.power_within_cap = std::all_of(alloc.power.begin(), alloc.power.end(), [&](double p) {
    return p >= 0.0 && p <= cfg.max_power_w;
  });
  rep.passed = rep.bits_valid && rep.deadlines_met && rep.cpu_within_budget && rep.power_within_cap;
  return rep;
}

AuditReport audit_solution(const Instance& instance, const Solution& solution,
                           double relative_tolerance) {
  return audit_allocation(instance, solution.combiner, solution.allocation(), relative_tolerance);
}

}  // namespace cran
