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

#include "cran/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "cran/frontend.hpp"
#include "cran/parallel.hpp"

namespace cran {

// ---------------------------------------------------------------------------
// Network

MlpParams MlpParams::zeros(std::span<const std::size_t> sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("MlpParams: need at least two layer sizes");
  MlpParams p;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    if (sizes[l - 1] == 0 || sizes[l] == 0)
      throw std::invalid_argument("MlpParams: layer sizes must be positive");
    DenseLayer layer;
    layer.inputs = sizes[l - 1];
    layer.outputs = sizes[l];
    layer.weight.assign(layer.inputs * layer.outputs, 0.0);
    layer.bias.assign(layer.outputs, 0.0);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

MlpParams MlpParams::random(std::span<const std::size_t> sizes, Rng& rng) {
  MlpParams p = zeros(sizes);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    DenseLayer& layer = p.layers[l];
    const bool output = l + 1 == p.layers.size();
    const double limit = output ? std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs))
                                : std::sqrt(6.0 / static_cast<double>(layer.inputs));
    for (double& w : layer.weight) w = rng.uniform(-limit, limit);
  }
  return p;
}

std::vector<std::size_t> MlpParams::sizes() const {
  std::vector<std::size_t> s;
  if (layers.empty()) return s;
  s.push_back(layers.front().inputs);
  for (const auto& l : layers) s.push_back(l.outputs);
  return s;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

bool MlpParams::all_finite() const {
  for (const auto& l : layers) {
    for (double w : l.weight)
      if (!std::isfinite(w)) return false;
    for (double b : l.bias)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

double& MlpParams::parameter(std::size_t index) {
  for (auto& l : layers) {
    if (index < l.weight.size()) return l.weight[index];
    index -= l.weight.size();
    if (index < l.bias.size()) return l.bias[index];
    index -= l.bias.size();
  }
  throw std::out_of_range("MlpParams::parameter");
}

double MlpParams::parameter(std::size_t index) const {
  return const_cast<MlpParams*>(this)->parameter(index);
}

std::vector<std::size_t> default_layer_sizes(std::size_t devices) {
  return {3 * devices, 128, 64, 32, 2 * devices + 1};
}

namespace {

void affine(const DenseLayer& layer, const double* in, double* out) {
  for (std::size_t o = 0; o < layer.outputs; ++o) {
    const double* w = layer.weight.data() + o * layer.inputs;
    double s = layer.bias[o];
    for (std::size_t i = 0; i < layer.inputs; ++i) s += w[i] * in[i];
    out[o] = s;
  }
}

void require_width(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw std::invalid_argument(std::string(what) + ": width mismatch");
}

}  // namespace

std::vector<double> forward(const MlpParams& params, std::span<const double> x) {
  if (params.layers.empty()) throw std::invalid_argument("forward: empty network");
  require_width(x.size(), params.layers.front().inputs, "forward");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> z;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    z.resize(params.layers[l].outputs);
    affine(params.layers[l], a.data(), z.data());
    if (l + 1 < params.layers.size())
      for (double& v : z) v = relu(v);
    a.swap(z);
  }
  return a;
}

double mse(const Batch& predicted, const Batch& target) {
  if (predicted.rows == 0 || predicted.width == 0) throw std::invalid_argument("mse: empty batch");
  if (predicted.rows != target.rows || predicted.width != target.width)
    throw std::invalid_argument("mse: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.values.size(); ++i) {
    const double d = predicted.values[i] - target.values[i];
    s += d * d;
  }
  return s / static_cast<double>(predicted.values.size());
}

double backward(const MlpParams& params, const Batch& x, const Batch& y, MlpParams& grads) {
  const std::size_t depth = params.layers.size();
  if (depth == 0) throw std::invalid_argument("backward: empty network");
  if (x.rows == 0 || x.rows != y.rows) throw std::invalid_argument("backward: batch mismatch");
  require_width(x.width, params.layers.front().inputs, "backward x");
  require_width(y.width, params.layers.back().outputs, "backward y");
  if (grads.sizes() != params.sizes()) grads = MlpParams::zeros(params.sizes());
  for (auto& l : grads.layers) {
    std::fill(l.weight.begin(), l.weight.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }

  const double scale = 2.0 / static_cast<double>(x.rows * y.width);
  std::vector<std::vector<double>> act(depth + 1);  // act[l] feeds layer l
  std::vector<std::vector<double>> pre(depth);
  std::vector<double> delta, prev;
  double loss = 0.0;
  for (std::size_t s = 0; s < x.rows; ++s) {
    auto xs = x.row(s);
    act[0].assign(xs.begin(), xs.end());
    for (std::size_t l = 0; l < depth; ++l) {
      pre[l].resize(params.layers[l].outputs);
      affine(params.layers[l], act[l].data(), pre[l].data());
      act[l + 1] = pre[l];
      if (l + 1 < depth)
        for (double& v : act[l + 1]) v = relu(v);
    }
    auto ys = y.row(s);
    delta.resize(y.width);
    for (std::size_t o = 0; o < y.width; ++o) {
      const double d = act[depth][o] - ys[o];
      loss += d * d;
      delta[o] = scale * d;
    }
    for (std::size_t l = depth; l-- > 0;) {
      const DenseLayer& layer = params.layers[l];
      DenseLayer& g = grads.layers[l];
      for (std::size_t o = 0; o < layer.outputs; ++o) {
        g.bias[o] += delta[o];
        double* gw = g.weight.data() + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) gw[i] += delta[o] * act[l][i];
      }
      if (l == 0) break;
      prev.assign(layer.inputs, 0.0);
      for (std::size_t o = 0; o < layer.outputs; ++o) {
        const double* w = layer.weight.data() + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) prev[i] += w[i] * delta[o];
      }
      for (std::size_t i = 0; i < layer.inputs; ++i)
        if (!(pre[l - 1][i] > 0.0)) prev[i] = 0.0;
      delta.swap(prev);
    }
  }
  return loss / static_cast<double>(x.rows * y.width);
}

AdamState AdamState::for_params(const MlpParams& params) {
  const auto sizes = params.sizes();
  return AdamState{MlpParams::zeros(sizes), MlpParams::zeros(sizes), 0};
}

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               const AdamHyper& hyper) {
  if (grads.sizes() != params.sizes() || state.m.sizes() != params.sizes())
    throw std::invalid_argument("adam_step: shape mismatch");
  ++state.step;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  auto update = [&](std::vector<double>& theta, const std::vector<double>& g,
                    std::vector<double>& m, std::vector<double>& v) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
      v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
      theta[i] -= hyper.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + hyper.epsilon);
    }
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].weight, grads.layers[l].weight, state.m.layers[l].weight,
           state.v.layers[l].weight);
    update(params.layers[l].bias, grads.layers[l].bias, state.m.layers[l].bias,
           state.v.layers[l].bias);
  }
}

// ---------------------------------------------------------------------------
// Scaling and encodings

Scaler Scaler::fit(const Batch& data) {
  if (data.rows == 0) throw std::invalid_argument("Scaler::fit: empty data");
  Scaler s;
  s.min.assign(data.width, std::numeric_limits<double>::infinity());
  s.max.assign(data.width, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < data.rows; ++r) {
    auto row = data.row(r);
    for (std::size_t c = 0; c < data.width; ++c) {
      s.min[c] = std::min(s.min[c], row[c]);
      s.max[c] = std::max(s.max[c], row[c]);
    }
  }
  return s;
}

std::vector<double> Scaler::normalize(std::span<const double> v) const {
  require_width(v.size(), min.size(), "Scaler::normalize");
  std::vector<double> out(v.size());
  for (std::size_t c = 0; c < v.size(); ++c) {
    const double range = max[c] - min[c];
    out[c] = range > 0.0 ? (v[c] - min[c]) / range : 0.0;
  }
  return out;
}

std::vector<double> Scaler::denormalize(std::span<const double> v) const {
  require_width(v.size(), min.size(), "Scaler::denormalize");
  std::vector<double> out(v.size());
  for (std::size_t c = 0; c < v.size(); ++c) out[c] = min[c] + v[c] * (max[c] - min[c]);
  return out;
}

Batch Scaler::normalize(const Batch& data) const {
  Batch out{data.rows, data.width, {}};
  out.values.reserve(data.values.size());
  for (std::size_t r = 0; r < data.rows; ++r) {
    auto n = normalize(data.row(r));
    out.values.insert(out.values.end(), n.begin(), n.end());
  }
  return out;
}

std::vector<double> sample_features(const Instance& instance) {
  const std::size_t k = instance.tasks.size();
  std::vector<double> x(3 * k);
  const std::vector<double> g = diagonal_gain_magnitudes(instance.filter, instance.h);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = instance.tasks[i].bits;
    x[k + i] = instance.tasks[i].deadline_s;
    x[2 * k + i] = g[i];
  }
  return x;
}

TrainingSample make_sample(const Instance& instance, const Solution& solution,
                           std::uint64_t seed) {
  TrainingSample s;
  s.x = sample_features(instance);
  s.y = solution.power;
  s.y.insert(s.y.end(), solution.cpu.begin(), solution.cpu.end());
  s.y.push_back(static_cast<double>(solution.bits));
  s.seed = seed;
  return s;
}

std::vector<double> encode_features(std::span<const double> raw, std::size_t devices) {
  require_width(raw.size(), 3 * devices, "encode_features");
  std::vector<double> x(raw.begin(), raw.end());
  for (std::size_t i = 2 * devices; i < 3 * devices; ++i) x[i] = std::log10(x[i]);
  return x;
}

namespace {

int decoded_bits(double raw, const SystemConfig& cfg) {
  if (std::isnan(raw)) return 1;
  return static_cast<int>(
      std::clamp(std::round(raw), 1.0, static_cast<double>(cfg.max_quantization_bits())));
}

// 2^r - 1 for the rate device i needs at CPU rate `cpu`: the SINR an
// interference-free link would have to reach.
double rate_sinr(std::span<const double> features, double cpu, int bits, std::size_t i,
                 const SystemConfig& cfg) {
  const std::size_t k = cfg.devices;
  const TaskSpec task{features[i], cfg.cycles_per_bit * features[i], features[k + i]};
  const double rate = required_rate(cpu, task, compute_window(task, cfg, bits), cfg.bandwidth_hz);
  return std::expm1(rate * std::numbers::ln2);
}

}  // namespace

CpuFloor cpu_floor(std::span<const double> features, int bits, const SystemConfig& cfg) {
  const std::size_t k = cfg.devices;
  require_width(features.size(), 3 * k, "cpu_floor");
  CpuFloor fl;
  fl.floor.resize(k);
  fl.spare = cfg.cpu_hz;
  for (std::size_t i = 0; i < k; ++i) {
    const double b = features[i];
    const double window = features[k + i] - fronthaul_latency(b, cfg.rf_chains, bits,
                                                              cfg.fronthaul_bps,
                                                              cfg.modulation_order);
    fl.floor[i] = window > 0.0 ? cfg.cycles_per_bit * b / window
                               : std::numeric_limits<double>::infinity();
    fl.spare -= fl.floor[i];
  }
  return fl;
}

std::vector<double> encode_targets(std::span<const double> raw, std::span<const double> features,
                                   const SystemConfig& cfg) {
  const std::size_t k = cfg.devices;
  require_width(raw.size(), 2 * k + 1, "encode_targets");
  require_width(features.size(), 3 * k, "encode_targets features");
  const int bits = decoded_bits(raw[2 * k], cfg);
  const CpuFloor fl = cpu_floor(features, bits, cfg);
  std::vector<double> y(raw.begin(), raw.end());
  for (std::size_t i = 0; i < k; ++i) {
    y[i] = std::log10(raw[i] * features[2 * k + i] /
                      (cfg.noise_power_w * rate_sinr(features, raw[k + i], bits, i, cfg)));
    y[k + i] = std::log10((raw[k + i] - fl.floor[i]) / fl.spare);
  }
  return y;
}

std::vector<double> decode_targets(std::span<const double> encoded,
                                   std::span<const double> features, const SystemConfig& cfg) {
  const std::size_t k = cfg.devices;
  require_width(encoded.size(), 2 * k + 1, "decode_targets");
  require_width(features.size(), 3 * k, "decode_targets features");
  const int bits = decoded_bits(encoded[2 * k], cfg);
  const CpuFloor fl = cpu_floor(features, bits, cfg);
  std::vector<double> y(encoded.begin(), encoded.end());
  for (std::size_t i = 0; i < k; ++i) {
    y[k + i] = fl.floor[i] + std::pow(10.0, encoded[k + i]) * fl.spare;
    y[i] = std::pow(10.0, encoded[i]) * cfg.noise_power_w *
           rate_sinr(features, y[k + i], bits, i, cfg) / features[2 * k + i];
  }
  return y;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset generate_dataset(const SystemConfig& cfg, std::uint64_t master_seed, std::size_t count,
                         const DatasetOptions& options) {
  cfg.validate();
  Dataset ds;
  ds.config = cfg;
  std::size_t next = 0;
  std::size_t usable = 0;
  while (ds.samples.size() < count) {
    const std::size_t remaining = count - ds.samples.size();
    const double yield = next == 0 ? 1.0 : std::max(0.05, static_cast<double>(usable) / next);
    const std::size_t chunk = std::max<std::size_t>(
        options.jobs * 4, static_cast<std::size_t>(std::ceil(1.1 * remaining / yield)));
    std::vector<std::optional<TrainingSample>> slots(chunk);
    parallel_for(chunk, options.jobs, [&](std::size_t i) {
      const std::uint64_t seed = Rng::derive(master_seed, next + i);
      const Scenario sc = make_scenario(cfg, seed);
      const Instance inst = sc.instance(options.filter);
      const Solution sol = alternating_optimize(inst, options.solver);
      if (sol.status != SolveStatus::kConverged) return;
      if (!audit_solution(inst, sol).passed) return;
      slots[i] = make_sample(inst, sol, seed);
    });
    for (std::size_t i = 0; i < chunk && ds.samples.size() < count; ++i) {
      ++ds.draws;
      if (slots[i]) {
        ++usable;
        ds.samples.push_back(std::move(*slots[i]));
      } else {
        ds.discarded_seeds.push_back(Rng::derive(master_seed, next + i));
      }
    }
    next += chunk;
    if (ds.draws >= 50 && static_cast<double>(ds.samples.size()) < options.min_yield * ds.draws)
      throw DatasetYieldError("dataset yield " + std::to_string(ds.samples.size()) + "/" +
                              std::to_string(ds.draws) +
                              " usable instances is below the minimum; check the CPU budget "
                              "against the task sizes");
  }
  return ds;
}

void split_dataset(const std::vector<TrainingSample>& all, std::vector<TrainingSample>& train,
                   std::vector<TrainingSample>& test, double train_fraction) {
  const auto n_train =
      static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(all.size())));
  train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, all.size())));
  test.assign(all.begin() + static_cast<std::ptrdiff_t>(train.size()), all.end());
}

// ---------------------------------------------------------------------------
// Training

std::size_t detect_plateau(std::span<const double> loss, std::size_t window, double tolerance) {
  for (std::size_t e = window + 1; e <= loss.size(); ++e) {
    const double before = *std::min_element(loss.begin(), loss.begin() + static_cast<std::ptrdiff_t>(e - window));
    const double now = *std::min_element(loss.begin(), loss.begin() + static_cast<std::ptrdiff_t>(e));
    if (before - now < tolerance * before) return e;
  }
  return 0;
}

namespace {

void encode_set(const std::vector<TrainingSample>& set, const SystemConfig& cfg, Batch& x,
                Batch& y) {
  const std::size_t k = cfg.devices;
  x = Batch{set.size(), 3 * k, {}};
  y = Batch{set.size(), 2 * k + 1, {}};
  for (const auto& s : set) {
    auto fx = encode_features(s.x, k);
    auto fy = encode_targets(s.y, s.x, cfg);
    x.values.insert(x.values.end(), fx.begin(), fx.end());
    y.values.insert(y.values.end(), fy.begin(), fy.end());
  }
}

double dataset_loss(const MlpParams& params, const Batch& x, const Batch& y) {
  Batch pred{x.rows, y.width, {}};
  pred.values.reserve(x.rows * y.width);
  for (std::size_t r = 0; r < x.rows; ++r) {
    auto out = forward(params, x.row(r));
    pred.values.insert(pred.values.end(), out.begin(), out.end());
  }
  return mse(pred, y);
}

}  // namespace

Model train(const SystemConfig& cfg, const std::vector<TrainingSample>& train_set,
            const std::vector<TrainingSample>& test_set, const TrainOptions& options) {
  if (train_set.empty() || test_set.empty())
    throw std::invalid_argument("train: both splits must be non-empty");
  Model model;
  model.config = cfg;
  Batch train_x, train_y, test_x, test_y;
  encode_set(train_set, cfg, train_x, train_y);
  encode_set(test_set, cfg, test_x, test_y);
  model.x_scaler = Scaler::fit(train_x);
  model.y_scaler = Scaler::fit(train_y);
  train_x = model.x_scaler.normalize(train_x);
  train_y = model.y_scaler.normalize(train_y);
  test_x = model.x_scaler.normalize(test_x);
  test_y = model.y_scaler.normalize(test_y);

  if (options.shuffle_labels) {
    Rng rng(Rng::derive(options.seed, 3));
    Batch shuffled = train_y;
    std::vector<std::size_t> perm(train_y.rows);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform() * i)]);
    for (std::size_t r = 0; r < perm.size(); ++r)
      std::copy_n(train_y.row(perm[r]).begin(), train_y.width,
                  shuffled.values.begin() + static_cast<std::ptrdiff_t>(r * train_y.width));
    train_y = std::move(shuffled);
  }

  Rng init_rng(Rng::derive(options.seed, 1));
  const auto sizes = default_layer_sizes(cfg.devices);
  MlpParams params = MlpParams::random(sizes, init_rng);
  AdamState state = AdamState::for_params(params);
  MlpParams grads = MlpParams::zeros(sizes);
  MlpParams best = params;
  double best_loss = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(train_x.rows);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t bs = std::max<std::size_t>(1, options.adam.batch_size);
  Batch bx{0, train_x.width, {}}, by{0, train_y.width, {}};
  for (std::size_t epoch = 1; epoch <= options.max_epochs; ++epoch) {
    Rng shuffle_rng(Rng::derive(options.seed, 100 + epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle_rng.uniform() * i)]);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      bx.rows = by.rows = end - start;
      bx.values.clear();
      by.values.clear();
      for (std::size_t i = start; i < end; ++i) {
        auto xr = train_x.row(order[i]);
        auto yr = train_y.row(order[i]);
        bx.values.insert(bx.values.end(), xr.begin(), xr.end());
        by.values.insert(by.values.end(), yr.begin(), yr.end());
      }
      const MlpParams snapshot = params;
      const double loss = backward(params, bx, by, grads);
      if (!std::isfinite(loss))
        throw TrainingDivergedError("training diverged at epoch " + std::to_string(epoch),
                                    snapshot);
      adam_step(params, grads, state, options.adam);
    }
    model.report.train_mse.push_back(dataset_loss(params, train_x, train_y));
    const double test_loss = dataset_loss(params, test_x, test_y);
    model.report.test_mse.push_back(test_loss);
    if (test_loss < best_loss) {
      best_loss = test_loss;
      best = params;
      model.report.best_epoch = epoch;
    }
    if (model.report.plateau_epoch == 0) {
      model.report.plateau_epoch = detect_plateau(model.report.test_mse, options.plateau_window,
                                                  options.plateau_tolerance);
      if (model.report.plateau_epoch != 0 && options.stop_at_plateau) break;
    }
  }
  model.params = std::move(best);
  return model;
}

// ---------------------------------------------------------------------------
// Inference

std::vector<double> predict_raw(const Model& model, std::span<const double> features) {
  const auto x = model.x_scaler.normalize(encode_features(features, model.config.devices));
  const auto y = model.y_scaler.denormalize(forward(model.params, x));
  return decode_targets(y, features, model.config);
}

namespace {

Allocation postprocess(const Model& model, std::span<const double> features,
                       std::span<const double> raw, double margin) {
  const SystemConfig& cfg = model.config;
  const std::size_t k = cfg.devices;
  Allocation a;
  a.power.resize(k);
  a.cpu.resize(k);
  a.bits = decoded_bits(raw[2 * k], cfg);
  for (std::size_t i = 0; i < k; ++i) {
    const double p = raw[i] * margin;
    a.power[i] = std::isnan(p) ? cfg.max_power_w : std::clamp(p, 0.0, cfg.max_power_w);
  }

  // Shares of the spare budget above each device's minimum CPU rate, kept
  // positive and renormalised, so the rates spend F_T exactly.
  const CpuFloor fl = cpu_floor(features, a.bits, cfg);
  if (fl.spare > 0.0) {
    constexpr double kMinShare = 1e-3;
    std::vector<double> share(k);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double s = (raw[k + i] - fl.floor[i]) / fl.spare;
      share[i] = std::isnan(s) ? kMinShare : std::clamp(s, kMinShare / static_cast<double>(k), 1.0);
      total += share[i];
    }
    for (std::size_t i = 0; i < k; ++i) a.cpu[i] = fl.floor[i] + share[i] / total * fl.spare;
    return a;
  }
  double cpu_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double f = raw[k + i];
    a.cpu[i] = std::isnan(f) ? cfg.cpu_hz / k : std::clamp(f, 1e-9 * cfg.cpu_hz, cfg.cpu_hz);
    cpu_sum += a.cpu[i];
  }
  if (cpu_sum > cfg.cpu_hz)
    for (double& f : a.cpu) f *= cfg.cpu_hz / cpu_sum;
  return a;
}

}  // namespace

Allocation infer(const Model& model, const Instance& instance) {
  const auto features = sample_features(instance);
  return postprocess(model, features, predict_raw(model, features), model.power_margin);
}

ComplexMatrix combiner_for(const Instance& instance, const Allocation& alloc) {
  const double sigma2 = instance.config.noise_power_w;
  const QuantizationModel q =
      quantization_variances(alloc.power, instance.filter, instance.h, sigma2, alloc.bits);
  return mmse_combiner(alloc.power, instance.filter, instance.h, sigma2, q);
}

double required_power_margin(const Model& model, const Instance& instance) {
  const auto features = sample_features(instance);
  const auto raw = predict_raw(model, features);
  auto feasible = [&](double log_margin) {
    const Allocation a = postprocess(model, features, raw, std::exp(log_margin));
    return audit_allocation(instance, combiner_for(instance, a), a).passed;
  };
  double lo = std::log(1e-3);
  double hi = std::log(1e3);
  if (feasible(lo)) return std::exp(lo);
  if (!feasible(hi)) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) hi = mid; else lo = mid;
  }
  return std::exp(hi);
}

double calibrate_power_margin(const Model& model, std::span<const Instance> instances,
                              double coverage) {
  if (instances.empty()) throw std::invalid_argument("calibrate_power_margin: no instances");
  if (!(coverage > 0.0 && coverage <= 1.0))
    throw std::invalid_argument("calibrate_power_margin: coverage must lie in (0, 1]");
  std::vector<double> m(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) m[i] = required_power_margin(model, instances[i]);
  std::sort(m.begin(), m.end());
  const auto idx = static_cast<std::size_t>(std::ceil(coverage * static_cast<double>(m.size()))) - 1;
  return m[std::min(idx, m.size() - 1)];
}

std::vector<Instance> instances_from_samples(const SystemConfig& cfg,
                                             std::span<const TrainingSample> samples,
                                             std::size_t limit, FilterKind filter) {
  std::vector<Instance> out;
  for (std::size_t i = 0; i < samples.size() && i < limit; ++i)
    out.push_back(make_scenario(cfg, samples[i].seed).instance(filter));
  return out;
}

EvalReport evaluate_model(const Model& model, std::span<const TrainingSample> samples,
                          FilterKind filter) {
  const std::size_t k = model.config.devices;
  EvalReport rep;
  double seconds = 0.0;
  for (const auto& s : samples) {
    const Instance inst = make_scenario(model.config, s.seed).instance(filter);
    const auto start = std::chrono::steady_clock::now();
    const Allocation a = infer(model, inst);
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (audit_allocation(inst, combiner_for(inst, a), a).passed) ++rep.feasible;
    double learned = 0.0, optimized = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      learned += a.power[i];
      optimized += s.y[i];
    }
    rep.power_ratio.push_back(learned / optimized);
    ++rep.instances;
  }
  if (rep.instances == 0) throw std::invalid_argument("evaluate_model: no samples");
  std::vector<double> sorted = rep.power_ratio;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  rep.median_power_ratio = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  rep.mean_inference_s = seconds / static_cast<double>(n);
  return rep;
}

}  // namespace cran
