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

// Imitation learner for the joint allocator: an MLP with ReLU hidden layers
// and an affine output, trained with Adam on solved instances.
//
// Raw sample layout (also the dataset CSV layout):
//   x = [b_1..b_K, T_1..T_K, |G_11|..|G_KK|]
//   y = [p_1..p_K, f_1..f_K, varpi]
// The network sees encoded values: log10 |G_kk| as the channel feature,
// log10 of the ratio between p_k |G_kk| / sigma^2 and the SINR 2^r - 1 that
// the device's deadline demands at its CPU rate (decoded after the CPU
// rates), and, for CPU rates, log10 of the fraction of the spare budget
// F_T - sum_j omega_j / Tbar_j each device receives above its own minimum
// omega_k / Tbar_k.

#ifndef CRAN_LEARNER_HPP
#define CRAN_LEARNER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cran/config.hpp"
#include "cran/latency.hpp"
#include "cran/numerics.hpp"
#include "cran/scenario.hpp"
#include "cran/solver.hpp"

namespace cran {

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weight;  // outputs x inputs, row-major
  std::vector<double> bias;    // outputs
};

struct MlpParams {
  std::vector<DenseLayer> layers;

  /// Zero-initialised network with the given layer widths.
  static MlpParams zeros(std::span<const std::size_t> sizes);
  /// He-uniform hidden layers, Glorot-uniform output layer, zero biases.
  static MlpParams random(std::span<const std::size_t> sizes, Rng& rng);

  std::vector<std::size_t> sizes() const;
  std::size_t parameter_count() const;
  bool all_finite() const;
  /// Flat view used by the optimizer: weights then bias, layer by layer.
  double& parameter(std::size_t index);
  double parameter(std::size_t index) const;
};

/// [3K, 128, 64, 32, 2K + 1].
std::vector<std::size_t> default_layer_sizes(std::size_t devices);

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

std::vector<double> forward(const MlpParams& params, std::span<const double> x);

/// Row-major batch: `rows` samples of `width` values each.
struct Batch {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * width, width}; }
};

/// Mean over rows x width of the squared difference.
double mse(const Batch& predicted, const Batch& target);

/// Loss (same normalisation as mse) and its exact gradient in `grads`,
/// which must have the shape of `params`.
double backward(const MlpParams& params, const Batch& x, const Batch& y, MlpParams& grads);

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 64;
};

struct AdamState {
  MlpParams m;
  MlpParams v;
  long step = 0;

  static AdamState for_params(const MlpParams& params);
};

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               const AdamHyper& hyper);

/// Per-column min-max scaler. Constant columns map to 0.
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;

  static Scaler fit(const Batch& data);
  std::vector<double> normalize(std::span<const double> v) const;
  std::vector<double> denormalize(std::span<const double> v) const;
  Batch normalize(const Batch& data) const;
};

struct TrainingSample {
  std::vector<double> x;  // raw features, 3K
  std::vector<double> y;  // raw targets, 2K + 1
  std::uint64_t seed = 0; // regenerates the instance via make_scenario
};

std::vector<double> sample_features(const Instance& instance);
TrainingSample make_sample(const Instance& instance, const Solution& solution,
                           std::uint64_t seed);

/// Minimal CPU rate of every device at bit width `bits` and the budget left
/// above those minima.
struct CpuFloor {
  std::vector<double> floor;
  double spare = 0.0;
};
CpuFloor cpu_floor(std::span<const double> features, int bits, const SystemConfig& cfg);

std::vector<double> encode_features(std::span<const double> raw, std::size_t devices);
std::vector<double> encode_targets(std::span<const double> raw, std::span<const double> features,
                                   const SystemConfig& cfg);
std::vector<double> decode_targets(std::span<const double> encoded,
                                   std::span<const double> features, const SystemConfig& cfg);

struct DatasetOptions {
  FilterKind filter = FilterKind::kHybrid;
  SolverOptions solver{};
  std::size_t jobs = 1;
  /// Abort when fewer than this fraction of drawn instances are usable.
  double min_yield = 0.1;
};

struct Dataset {
  SystemConfig config;
  std::vector<TrainingSample> samples;
  std::vector<std::uint64_t> discarded_seeds;  // infeasible or unconverged draws
  std::size_t draws = 0;
};

class DatasetYieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Instance i uses seed Rng::derive(master_seed, i); draws continue until
/// `count` converged, audited solves are collected. Output is independent
/// of `jobs`.
Dataset generate_dataset(const SystemConfig& cfg, std::uint64_t master_seed, std::size_t count,
                         const DatasetOptions& options = {});

/// First ceil(0.9 n) samples train, the rest test.
void split_dataset(const std::vector<TrainingSample>& all, std::vector<TrainingSample>& train,
                   std::vector<TrainingSample>& test, double train_fraction = 0.9);

struct TrainOptions {
  AdamHyper adam{};
  std::size_t max_epochs = 60;
  std::uint64_t seed = 1;
  /// Stop once the best test loss improved by less than plateau_tolerance
  /// (relative) over the last plateau_window epochs.
  std::size_t plateau_window = 5;
  double plateau_tolerance = 0.1;
  bool stop_at_plateau = true;
  /// Control run: targets are permuted across samples before training.
  bool shuffle_labels = false;
};

struct TrainReport {
  std::vector<double> train_mse;  // per epoch, normalised targets
  std::vector<double> test_mse;
  std::size_t plateau_epoch = 0;  // 0 when no plateau was detected
  std::size_t best_epoch = 0;
};

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(const std::string& what, MlpParams last_finite)
      : std::runtime_error(what), last_finite_(std::move(last_finite)) {}
  const MlpParams& last_finite() const { return last_finite_; }

 private:
  MlpParams last_finite_;
};

/// Epoch at which the plateau rule first fires for a loss curve (1-based),
/// or 0 when it never does.
std::size_t detect_plateau(std::span<const double> loss, std::size_t window, double tolerance);

struct Model {
  SystemConfig config;
  MlpParams params;
  Scaler x_scaler;
  Scaler y_scaler;
  /// Multiplier applied to predicted powers before clamping.
  double power_margin = 1.0;
  TrainReport report;
};

/// Fits both scalers on `train_set`, trains, and keeps the parameters with the
/// lowest test loss.
Model train(const SystemConfig& cfg, const std::vector<TrainingSample>& train_set,
            const std::vector<TrainingSample>& test_set, const TrainOptions& options = {});

/// Network output decoded to physical units, before any post-processing.
std::vector<double> predict_raw(const Model& model, std::span<const double> features);

/// Post-processed allocation: bit width rounded into [1, max_quantization_bits],
/// powers scaled by the margin and clamped to [0, P_max], CPU rates placed
/// above their minima with positive renormalised spare shares (or, when the
/// minima already exceed F_T, clamped and rescaled to fit F_T).
Allocation infer(const Model& model, const Instance& instance);

/// MMSE combiner the baseband unit would use for an allocation.
ComplexMatrix combiner_for(const Instance& instance, const Allocation& alloc);

/// Smallest factor on the predicted powers that makes the allocation pass
/// the audit; +inf when no factor in [1e-3, 1e3] does.
double required_power_margin(const Model& model, const Instance& instance);

/// Quantile `coverage` of required_power_margin over the instances.
double calibrate_power_margin(const Model& model, std::span<const Instance> instances,
                              double coverage);

/// Instances rebuilt from the sample seeds, at most `limit` of them.
std::vector<Instance> instances_from_samples(const SystemConfig& cfg,
                                             std::span<const TrainingSample> samples,
                                             std::size_t limit,
                                             FilterKind filter = FilterKind::kHybrid);

struct EvalReport {
  std::size_t instances = 0;
  std::size_t feasible = 0;           // allocations passing the audit
  double median_power_ratio = 0.0;    // learned P_sum / optimized P_sum
  std::vector<double> power_ratio;    // per instance
  double mean_inference_s = 0.0;      // infer() only
};

/// Runs the learned allocator on every sample's instance and compares it
/// with the stored optimized allocation.
EvalReport evaluate_model(const Model& model, std::span<const TrainingSample> samples,
                          FilterKind filter = FilterKind::kHybrid);

}  // namespace cran

#endif  // CRAN_LEARNER_HPP
