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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "cran/latency.hpp"
#include "cran/learner.hpp"
#include "cran/scenario.hpp"
#include "support.hpp"

using namespace cran;
using cran::test::uniform_vector;

namespace {

MlpParams toy_net(std::uint64_t seed) {
  const std::vector<std::size_t> sizes{6, 7, 5, 5};
  Rng rng(seed);
  MlpParams p = MlpParams::random(sizes, rng);
  // Non-zero biases so every layer's bias gradient is exercised.
  for (auto& l : p.layers)
    for (auto& b : l.bias) b = rng.uniform(-0.3, 0.3);
  return p;
}

Batch random_batch(Rng& rng, std::size_t rows, std::size_t width) {
  Batch b{rows, width, uniform_vector(rng, rows * width, -1.0, 1.0)};
  return b;
}

Batch predict(const MlpParams& p, const Batch& x) {
  Batch out{x.rows, p.layers.back().outputs, {}};
  for (std::size_t r = 0; r < x.rows; ++r) {
    const auto y = forward(p, x.row(r));
    out.values.insert(out.values.end(), y.begin(), y.end());
  }
  return out;
}

// Straight-line forward pass written independently of the library.
std::vector<double> reference_forward(const MlpParams& p, std::span<const double> x) {
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const DenseLayer& layer = p.layers[l];
    std::vector<double> z(layer.outputs);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      double s = layer.bias[o];
      for (std::size_t i = 0; i < layer.inputs; ++i) s += layer.weight[o * layer.inputs + i] * a[i];
      z[o] = (l + 1 < p.layers.size() && s < 0.0) ? 0.0 : s;
    }
    a = z;
  }
  return a;
}

const Dataset& shared_dataset() {
  static const Dataset ds = generate_dataset(default_config(), 3, 240);
  return ds;
}

}  // namespace

TEST_CASE("ReLU and the degenerate network") {
  CHECK(relu(-2.0) == 0.0);
  CHECK(relu(3.0) == 3.0);
  CHECK(relu(0.0) == 0.0);
  const auto sizes = default_layer_sizes(10);
  CHECK(sizes == std::vector<std::size_t>{30, 128, 64, 32, 21});
  const MlpParams zero = MlpParams::zeros(sizes);
  const std::vector<double> x(30, 1.7);
  for (double v : forward(zero, x)) CHECK(v == 0.0);
  CHECK(zero.parameter_count() == 30 * 128 + 128 + 128 * 64 + 64 + 64 * 32 + 32 + 32 * 21 + 21);
}

TEST_CASE("forward pass matches an independent implementation") {
  Rng rng(1);
  const auto sizes = default_layer_sizes(10);
  const MlpParams p = MlpParams::random(sizes, rng);
  CHECK(p.all_finite());
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = uniform_vector(rng, 30, -2.0, 2.0);
    const auto a = forward(p, x);
    const auto b = reference_forward(p, x);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
  }
  CHECK_THROWS_AS(forward(p, std::vector<double>(29, 0.0)), std::invalid_argument);
}

TEST_CASE("mean squared error") {
  Rng rng(2);
  const Batch a = random_batch(rng, 5, 7);
  CHECK(mse(a, a) == 0.0);
  Batch shifted = a;
  for (auto& v : shifted.values) v += 1.0;
  CHECK(mse(shifted, a) == doctest::Approx(1.0).epsilon(1e-14));
  const Batch b = random_batch(rng, 5, 7);
  double s = 0.0;
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 7; ++c) s += std::pow(a.values[r * 7 + c] - b.values[r * 7 + c], 2);
  CHECK(std::abs(mse(a, b) - s / 35.0) <= 1e-12);
  CHECK_THROWS_AS(mse(Batch{}, Batch{}), std::invalid_argument);
  CHECK_THROWS_AS(mse(a, random_batch(rng, 4, 7)), std::invalid_argument);
}

TEST_CASE("backpropagation matches central differences on every parameter") {
  Rng rng(3);
  const MlpParams p = toy_net(4);
  const Batch x = random_batch(rng, 8, 6);
  const Batch y = random_batch(rng, 8, 5);
  MlpParams g;
  const double loss = backward(p, x, y, g);
  CHECK(loss == doctest::Approx(mse(predict(p, x), y)).epsilon(1e-14));
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.parameter_count(); ++i) {
    MlpParams up = p, down = p;
    up.parameter(i) += h;
    down.parameter(i) -= h;
    const double fd = (mse(predict(up, x), y) - mse(predict(down, x), y)) / (2.0 * h);
    const double err = std::abs(g.parameter(i) - fd) / std::max(std::abs(fd), 1e-6);
    worst = std::max(worst, err);
  }
  MESSAGE("worst relative gradient error " << worst);
  CHECK(worst <= 1e-4);
}

TEST_CASE("output bias gradient is the scaled mean residual") {
  Rng rng(5);
  const MlpParams p = toy_net(6);
  const Batch x = random_batch(rng, 4, 6);
  const Batch y = random_batch(rng, 4, 5);
  MlpParams g;
  backward(p, x, y, g);
  const Batch yh = predict(p, x);
  for (std::size_t o = 0; o < 5; ++o) {
    double r = 0.0;
    for (std::size_t s = 0; s < 4; ++s) r += yh.values[s * 5 + o] - y.values[s * 5 + o];
    CHECK(g.layers.back().bias[o] == doctest::Approx(2.0 * r / (4.0 * 5.0)).epsilon(1e-12));
  }
  // A perfect fit has zero gradient.
  MlpParams g0;
  CHECK(backward(p, x, yh, g0) == 0.0);
  for (std::size_t i = 0; i < g0.parameter_count(); ++i) CHECK(g0.parameter(i) == 0.0);
}

TEST_CASE("Adam step") {
  MlpParams p = toy_net(7);
  const MlpParams before = p;
  AdamState st = AdamState::for_params(p);
  const AdamHyper hyper;
  adam_step(p, MlpParams::zeros(p.sizes()), st, hyper);
  for (std::size_t i = 0; i < p.parameter_count(); ++i) CHECK(p.parameter(i) == before.parameter(i));

  // First step with a constant gradient moves every parameter by about lr.
  MlpParams q = before;
  AdamState st2 = AdamState::for_params(q);
  MlpParams grad = MlpParams::zeros(q.sizes());
  for (std::size_t i = 0; i < grad.parameter_count(); ++i) grad.parameter(i) = (i % 2 ? 0.7 : -2.5);
  adam_step(q, grad, st2, hyper);
  for (std::size_t i = 0; i < q.parameter_count(); ++i) {
    const double step = before.parameter(i) - q.parameter(i);
    const double expect = hyper.learning_rate * (grad.parameter(i) > 0 ? 1.0 : -1.0);
    CHECK(step == doctest::Approx(expect).epsilon(1e-6));
  }

  MlpParams r = before;
  AdamState st3 = AdamState::for_params(r);
  adam_step(r, grad, st3, hyper);
  for (std::size_t i = 0; i < r.parameter_count(); ++i) CHECK(r.parameter(i) == q.parameter(i));
}

TEST_CASE("min-max scaler") {
  Rng rng(8);
  Batch data = random_batch(rng, 50, 4);
  for (std::size_t r = 0; r < 50; ++r) data.values[r * 4 + 3] = 2.5;  // constant column
  const Scaler s = Scaler::fit(data);
  const Batch n = s.normalize(data);
  for (std::size_t r = 0; r < 50; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(n.values[r * 4 + c] >= 0.0);
      CHECK(n.values[r * 4 + c] <= 1.0);
    }
    CHECK(n.values[r * 4 + 3] == 0.0);
    const auto back = s.denormalize(n.row(r));
    for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(back[c] - data.values[r * 4 + c]) <= 1e-12);
  }
  for (std::size_t c = 0; c < 4; ++c) CHECK(s.max[c] >= s.min[c]);
}

TEST_CASE("plateau rule") {
  const std::vector<double> flat{1.0, 0.5, 0.3, 0.29, 0.289, 0.288, 0.2879, 0.2878, 0.2877, 0.2876};
  CHECK(detect_plateau(flat, 3, 0.1) == 6);
  const std::vector<double> falling{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
  CHECK(detect_plateau(falling, 3, 0.1) == 0);
  CHECK(detect_plateau(std::vector<double>{1.0, 0.9}, 5, 0.1) == 0);
}

TEST_CASE("dataset samples come from audited solves and are reproducible") {
  const Dataset& ds = shared_dataset();
  REQUIRE(ds.samples.size() == 240);
  CHECK(ds.draws >= ds.samples.size());
  const SystemConfig& cfg = ds.config;
  for (std::size_t i = 0; i < 40; ++i) {
    const TrainingSample& s = ds.samples[i];
    const Instance inst = make_scenario(cfg, s.seed).instance();
    CHECK(sample_features(inst) == s.x);
    Allocation a;
    a.power.assign(s.y.begin(), s.y.begin() + 10);
    a.cpu.assign(s.y.begin() + 10, s.y.begin() + 20);
    a.bits = static_cast<int>(s.y[20]);
    CHECK(audit_allocation(inst, combiner_for(inst, a), a).passed);
    // The solver leaves the CPU budget active, so compare with roundoff slack.
    const FeasibilityReport rep =
        check_feasibility(a.power, a.bits, inst.tasks, cfg, inst.filter, inst.h);
    CHECK(rep.deadlines_reachable);
    CHECK(rep.cpu_required_hz <= cfg.cpu_hz * (1.0 + 1e-9));
  }

  DatasetOptions parallel;
  parallel.jobs = 2;
  const Dataset serial_run = generate_dataset(cfg, 3, 30);
  const Dataset parallel_run = generate_dataset(cfg, 3, 30, parallel);
  REQUIRE(parallel_run.samples.size() == 30);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(serial_run.samples[i].seed == parallel_run.samples[i].seed);
    CHECK(serial_run.samples[i].y == parallel_run.samples[i].y);
    CHECK(serial_run.samples[i].y == ds.samples[i].y);
  }
}

TEST_CASE("an infeasible scenario family aborts with a yield error") {
  SystemConfig cfg = default_config();
  cfg.cycles_per_bit = 200.0;
  CHECK_THROWS_AS(generate_dataset(cfg, 1, 5), DatasetYieldError);
}

TEST_CASE("nine-to-one split") {
  std::vector<TrainingSample> all(25);
  for (std::size_t i = 0; i < all.size(); ++i) all[i].seed = i;
  std::vector<TrainingSample> train_set, test_set;
  split_dataset(all, train_set, test_set);
  CHECK(train_set.size() == 23);
  CHECK(test_set.size() == 2);
  CHECK(test_set.front().seed == 23);
}

TEST_CASE("target encoding round-trips") {
  const Dataset& ds = shared_dataset();
  for (std::size_t i = 0; i < 50; ++i) {
    const auto& s = ds.samples[i];
    const auto enc = encode_targets(s.y, s.x, ds.config);
    for (double v : enc) CHECK(std::isfinite(v));
    const auto dec = decode_targets(enc, s.x, ds.config);
    for (std::size_t j = 0; j < s.y.size(); ++j) CHECK(dec[j] == doctest::Approx(s.y[j]).epsilon(1e-9));
  }
}

TEST_CASE("training is deterministic and beats a shuffled-label control") {
  const Dataset& ds = shared_dataset();
  std::vector<TrainingSample> train_set, test_set;
  split_dataset(ds.samples, train_set, test_set);
  TrainOptions opt;
  opt.max_epochs = 150;
  opt.stop_at_plateau = false;
  const Model a = train(ds.config, train_set, test_set, opt);
  const Model b = train(ds.config, train_set, test_set, opt);
  REQUIRE(a.report.train_mse.size() == 150);
  CHECK(a.report.train_mse == b.report.train_mse);
  CHECK(a.report.test_mse == b.report.test_mse);
  CHECK(a.params.all_finite());

  opt.shuffle_labels = true;
  const Model control = train(ds.config, train_set, test_set, opt);
  const double real = a.report.test_mse.back();
  const double shuffled = control.report.test_mse.back();
  MESSAGE("final test MSE " << real << ", shuffled-label control " << shuffled);
  CHECK(shuffled > 1.5 * real);
}

TEST_CASE("post-processing keeps every output inside the box") {
  const Dataset& ds = shared_dataset();
  std::vector<TrainingSample> train_set, test_set;
  split_dataset(ds.samples, train_set, test_set);
  TrainOptions opt;
  opt.max_epochs = 3;
  Model model = train(ds.config, train_set, test_set, opt);
  const SystemConfig& cfg = ds.config;
  Rng rng(9);
  for (int rep = 0; rep < 60; ++rep) {
    // Random weights push the network far outside its training range.
    if (rep % 3 == 1) {
      Rng w(100 + rep);
      model.params = MlpParams::random(default_layer_sizes(10), w);
      for (auto& l : model.params.layers)
        for (auto& v : l.weight) v *= rng.uniform(1.0, 50.0);
    }
    model.power_margin = std::pow(10.0, rng.uniform(-3.0, 3.0));
    SystemConfig odd = cfg;
    odd.bits_min = rng.uniform(1e3, 3e4);
    odd.bits_max = odd.bits_min * 1.5;
    odd.deadline_min_s = rng.uniform(0.05, 2.0);
    odd.deadline_max_s = odd.deadline_min_s * 1.5;
    const Instance inst = make_scenario(odd, 1000 + rep).instance();
    const Allocation a = infer(model, inst);
    double cpu = 0.0;
    for (std::size_t k = 0; k < 10; ++k) {
      CHECK(a.power[k] >= 0.0);
      CHECK(a.power[k] <= cfg.max_power_w);
      CHECK(a.cpu[k] > 0.0);
      cpu += a.cpu[k];
    }
    CHECK(cpu <= cfg.cpu_hz * (1.0 + 1e-12));
    CHECK(a.bits >= 1);
    CHECK(a.bits <= cfg.max_quantization_bits());
  }
}
