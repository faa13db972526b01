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

#include "cran/scenario.hpp"

#include <cmath>

namespace cran {

const char* to_string(FilterKind kind) {
  return kind == FilterKind::kHybrid ? "hsf" : "fdsf";
}

Instance Scenario::instance(FilterKind kind) const {
  const FrontendDesign& d = kind == FilterKind::kHybrid ? hybrid : digital;
  return Instance{config, tasks, channel.h, d.filter};
}

Scenario make_scenario(const SystemConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Scenario s;
  s.seed = seed;
  s.config = cfg;
  Rng scene_rng(Rng::derive(seed, 0));
  Rng fading_rng(Rng::derive(seed, 1));
  Rng task_rng(Rng::derive(seed, 2));
  s.geometry = place_scene(scene_rng, cfg);
  s.channel = generate_channel(fading_rng, s.geometry, FadingParams::from_config(cfg));
  s.tasks = generate_tasks(task_rng, cfg);
  s.digital = fdsf_design(s.channel);
  s.hybrid = hsf_decompose(fdsf_matched_filter(s.channel));
  return s;
}

std::vector<double> diagonal_gain_magnitudes(const ComplexMatrix& filter, const ComplexMatrix& h) {
  const ComplexMatrix g = effective_channel(filter, h);
  std::vector<double> out(h.rows());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(g(k, k));
  return out;
}

}  // namespace cran
