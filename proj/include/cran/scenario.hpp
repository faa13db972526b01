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

#ifndef CRAN_SCENARIO_HPP
#define CRAN_SCENARIO_HPP

#include <cstdint>
#include <vector>

#include "cran/channel.hpp"
#include "cran/config.hpp"
#include "cran/frontend.hpp"
#include "cran/latency.hpp"
#include "cran/solver.hpp"

namespace cran {

enum class FilterKind { kHybrid, kFullyDigital };

const char* to_string(FilterKind kind);

/// Everything drawn for one trial. The seed alone regenerates it: stream 0
/// places the scene, stream 1 draws fading, stream 2 draws the tasks.
struct Scenario {
  std::uint64_t seed = 0;
  SystemConfig config;
  Geometry geometry;
  ChannelRealization channel;
  std::vector<TaskSpec> tasks;
  FrontendDesign hybrid;   // phase-projected analog stage plus digital stage
  FrontendDesign digital;  // matched filter used directly

  Instance instance(FilterKind kind = FilterKind::kHybrid) const;
};

Scenario make_scenario(const SystemConfig& cfg, std::uint64_t seed);

/// |G_kk| for the given filter, the learner's channel feature.
std::vector<double> diagonal_gain_magnitudes(const ComplexMatrix& filter, const ComplexMatrix& h);

}  // namespace cran

#endif  // CRAN_SCENARIO_HPP
