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

#ifndef CRAN_CHANNEL_HPP
#define CRAN_CHANNEL_HPP

#include <cstddef>
#include <vector>

#include "cran/config.hpp"
#include "cran/numerics.hpp"

namespace cran {

/// Antenna location on the y = 0 wall.
struct WallPoint {
  double x = 0.0;
  double z = 0.0;
};

struct RoomPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Geometry {
  std::vector<WallPoint> antennas;
  std::vector<RoomPoint> devices;
  RoomExtents room{};

  double distance(std::size_t antenna, std::size_t device) const;
};

struct FadingParams {
  double wavelength_m = 0.2;
  double pathloss_exponent = 3.7;
  double shadow_sigma_db = 6.0;
  double rician_db_intercept = 13.0;
  double rician_db_slope = 0.03;

  /// Rician factor in dB at distance d. Infinite intercepts give the pure
  /// LOS (+inf) or pure NLOS (-inf) limits.
  double rician_db(double distance_m) const;

  static FadingParams from_config(const SystemConfig& cfg);
};

/// sqrt(kappa / (kappa + 1)) and sqrt(1 / (kappa + 1)) for kappa given in dB.
struct RicianWeights {
  double los = 0.0;
  double nlos = 0.0;
};
RicianWeights rician_weights(double kappa_db);

struct ChannelRealization {
  ComplexMatrix h;                 // K x N, row k holds h_k^T
  std::vector<double> distance_m;  // K x N, row-major

  std::size_t devices() const { return h.rows(); }
  std::size_t antennas() const { return h.cols(); }
  /// h_k as an N-vector.
  ComplexVector device_channel(std::size_t k) const { return h.row(k); }
};

/// Uniform antenna drop on the wall and uniform device drop inside the room
/// with y >= cfg.device_min_y.
Geometry place_scene(Rng& rng, const SystemConfig& cfg);

ComplexVector los_component(const Geometry& geometry, const FadingParams& fading,
                            std::size_t device);

/// Entry n is sqrt(d^-xi * tau) * g with tau log-normal and g ~ CN(0, 1).
/// Draw order per antenna: shadow, then the complex Gaussian.
ComplexVector nlos_component(Rng& rng, const Geometry& geometry, const FadingParams& fading,
                             std::size_t device);

/// Per-antenna Rician mixture of the two components, devices drawn in order.
ChannelRealization generate_channel(Rng& rng, const Geometry& geometry,
                                    const FadingParams& fading);

}  // namespace cran

#endif  // CRAN_CHANNEL_HPP
