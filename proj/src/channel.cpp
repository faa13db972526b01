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

#include "cran/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cran {

double Geometry::distance(std::size_t antenna, std::size_t device) const {
  const WallPoint& a = antennas.at(antenna);
  const RoomPoint& d = devices.at(device);
  const double dx = d.x - a.x;
  const double dz = d.z - a.z;
  return std::sqrt(dx * dx + d.y * d.y + dz * dz);
}

double FadingParams::rician_db(double distance_m) const {
  return rician_db_intercept - rician_db_slope * distance_m;
}

FadingParams FadingParams::from_config(const SystemConfig& cfg) {
  FadingParams f;
  f.wavelength_m = cfg.wavelength_m();
  f.pathloss_exponent = cfg.pathloss_exponent;
  f.shadow_sigma_db = cfg.shadow_sigma_db;
  f.rician_db_intercept = cfg.rician_db_intercept;
  f.rician_db_slope = cfg.rician_db_slope;
  return f;
}

RicianWeights rician_weights(double kappa_db) {
  // kappa/(kappa+1) = 1/(1 + 10^(-kdB/10)); stays finite at +-inf dB.
  const double los2 = 1.0 / (1.0 + std::pow(10.0, -kappa_db / 10.0));
  const double nlos2 = 1.0 / (1.0 + std::pow(10.0, kappa_db / 10.0));
  return {std::sqrt(los2), std::sqrt(nlos2)};
}

Geometry place_scene(Rng& rng, const SystemConfig& cfg) {
  if (cfg.antennas < 1 || cfg.devices < 1)
    throw std::invalid_argument("place_scene: need at least one antenna and one device");
  if (!(cfg.room.x > 0.0 && cfg.room.y > 0.0 && cfg.room.z > 0.0))
    throw std::invalid_argument("place_scene: room extents must be positive");
  Geometry g;
  g.room = cfg.room;
  g.antennas.reserve(cfg.antennas);
  for (std::size_t n = 0; n < cfg.antennas; ++n) {
    WallPoint p;
    p.x = rng.uniform(0.0, cfg.room.x);
    p.z = rng.uniform(0.0, cfg.room.z);
    g.antennas.push_back(p);
  }
  g.devices.reserve(cfg.devices);
  for (std::size_t k = 0; k < cfg.devices; ++k) {
    RoomPoint p;
    p.x = rng.uniform(0.0, cfg.room.x);
    p.y = rng.uniform(cfg.device_min_y, cfg.room.y);
    p.z = rng.uniform(0.0, cfg.room.z);
    g.devices.push_back(p);
  }
  return g;
}

ComplexVector los_component(const Geometry& geometry, const FadingParams& fading,
                            std::size_t device) {
  if (device >= geometry.devices.size()) throw std::out_of_range("los_component: device index");
  ComplexVector v(geometry.antennas.size());
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double d = geometry.distance(n, device);
    const double amplitude = 1.0 / std::sqrt(4.0 * std::numbers::pi * d * d);
    const double phase = -2.0 * std::numbers::pi * d / fading.wavelength_m;
    v[n] = std::polar(amplitude, phase);
  }
  return v;
}

ComplexVector nlos_component(Rng& rng, const Geometry& geometry, const FadingParams& fading,
                             std::size_t device) {
  if (device >= geometry.devices.size()) throw std::out_of_range("nlos_component: device index");
  ComplexVector v(geometry.antennas.size());
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double d = geometry.distance(n, device);
    const double tau = sample_lognormal_shadow(rng, fading.shadow_sigma_db);
    const Complex g = sample_complex_gaussian(rng, 1, 1.0)[0];
    v[n] = std::sqrt(std::pow(d, -fading.pathloss_exponent) * tau) * g;
  }
  return v;
}

ChannelRealization generate_channel(Rng& rng, const Geometry& geometry,
                                    const FadingParams& fading) {
  const std::size_t kcount = geometry.devices.size();
  const std::size_t ncount = geometry.antennas.size();
  ChannelRealization out;
  out.h = ComplexMatrix(kcount, ncount);
  out.distance_m.resize(kcount * ncount);
  for (std::size_t k = 0; k < kcount; ++k) {
    const ComplexVector los = los_component(geometry, fading, k);
    const ComplexVector nlos = nlos_component(rng, geometry, fading, k);
    for (std::size_t n = 0; n < ncount; ++n) {
      const double d = geometry.distance(n, k);
      const RicianWeights w = rician_weights(fading.rician_db(d));
      out.h(k, n) = w.los * los[n] + w.nlos * nlos[n];
      out.distance_m[k * ncount + n] = d;
    }
  }
  return out;
}

}  // namespace cran
