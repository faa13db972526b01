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

#ifndef CRAN_CONFIG_HPP
#define CRAN_CONFIG_HPP

#include <cstddef>

namespace cran {

inline constexpr double kSpeedOfLight = 3.0e8;

/// dBm/Hz noise density plus noise figure, integrated over `bandwidth_hz`,
/// returned in watts.
double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz, double noise_figure_db);

double dbm_to_watts(double dbm);

struct RoomExtents {
  double x = 10.0;
  double y = 10.0;
  double z = 10.0;
};

/// Every scenario constant. Defaults reproduce the indoor 10 m cube with a
/// 128-antenna wall array serving 10 devices.
struct SystemConfig {
  std::size_t antennas = 128;   // N
  std::size_t devices = 10;     // K
  std::size_t rf_chains = 10;   // R, always equal to K

  double bandwidth_hz = 180e3;         // B_W
  double fronthaul_bps = 1e8;          // C_F
  double cpu_hz = 1.5e7;               // F_T, cycles per second
  unsigned modulation_order = 4;       // M (QPSK)
  double noise_power_w = noise_power_watts(-169.0, 180e3, 7.0);
  double max_power_w = 1e-3;           // P_max, 0 dBm
  double cycles_per_bit = 50.0;        // eta, omega_k = eta * b_k

  RoomExtents room{};
  double device_min_y = 0.5;           // keeps devices off the antenna wall
  double carrier_hz = 1.5e9;
  double pathloss_exponent = 3.7;
  double shadow_sigma_db = 6.0;
  double rician_db_intercept = 13.0;   // kappa(d) = intercept - slope * d [dB]
  double rician_db_slope = 0.03;

  double bits_min = 10e3;
  double bits_max = 20e3;
  double deadline_min_s = 0.5;
  double deadline_max_s = 1.0;

  double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
  double bits_per_symbol() const;

  /// Largest bit width allowed by the fronthaul capacity, floor(C_F / (2 B_W R)).
  int max_quantization_bits() const;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

SystemConfig default_config();

}  // namespace cran

#endif  // CRAN_CONFIG_HPP
