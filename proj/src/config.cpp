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

#include "cran/config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cran {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz, double noise_figure_db) {
  return dbm_to_watts(psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

double SystemConfig::bits_per_symbol() const { return std::log2(static_cast<double>(modulation_order)); }

int SystemConfig::max_quantization_bits() const {
  return static_cast<int>(std::floor(fronthaul_bps / (2.0 * bandwidth_hz * static_cast<double>(rf_chains))));
}

void SystemConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid SystemConfig: ") + what);
  };
  require(antennas >= 1, "antennas must be >= 1");
  require(devices >= 1, "devices must be >= 1");
  require(rf_chains == devices, "rf_chains must equal devices");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
  require(fronthaul_bps > 0.0, "fronthaul_bps must be positive");
  require(cpu_hz > 0.0, "cpu_hz must be positive");
  require(modulation_order >= 2 && (modulation_order & (modulation_order - 1)) == 0,
          "modulation_order must be a power of two >= 2");
  require(noise_power_w > 0.0, "noise_power_w must be positive");
  require(max_power_w > 0.0, "max_power_w must be positive");
  require(cycles_per_bit > 0.0, "cycles_per_bit must be positive");
  require(room.x > 0.0 && room.y > 0.0 && room.z > 0.0, "room extents must be positive");
  require(device_min_y > 0.0 && device_min_y < room.y, "device_min_y must lie in (0, room.y)");
  require(carrier_hz > 0.0, "carrier_hz must be positive");
  require(pathloss_exponent > 0.0, "pathloss_exponent must be positive");
  require(shadow_sigma_db >= 0.0, "shadow_sigma_db must be non-negative");
  require(bits_min > 0.0 && bits_max >= bits_min, "bit range must be positive and ordered");
  require(deadline_min_s > 0.0 && deadline_max_s >= deadline_min_s,
          "deadline range must be positive and ordered");
}

SystemConfig default_config() { return SystemConfig{}; }

}  // namespace cran
