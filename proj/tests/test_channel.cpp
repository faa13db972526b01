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

#include <cmath>
#include <limits>
#include <numbers>

#include <doctest.h>

#include "cran/channel.hpp"
#include "cran/config.hpp"

using namespace cran;

namespace {

Geometry single_link(double x, double y, double z, std::size_t antennas = 1) {
  Geometry g;
  g.antennas.assign(antennas, WallPoint{0.0, 0.0});
  g.devices.push_back(RoomPoint{x, y, z});
  return g;
}

FadingParams no_shadow() {
  FadingParams f;
  f.shadow_sigma_db = 0.0;
  return f;
}

}  // namespace

TEST_CASE("scene placement respects the room") {
  Rng rng(1);
  const SystemConfig cfg = default_config();
  const Geometry g = place_scene(rng, cfg);
  REQUIRE(g.antennas.size() == 128);
  REQUIRE(g.devices.size() == 10);
  for (const auto& a : g.antennas) {
    CHECK(a.x >= 0.0);
    CHECK(a.x <= 10.0);
    CHECK(a.z >= 0.0);
    CHECK(a.z <= 10.0);
  }
  for (const auto& d : g.devices) {
    CHECK(d.x >= 0.0);
    CHECK(d.x <= 10.0);
    CHECK(d.y >= cfg.device_min_y);
    CHECK(d.y <= 10.0);
    CHECK(d.z >= 0.0);
    CHECK(d.z <= 10.0);
  }
  for (std::size_t n = 0; n < g.antennas.size(); ++n)
    for (std::size_t k = 0; k < g.devices.size(); ++k) CHECK(g.distance(n, k) > 0.0);
}

TEST_CASE("minimal scene and determinism") {
  SystemConfig cfg = default_config();
  cfg.antennas = 1;
  cfg.devices = 1;
  cfg.rf_chains = 1;
  Rng rng(2);
  const Geometry g = place_scene(rng, cfg);
  CHECK(g.antennas.size() == 1);
  CHECK(g.devices.size() == 1);
  CHECK(g.distance(0, 0) > 0.0);

  Rng a(9), b(9);
  const Geometry ga = place_scene(a, default_config());
  const Geometry gb = place_scene(b, default_config());
  for (std::size_t n = 0; n < ga.antennas.size(); ++n) {
    CHECK(ga.antennas[n].x == gb.antennas[n].x);
    CHECK(ga.antennas[n].z == gb.antennas[n].z);
  }
  for (std::size_t k = 0; k < ga.devices.size(); ++k) CHECK(ga.devices[k].y == gb.devices[k].y);
}

TEST_CASE("line-of-sight component") {
  const FadingParams f = no_shadow();
  const Geometry g = single_link(3.0, 4.0, 0.0);
  CHECK(g.distance(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
  const auto v = los_component(g, f, 0);
  CHECK(std::abs(v[0]) == doctest::Approx(1.0 / std::sqrt(100.0 * std::numbers::pi)));
  CHECK(std::abs(v[0]) == doctest::Approx(0.056419).epsilon(1e-5));

  const Geometry one_wave = single_link(0.0, f.wavelength_m, 0.0);
  const auto w = los_component(one_wave, f, 0);
  CHECK(w[0].real() > 0.0);
  CHECK(std::abs(w[0].imag()) < 1e-12 * std::abs(w[0]));
  CHECK_THROWS_AS(los_component(g, f, 1), std::out_of_range);
}

TEST_CASE("non-line-of-sight second moment") {
  FadingParams f = no_shadow();
  Rng rng(3);
  auto mean_power = [&](double d) {
    const auto v = nlos_component(rng, single_link(0.0, d, 0.0, 100000), f, 0);
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s / static_cast<double>(v.size());
  };
  CHECK(std::abs(mean_power(1.0) - 1.0) <= 0.02);
  CHECK(std::abs(mean_power(10.0) / std::pow(10.0, -3.7) - 1.0) <= 0.03);

  f.shadow_sigma_db = 6.0;
  Rng a(4), b(4);
  const Geometry g = single_link(1.0, 2.0, 3.0, 16);
  CHECK(nlos_component(a, g, f, 0) == nlos_component(b, g, f, 0));
}

TEST_CASE("Rician factor and weights") {
  const FadingParams f;
  CHECK(f.rician_db(100.0) == doctest::Approx(10.0));
  CHECK(f.rician_db(0.0) == doctest::Approx(13.0));
  for (double kdb : {-20.0, -3.0, 0.0, 5.5, 13.0, 40.0}) {
    const RicianWeights w = rician_weights(kdb);
    CHECK(std::abs(w.los * w.los + w.nlos * w.nlos - 1.0) <= 1e-12);
  }
  const RicianWeights zero_db = rician_weights(0.0);
  CHECK(zero_db.los == doctest::Approx(std::sqrt(0.5)));
  const RicianWeights ten_db = rician_weights(10.0);
  CHECK(ten_db.los * ten_db.los == doctest::Approx(10.0 / 11.0));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(rician_weights(inf).los == 1.0);
  CHECK(rician_weights(inf).nlos == 0.0);
  CHECK(rician_weights(-inf).los == 0.0);
  CHECK(rician_weights(-inf).nlos == 1.0);
}

TEST_CASE("channel limits reduce to a single component") {
  Rng scene(5);
  SystemConfig cfg = default_config();
  cfg.antennas = 16;
  cfg.devices = 3;
  cfg.rf_chains = 3;
  const Geometry g = place_scene(scene, cfg);
  FadingParams f = FadingParams::from_config(cfg);

  f.rician_db_intercept = std::numeric_limits<double>::infinity();
  Rng r1(6);
  const auto los_only = generate_channel(r1, g, f);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto los = los_component(g, f, k);
    for (std::size_t n = 0; n < 16; ++n) CHECK(los_only.h(k, n) == los[n]);
  }

  f.rician_db_intercept = -std::numeric_limits<double>::infinity();
  Rng r2(7), r3(7);
  const auto nlos_only = generate_channel(r2, g, f);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto nlos = nlos_component(r3, g, f, k);
    for (std::size_t n = 0; n < 16; ++n) CHECK(nlos_only.h(k, n) == nlos[n]);
  }
}

TEST_CASE("Rayleigh second moment matches the path loss per entry") {
  FadingParams f = no_shadow();
  f.rician_db_intercept = -std::numeric_limits<double>::infinity();
  Geometry g;
  g.antennas = {WallPoint{0.0, 0.0}, WallPoint{4.0, 1.0}};
  g.devices = {RoomPoint{1.0, 2.0, 2.0}};
  Rng rng(8);
  const int draws = 100000;
  double s0 = 0.0, s1 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto ch = generate_channel(rng, g, f);
    s0 += std::norm(ch.h(0, 0));
    s1 += std::norm(ch.h(0, 1));
  }
  CHECK(std::abs(s0 / draws / std::pow(g.distance(0, 0), -3.7) - 1.0) <= 0.03);
  CHECK(std::abs(s1 / draws / std::pow(g.distance(1, 0), -3.7) - 1.0) <= 0.03);
}

TEST_CASE("channel realization shape and determinism") {
  const SystemConfig cfg = default_config();
  Rng scene(10);
  const Geometry g = place_scene(scene, cfg);
  const FadingParams f = FadingParams::from_config(cfg);
  Rng a(11), b(11);
  const auto ca = generate_channel(a, g, f);
  const auto cb = generate_channel(b, g, f);
  CHECK(ca.devices() == 10);
  CHECK(ca.antennas() == 128);
  CHECK(ca.h.all_finite());
  for (double d : ca.distance_m) CHECK(d > 0.0);
  bool same = true;
  for (std::size_t i = 0; i < ca.h.data().size(); ++i) same = same && ca.h.data()[i] == cb.h.data()[i];
  CHECK(same);
}
