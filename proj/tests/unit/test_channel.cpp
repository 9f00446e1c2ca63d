// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The usloc Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "usloc/channel.hpp"
#include "usloc/errors.hpp"

using namespace usloc;

namespace {

constexpr double kFs = 340e3;
constexpr double kC = 343.0;

SampledSignal noise_burst(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SampledSignal s{Eigen::VectorXd(n), kFs};
  for (Eigen::Index i = 0; i < n; ++i) s.samples[i] = g(rng);
  return s;
}

std::array<SampledSignal, 4> four_bursts(Eigen::Index n, std::uint64_t seed) {
  return {noise_burst(n, seed), noise_burst(n, seed + 1), noise_burst(n, seed + 2), noise_burst(n, seed + 3)};
}

Eigen::Index lag_of(const Scene& scene, std::size_t b) { return std::llround(scene.distance(b) / kC * kFs); }

}  // namespace

TEST_CASE("direct_delay examples") {
  Scene scene;
  scene.beacons = make_layout({0, 0, 0}, {5, 0, 0}, {0, 5, 0}, {0, 0, 4});
  scene.receiver = {0, 0, 3.43};
  CHECK(direct_delay(scene, 0, kC) == doctest::Approx(0.01).epsilon(1e-12));

  Scene centred;
  centred.receiver = {2.5, 2.5, 1.5};
  CHECK(direct_delay(centred, 0, kC) == doctest::Approx(2.5 / 343.0).epsilon(1e-12));
  CHECK(direct_delay(centred, 0, kC) * 1e3 == doctest::Approx(7.289).epsilon(1e-4));

  scene.receiver = {1e-6, 0, 0};
  CHECK(direct_delay(scene, 0, kC) == doctest::Approx(1e-6 / kC));
  CHECK_THROWS_AS(direct_delay(centred, 4, kC), InvalidArgument);
  CHECK_THROWS_AS(direct_delay(centred, 0, 0.0), InvalidArgument);
}

TEST_CASE("single beacon pure delay of 500 samples") {
  Scene scene;
  scene.beacons = make_layout({0.1, 0.1, 0.1}, {4.9, 0.1, 0.1}, {0.1, 4.9, 0.1}, {0.1, 0.1, 3.9});
  const double d = 500.0 / kFs * kC;
  scene.receiver = {0.1 + d, 0.1, 0.1};

  auto tx = four_bursts(2000, 5);
  for (std::size_t b = 1; b < 4; ++b) tx[b].samples.setZero();
  ChannelModel model;
  const auto rx = apply_channel(tx, scene, model);
  CHECK(rx.samples.head(500).isZero(0.0));
  CHECK(rx.samples.segment(500, 2000) == tx[0].samples);
  CHECK(rx.samples.tail(rx.size() - 2500).isZero(0.0));
}

TEST_CASE("AWGN power matches the requested SNR") {
  Scene scene;
  auto tx = four_bursts(200000, 9);
  ChannelModel clean_model;
  ChannelModel noisy = clean_model;
  noisy.snr_db = 10.0;
  noisy.rng_seed = 77;
  const auto clean = apply_channel(tx, scene, clean_model);
  const auto noisy_rx = apply_channel(tx, scene, noisy);
  const double noise_power = (noisy_rx.samples - clean.samples).squaredNorm() / static_cast<double>(clean.size());
  CHECK(noise_power == doctest::Approx(active_power(clean.samples) / 10.0).epsilon(0.05));
}

TEST_CASE("a 3 ms tap on a 2 ms symbol lands after the direct symbol") {
  Scene scene;
  scene.receiver = {2.5, 2.5, 1.5};
  auto tx = four_bursts(680, 1);
  for (std::size_t b = 1; b < 4; ++b) tx[b].samples.setZero();

  ChannelModel direct_only;
  ChannelModel with_tap;
  with_tap.taps_per_beacon.assign(4, {});
  with_tap.taps_per_beacon[0] = {{direct_delay(scene, 0, kC) + 3e-3, 0.5}};

  const auto a = apply_channel(tx, scene, direct_only);
  const auto b = apply_channel(tx, scene, with_tap);
  REQUIRE(b.size() >= a.size());
  Eigen::VectorXd diff = b.samples;
  diff.head(a.size()) -= a.samples;

  const Eigen::Index direct_end = lag_of(scene, 0) + 680;
  CHECK(diff.head(direct_end).isZero(0.0));
  const Eigen::Index tap_start = std::llround((direct_delay(scene, 0, kC) + 3e-3) * kFs);
  CHECK(diff.segment(tap_start, 680) == 0.5 * tx[0].samples);
  CHECK(diff.squaredNorm() == doctest::Approx(0.25 * tx[0].energy()));
}

TEST_CASE("channel is linear without noise") {
  Scene scene;
  scene.receiver = {1.2, 3.1, 2.2};
  std::mt19937_64 rng(4);
  ChannelModel model;
  model.taps_per_beacon = draw_multipath(scene, kC, MultipathProfile{}, rng);
  auto a = four_bursts(3000, 10);
  auto b = four_bursts(3000, 20);
  std::array<SampledSignal, 4> sum;
  for (std::size_t i = 0; i < 4; ++i) sum[i] = SampledSignal{a[i].samples + b[i].samples, kFs};
  const auto ra = apply_channel(a, scene, model);
  const auto rb = apply_channel(b, scene, model);
  const auto rs = apply_channel(sum, scene, model);
  CHECK((rs.samples - ra.samples - rb.samples).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("channel output is deterministic in the seed") {
  Scene scene;
  ChannelModel model;
  model.snr_db = 5.0;
  model.rng_seed = 123;
  model.max_doppler = 3.0;
  std::mt19937_64 rng(8);
  model.taps_per_beacon = draw_multipath(scene, kC, MultipathProfile{}, rng);
  const auto tx = four_bursts(1500, 3);
  CHECK(apply_channel(tx, scene, model).samples == apply_channel(tx, scene, model).samples);
  ChannelModel other = model;
  other.rng_seed = 124;
  CHECK(apply_channel(tx, scene, model).samples != apply_channel(tx, scene, other).samples);
}

TEST_CASE("energy is preserved without taps or noise") {
  Scene scene;
  scene.receiver = {3.3, 0.7, 2.9};
  const auto tx = four_bursts(32 * 680, 2);
  double in = 0.0;
  for (const auto& s : tx) in += s.energy();
  // Bursts overlap in time, so compare beacon by beacon.
  double out = 0.0;
  for (std::size_t b = 0; b < 4; ++b) {
    auto one = tx;
    for (std::size_t k = 0; k < 4; ++k)
      if (k != b) one[k].samples.setZero();
    out += apply_channel(one, scene, ChannelModel{}).energy();
  }
  CHECK(out == doctest::Approx(in).epsilon(1e-12));
}

TEST_CASE("distance attenuation scales the direct path by 1/d") {
  Scene scene;
  scene.receiver = {2.5, 2.5, 1.5};  // 2.5 m from beacon 0
  auto tx = four_bursts(1000, 6);
  for (std::size_t b = 1; b < 4; ++b) tx[b].samples.setZero();
  ChannelModel model;
  model.distance_attenuation = true;
  const auto rx = apply_channel(tx, scene, model);
  CHECK((rx.samples.segment(lag_of(scene, 0), 1000) - tx[0].samples / 2.5).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("draw_multipath respects the profile") {
  Scene scene;
  scene.receiver = {1.0, 4.0, 2.0};
  std::mt19937_64 rng(99);
  const MultipathProfile profile;
  for (int rep = 0; rep < 50; ++rep) {
    const auto taps = draw_multipath(scene, kC, profile, rng);
    REQUIRE(taps.size() == 4);
    for (std::size_t b = 0; b < 4; ++b) {
      REQUIRE(taps[b].size() == 5);
      const double direct = direct_delay(scene, b, kC);
      for (std::size_t j = 0; j < taps[b].size(); ++j) {
        CHECK(taps[b][j].delay >= direct + 3e-3);
        CHECK(taps[b][j].delay <= direct + 12e-3);
        CHECK(std::abs(taps[b][j].gain) < 1.0);
        if (j > 0) CHECK(taps[b][j].delay >= taps[b][j - 1].delay);
      }
    }
  }
}

TEST_CASE("tap power follows a truncated Rayleigh law at the first-tap level") {
  Scene scene;
  MultipathProfile profile;
  profile.taps = 1;
  profile.min_excess_delay = profile.max_excess_delay = 3e-3;
  std::mt19937_64 rng(5);
  double sum = 0.0, sum_sign = 0.0;
  int n = 0;
  for (int rep = 0; rep < 20000; ++rep)
    for (const auto& list : draw_multipath(scene, kC, profile, rng)) {
      sum += list[0].gain * list[0].gain;
      sum_sign += list[0].gain > 0 ? 1.0 : -1.0;
      ++n;
    }
  // Exponential power with mean m = 10^-0.6, conditioned below 1.
  const double m = std::pow(10.0, -0.6);
  const double tail = std::exp(-1.0 / m);
  const double expected = m - tail / (1.0 - tail);
  CHECK(sum / n == doctest::Approx(expected).epsilon(0.02));
  CHECK(std::abs(sum_sign / n) < 0.02);
}

TEST_CASE("channel error paths") {
  Scene scene;
  auto tx = four_bursts(100, 1);
  SUBCASE("mismatched rates") {
    tx[2].sample_rate = 44100.0;
    CHECK_THROWS_AS(apply_channel(tx, scene, ChannelModel{}), InvalidArgument);
  }
  SUBCASE("tap before the direct path") {
    ChannelModel m;
    m.taps_per_beacon.assign(4, {});
    m.taps_per_beacon[1] = {{direct_delay(scene, 1, kC), 0.3}};
    CHECK_THROWS_AS(apply_channel(tx, scene, m), InvalidArgument);
  }
  SUBCASE("tap gain not below 1") {
    ChannelModel m;
    m.taps_per_beacon.assign(4, {});
    m.taps_per_beacon[1] = {{direct_delay(scene, 1, kC) + 1e-3, -1.0}};
    CHECK_THROWS_AS(apply_channel(tx, scene, m), InvalidArgument);
  }
  SUBCASE("receiver on the wall") {
    scene.receiver = {0.0, 2.0, 2.0};
    CHECK_THROWS_AS(apply_channel(tx, scene, ChannelModel{}), InvalidArgument);
  }
  SUBCASE("beacon outside the room") {
    scene.beacons = make_layout({2.5, -0.1, 1.5}, {5, 2.5, 2.5}, {2.5, 5, 2}, {0, 5, 3});
    CHECK_THROWS_AS(apply_channel(tx, scene, ChannelModel{}), InvalidArgument);
  }
  SUBCASE("bad profile") {
    MultipathProfile p;
    p.max_excess_delay = 1e-3;
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(draw_multipath(scene, kC, p, rng), InvalidArgument);
  }
}
