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

#include "usloc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace usloc {

namespace {

Eigen::Index delay_samples(double delay, double fs) { return static_cast<Eigen::Index>(std::llround(delay * fs)); }

}  // namespace

void MultipathProfile::validate() const {
  if (taps < 0) throw InvalidArgument("tap count must be non-negative");
  if (!(min_excess_delay > 0.0) || max_excess_delay < min_excess_delay)
    throw InvalidArgument("excess delay range must satisfy 0 < min <= max");
  if (!(decay_time > 0.0)) throw InvalidArgument("tap decay time must be positive");
  if (first_tap_db >= 0.0) throw InvalidArgument("first tap must be weaker than the direct path");
}

void Scene::validate() const {
  if (!(room.array() > 0.0).all()) throw InvalidArgument("room dimensions must be positive");
  beacons.validate();
  for (std::size_t i = 0; i < kNumBeacons; ++i)
    if (!inside_or_on<double>(beacons[i], room))
      throw InvalidArgument("beacon " + std::to_string(i) + " lies outside the room");
  if (!strictly_inside<double>(receiver, room)) throw InvalidArgument("receiver must be strictly inside the room");
}

double direct_delay(const Scene& scene, std::size_t beacon_index, double speed_of_sound) {
  if (beacon_index >= kNumBeacons) throw InvalidArgument("beacon index out of range");
  if (!(speed_of_sound > 0.0)) throw InvalidArgument("speed of sound must be positive");
  return scene.distance(beacon_index) / speed_of_sound;
}

std::vector<std::vector<MultipathTap>> draw_multipath(const Scene& scene, double speed_of_sound,
                                                      const MultipathProfile& profile, std::mt19937_64& rng) {
  profile.validate();
  std::uniform_real_distribution<double> excess(profile.min_excess_delay, profile.max_excess_delay);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution sign(0.5);
  const double first_power = std::pow(10.0, profile.first_tap_db / 10.0);

  std::vector<std::vector<MultipathTap>> out(kNumBeacons);
  for (std::size_t b = 0; b < kNumBeacons; ++b) {
    const double direct = direct_delay(scene, b, speed_of_sound);
    std::vector<double> ex(static_cast<std::size_t>(profile.taps));
    for (auto& e : ex) e = excess(rng);
    std::sort(ex.begin(), ex.end());
    for (double e : ex) {
      const double mean_power = first_power * std::exp(-(e - profile.min_excess_delay) / profile.decay_time);
      // Rayleigh magnitude with E[|a|^2] = mean_power via inverse CDF.
      double mag = 1.0;
      while (mag >= 1.0) mag = std::sqrt(-mean_power * std::log(1.0 - unit(rng)));
      out[b].push_back({direct + e, sign(rng) ? mag : -mag});
    }
  }
  return out;
}

double active_power(const Eigen::VectorXd& x) {
  Eigen::Index first = -1;
  Eigen::Index last = -1;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return 0.0;
  return x.segment(first, last - first + 1).squaredNorm() / static_cast<double>(last - first + 1);
}

SampledSignal apply_channel(std::span<const SampledSignal> tx_signals, const Scene& scene, const ChannelModel& model) {
  if (tx_signals.size() != kNumBeacons) throw InvalidArgument("expected one transmit signal per beacon");
  scene.validate();
  if (!(model.speed_of_sound > 0.0)) throw InvalidArgument("speed of sound must be positive");
  if (!model.taps_per_beacon.empty() && model.taps_per_beacon.size() != kNumBeacons)
    throw InvalidArgument("taps must be given for every beacon or none");

  const double fs = tx_signals[0].sample_rate;
  for (const auto& s : tx_signals) {
    s.validate();
    if (s.sample_rate != fs) throw InvalidArgument("transmit signals have mismatched sample rates");
  }

  Eigen::Index max_delay = 0;
  Eigen::Index max_len = 0;
  for (std::size_t b = 0; b < kNumBeacons; ++b) {
    const double direct = direct_delay(scene, b, model.speed_of_sound);
    max_delay = std::max(max_delay, delay_samples(direct, fs));
    if (!model.taps_per_beacon.empty()) {
      for (const auto& tap : model.taps_per_beacon[b]) {
        if (!(tap.delay > direct)) throw InvalidArgument("tap delay must exceed the direct-path delay");
        if (!(std::abs(tap.gain) < 1.0)) throw InvalidArgument("tap gain magnitude must be below 1");
        max_delay = std::max(max_delay, delay_samples(tap.delay, fs));
      }
    }
    max_len = std::max(max_len, tx_signals[b].size());
  }

  std::mt19937_64 rng(model.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;

  Eigen::VectorXd clean = Eigen::VectorXd::Zero(max_len + max_delay);
  for (std::size_t b = 0; b < kNumBeacons; ++b) {
    const auto& s = tx_signals[b].samples;
    const double dist = scene.distance(b);
    const double direct_gain = model.distance_attenuation ? 1.0 / std::max(dist, 1.0) : 1.0;
    clean.segment(delay_samples(dist / model.speed_of_sound, fs), s.size()) += direct_gain * s;

    if (model.taps_per_beacon.empty()) continue;
    for (const auto& tap : model.taps_per_beacon[b]) {
      const Eigen::Index shift = delay_samples(tap.delay, fs);
      if (model.max_doppler > 0.0) {
        // Sum-of-sinusoids stand-in for a slowly fading reflected path.
        const double fd = model.max_doppler * std::cos(two_pi * unit(rng));
        const double theta = two_pi * unit(rng);
        for (Eigen::Index n = 0; n < s.size(); ++n)
          clean[shift + n] += tap.gain * std::cos(two_pi * fd * static_cast<double>(n) / fs + theta) * s[n];
      } else {
        clean.segment(shift, s.size()) += tap.gain * s;
      }
    }
  }

  SampledSignal out{std::move(clean), fs};
  if (std::isfinite(model.snr_db)) {
    const double noise_power = active_power(out.samples) / std::pow(10.0, model.snr_db / 10.0);
    std::normal_distribution<double> noise(0.0, std::sqrt(noise_power));
    for (Eigen::Index n = 0; n < out.samples.size(); ++n) out.samples[n] += noise(rng);
  }
  return out;
}

}  // namespace usloc
