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

#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "usloc/geometry.hpp"
#include "usloc/waveform.hpp"

namespace usloc {

struct MultipathTap {
  double delay = 0.0;  // absolute delay tau_ij in seconds, after the direct path
  double gain = 0.0;   // alpha_ij, |gain| < 1
};

struct ChannelModel {
  std::vector<std::vector<MultipathTap>> taps_per_beacon;  // empty or one list per beacon
  double snr_db = std::numeric_limits<double>::infinity();  // +inf disables noise
  double speed_of_sound = 343.0;
  std::uint64_t rng_seed = 0;
  double max_doppler = 0.0;             // Hz, applied to reflected taps only
  bool distance_attenuation = false;    // direct gain 1/d (d >= 1 m) when set
};

/// Statistics for drawing Rayleigh multipath taps.
struct MultipathProfile {
  int taps = 5;
  double min_excess_delay = 3e-3;   // s
  double max_excess_delay = 12e-3;  // s
  double first_tap_db = -6.0;       // mean power at min_excess_delay relative to the direct path
  double decay_time = 3e-3;         // s, e-folding time of the mean tap power

  void validate() const;
};

struct Scene {
  Point3d room = default_room();
  BeaconLayout beacons = original_layout();
  Point3d receiver{2.5, 2.5, 1.5};

  // Beacons may sit on walls or ceiling; the receiver must be strictly inside.
  void validate() const;
  double distance(std::size_t beacon) const { return (beacons[beacon] - receiver).norm(); }
};

double direct_delay(const Scene& scene, std::size_t beacon_index, double speed_of_sound);

// Draws taps for every beacon: excess delays uniform on [min, max], sorted,
// real gains with Rayleigh magnitude, random sign and exponentially decaying
// mean power. Magnitudes are redrawn until below 1.
std::vector<std::vector<MultipathTap>> draw_multipath(const Scene& scene, double speed_of_sound,
                                                      const MultipathProfile& profile, std::mt19937_64& rng);

/// Delay-and-sum of the beacon bursts through direct paths and taps, plus AWGN.
/// Output length is the input length plus the largest delay in samples.
SampledSignal apply_channel(std::span<const SampledSignal> tx_signals, const Scene& scene, const ChannelModel& model);

/// Mean power of `x` between its first and last nonzero sample.
double active_power(const Eigen::VectorXd& x);

}  // namespace usloc
