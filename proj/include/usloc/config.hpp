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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "usloc/channel.hpp"
#include "usloc/dop.hpp"
#include "usloc/fusion.hpp"
#include "usloc/geometry.hpp"
#include "usloc/placement.hpp"
#include "usloc/waveform.hpp"

namespace usloc {

struct SceneSettings {
  Point3d room = default_room();
  BeaconLayout beacons = original_layout();  // used when run.layout == "file"
};

struct WaveformSettings {
  double sample_rate = 340e3;
  double symbol_duration = 2e-3;
  std::vector<double> channels = default_channel_centers();
  double channel_bandwidth = 5e3;
  int walsh_order = 4;
  int burst_bits = 32;
  double phase = 0.0;
  std::uint64_t code_seed = 7;  // hop sequence and burst data, shared by both ends
  int hop_reuse_gap = 0;        // a channel is not revisited within this many symbols
};

struct ChannelSettings {
  double speed_of_sound = 343.0;
  double snr_db = 20.0;
  bool multipath = true;
  MultipathProfile profile;
  bool distance_attenuation = false;
  double max_doppler = 0.0;
};

struct FusionSettings {
  bool enabled = false;
  FusionWeights weights;
  bool auto_weights = false;
  double echo_noise_std = 10e-6;  // s
  double outlier_probability = 0.0;
};

struct PlacementSettings {
  DroneDomain drone_domain;
  double beacon_resolution = 0.25;
  double hdop_tolerance = 2.0;
  double vdop_tolerance = 2.0;
  int population = 50;
  int parents = 40;
  int offspring = 20;
  int iterations = 100;
  int max_restarts = 10;
  double min_separation = 0.5;
  bool mutation = false;
  double mutation_rate = 0.05;

  PlacementProblem problem(const Point3d& room, std::uint64_t seed) const;
};

struct RunSettings {
  std::uint64_t seed = 1;
  int trials = 200;
  std::vector<double> snr_list{0.0, 5.0, 10.0, 15.0, 20.0};
  std::string layout = "original";  // original | optimized | file
  int trajectories = 7;
  int trajectory_waypoints = 5;
  double fix_spacing = 0.25;
  std::vector<Point3d> waypoints;  // explicit trajectory; overrides the random generator
};

struct SimConfig {
  SceneSettings scene;
  WaveformSettings waveform;
  ChannelSettings channel;
  FusionSettings fusion;
  PlacementSettings placement;
  RunSettings run;

  // Key -> line it was read from, for error messages after parsing.
  std::map<std::string, int> key_lines;

  /// Cross-field checks; throws ConfigError naming the offending line when known.
  void validate() const;
};

SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

/// "original", "optimized" or "file" (the [scene] beacons).
BeaconLayout resolve_layout(const SimConfig& config, std::string_view name);

}  // namespace usloc
