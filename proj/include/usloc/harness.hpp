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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "usloc/channel.hpp"
#include "usloc/config.hpp"
#include "usloc/ranging.hpp"

namespace usloc {

struct TrialRecord {
  std::size_t trial_id = 0;
  double snr_db = 0.0;
  Point3d truth = Point3d::Zero();
  Point3d estimate = Point3d::Zero();
  double err_x = 0.0;
  double err_y = 0.0;
  double err_z = 0.0;
  double err_xy = 0.0;
  double err_3d = 0.0;
  std::array<double, kNumBeacons> range_errors{};  // estimated - true distance, m
  bool ok = true;
  std::string error;  // set when ok is false
};

/// Per-beacon ranging outcome of one burst.
struct RangingDiagnostics {
  std::array<double, kNumBeacons> true_distance{};
  std::array<Eigen::Index, kNumBeacons> true_lag{};  // direct-path delay rounded to the sample grid
  std::array<RangeEstimate, kNumBeacons> estimate{};
};

/// Deterministic seed for trial `index` under `master`.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

/// Uniform random point of the (continuous) drone domain box.
Point3d random_domain_point(const DroneDomain& domain, std::mt19937_64& rng);

/// Receiver position used by Monte Carlo trial `seed` (a trial_seed value).
Point3d trial_position(const DroneDomain& domain, std::uint64_t seed);

// Transmit bursts, codes and matched filters for one configuration and beacon
// layout, built once and shared by every trial. All methods are const and
// safe to call from several threads.
class FixSimulator {
 public:
  FixSimulator(SimConfig config, BeaconLayout layout);

  const SimConfig& config() const { return config_; }
  const BeaconLayout& layout() const { return layout_; }
  const HopPlan& hop_plan() const { return plan_; }
  const WaveformConfig& waveform(std::size_t beacon) const { return waveforms_[beacon]; }
  const Eigen::VectorXi& code(std::size_t beacon) const { return codes_[beacon]; }
  const SampledSignal& tx_signal(std::size_t beacon) const { return tx_[beacon]; }

  /// Channel realisation for a receiver position: taps drawn from `seed` when multipath is on.
  ChannelModel channel_for(const Scene& scene, double snr_db, std::uint64_t seed) const;
  SampledSignal receive(const Scene& scene, const ChannelModel& model) const;
  RangingDiagnostics measure_ranges(const Point3d& truth, double snr_db, std::uint64_t seed) const;

  // Full fix: bursts -> channel -> four range estimates -> trilateration ->
  // optional ceiling-echo fusion. Module errors produce a record with ok = false.
  TrialRecord run(const Point3d& truth, double snr_db, std::uint64_t seed, std::size_t trial_id = 0) const;

 private:
  SimConfig config_;
  BeaconLayout layout_;
  HopPlan plan_;
  std::array<WaveformConfig, kNumBeacons> waveforms_;
  std::array<Eigen::VectorXi, kNumBeacons> codes_;
  std::array<SampledSignal, kNumBeacons> tx_;
  std::vector<std::unique_ptr<MatchedFilter>> filters_;
};

TrialRecord run_fix(const SimConfig& config, const BeaconLayout& layout, const Point3d& truth, std::uint64_t seed);

/// Runs `count` trials in a worker pool; trial i uses trial_seed(master, i) and
/// a random domain position. Results are ordered by trial id.
std::vector<TrialRecord> run_trials(const FixSimulator& sim, double snr_db, std::size_t count, std::uint64_t master_seed);

struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;
};

struct SnrRow {
  double snr_db = 0.0;
  std::size_t trials = 0;
  std::size_t failed = 0;
  ErrorStats err_x, err_y, err_z, err_xy, err_3d;
};

SnrRow summarize(double snr_db, const std::vector<TrialRecord>& records);

// One row per SNR. Trial i reuses the same position and seed at every SNR so
// the points are directly comparable. `all_records` collects every trial when given.
std::vector<SnrRow> sweep_snr(const FixSimulator& sim, const std::vector<double>& snr_list, std::size_t trials_per_point,
                              std::uint64_t master_seed, std::vector<TrialRecord>* all_records = nullptr);

struct Trajectory {
  std::vector<Point3d> waypoints;
  double fix_spacing = 0.25;

  /// Points every fix_spacing along the polyline, including every waypoint.
  std::vector<Point3d> fixes() const;
  void validate(const DroneDomain& domain) const;
};

Trajectory random_trajectory(const DroneDomain& domain, int num_waypoints, double fix_spacing, std::uint64_t seed);
Trajectory straight_line(const Point3d& from, const Point3d& to, double fix_spacing);

struct TrajectoryResult {
  std::vector<TrialRecord> records;
  std::size_t failed = 0;
  double mean_err_z = 0.0;
  double mean_err_3d = 0.0;
};

TrajectoryResult run_trajectory(const FixSimulator& sim, const Trajectory& trajectory, double snr_db,
                                std::uint64_t master_seed);

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records);
void write_sweep_csv(std::ostream& out, const std::vector<SnrRow>& rows);

/// Compact fixed-precision formatting shared by every CSV writer.
std::string format_number(double v);

}  // namespace usloc
