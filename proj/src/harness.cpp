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

#include "usloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "usloc/fusion.hpp"
#include "usloc/solver.hpp"

namespace usloc {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent sub-streams of one trial seed.
enum class Stream : std::uint64_t { position = 1, taps = 2, noise = 3, echo = 4 };

std::uint64_t substream(std::uint64_t seed, Stream s) { return splitmix(seed ^ splitmix(static_cast<std::uint64_t>(s))); }

ErrorStats stats(const std::vector<double>& v) {
  ErrorStats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(acc / static_cast<double>(v.size() - 1));
  }
  return s;
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) { return splitmix(splitmix(master) ^ index); }

Point3d random_domain_point(const DroneDomain& domain, std::mt19937_64& rng) {
  Point3d p;
  for (int c = 0; c < 3; ++c) p(c) = std::uniform_real_distribution<double>(domain.lower(c), domain.upper(c))(rng);
  return p;
}

Point3d trial_position(const DroneDomain& domain, std::uint64_t seed) {
  std::mt19937_64 rng(substream(seed, Stream::position));
  return random_domain_point(domain, rng);
}

FixSimulator::FixSimulator(SimConfig config, BeaconLayout layout) : config_(std::move(config)), layout_(layout) {
  config_.validate();
  layout_.validate();
  const auto& w = config_.waveform;
  const auto bits = static_cast<std::size_t>(w.burst_bits);

  plan_.center_frequencies = w.channels;
  plan_.channel_bandwidth = w.channel_bandwidth;
  plan_.hop_sequence = make_hop_sequence(static_cast<int>(w.channels.size()), bits, w.code_seed, w.hop_reuse_gap);
  plan_.carrier_phase = w.phase;

  const WalshMatrix walsh = walsh_hadamard(w.walsh_order);
  const Eigen::Index longest_delay = static_cast<Eigen::Index>(
      std::ceil((config_.scene.room.norm() / config_.channel.speed_of_sound + config_.channel.profile.max_excess_delay) *
                w.sample_rate)) + 2;

  for (std::size_t b = 0; b < kNumBeacons; ++b) {
    waveforms_[b].sample_rate = w.sample_rate;
    waveforms_[b].symbol_duration = w.symbol_duration;
    waveforms_[b].code_row_index = static_cast<int>(b);
    waveforms_[b].data_bits = make_data_bits(bits, splitmix(w.code_seed + 101 * (b + 1)));
    codes_[b] = walsh.row(static_cast<int>(b));
    tx_[b] = generate_tx_signal(waveforms_[b], plan_, codes_[b]);
  }
  Eigen::Index fft = next_fast_size(tx_[0].size() + longest_delay);
  if (fft % 2 != 0) fft = next_fast_size(fft + 1);
  for (std::size_t b = 0; b < kNumBeacons; ++b) filters_.push_back(std::make_unique<MatchedFilter>(tx_[b], fft));
}

ChannelModel FixSimulator::channel_for(const Scene& scene, double snr_db, std::uint64_t seed) const {
  ChannelModel model;
  model.snr_db = snr_db;
  model.speed_of_sound = config_.channel.speed_of_sound;
  model.max_doppler = config_.channel.max_doppler;
  model.distance_attenuation = config_.channel.distance_attenuation;
  model.rng_seed = substream(seed, Stream::noise);
  if (config_.channel.multipath && config_.channel.profile.taps > 0) {
    std::mt19937_64 rng(substream(seed, Stream::taps));
    model.taps_per_beacon = draw_multipath(scene, model.speed_of_sound, config_.channel.profile, rng);
  }
  return model;
}

SampledSignal FixSimulator::receive(const Scene& scene, const ChannelModel& model) const {
  return apply_channel(tx_, scene, model);
}

RangingDiagnostics FixSimulator::measure_ranges(const Point3d& truth, double snr_db, std::uint64_t seed) const {
  Scene scene{config_.scene.room, layout_, truth};
  scene.validate();
  const double c = config_.channel.speed_of_sound;
  const double fs = config_.waveform.sample_rate;
  const SampledSignal rx = receive(scene, channel_for(scene, snr_db, seed));

  RangingDiagnostics diag;
  for (std::size_t b = 0; b < kNumBeacons; ++b) {
    diag.true_distance[b] = scene.distance(b);
    diag.true_lag[b] = static_cast<Eigen::Index>(std::llround(scene.distance(b) / c * fs));
    const Eigen::VectorXd corr = rx.size() <= filters_[b]->fft_size() ? filters_[b]->correlate(rx)
                                                                      : cross_correlate(rx, tx_[b]);
    diag.estimate[b] = pick_peak(corr, b, fs, c);
  }
  return diag;
}

TrialRecord FixSimulator::run(const Point3d& truth, double snr_db, std::uint64_t seed, std::size_t trial_id) const {
  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.snr_db = snr_db;
  rec.truth = truth;
  try {
    const RangingDiagnostics diag = measure_ranges(truth, snr_db, seed);
    Eigen::Vector4d ranges;
    for (std::size_t b = 0; b < kNumBeacons; ++b) {
      ranges(static_cast<Eigen::Index>(b)) = diag.estimate[b].distance;
      rec.range_errors[b] = diag.estimate[b].distance - diag.true_distance[b];
    }
    rec.estimate = trilaterate(layout_, ranges).position;

    const auto& fusion = config_.fusion;
    if (fusion.enabled) {
      std::mt19937_64 rng(substream(seed, Stream::echo));
      const double c = config_.channel.speed_of_sound;
      const auto echo = simulate_ceiling_echo(truth.z(), config_.scene.room.z(), c, fusion.echo_noise_std, rng,
                                              fusion.outlier_probability);
      FusionWeights weights = fusion.weights;
      if (fusion.auto_weights) {
        // Stage-one z variance: sample-grid quantisation through the local VDOP.
        const double sigma_r = c / config_.waveform.sample_rate / std::sqrt(12.0);
        double vdop = 1.0;
        try {
          vdop = dop_at(layout_, rec.estimate).vdop;
        } catch (const std::exception&) {
        }
        const double sigma_h = std::max(c * fusion.echo_noise_std / 2.0, 1e-9);
        weights = FusionWeights::inverse_variance(std::pow(sigma_r * vdop, 2), sigma_h * sigma_h);
      }
      rec.estimate.z() = fuse_height(rec.estimate.z(), echo.derived_height, weights);
    }

    const Point3d err = rec.estimate - truth;
    if (!err.allFinite()) throw SingularGeometry("non-finite position estimate");
    rec.err_x = std::abs(err.x());
    rec.err_y = std::abs(err.y());
    rec.err_z = std::abs(err.z());
    rec.err_xy = std::hypot(err.x(), err.y());
    rec.err_3d = err.norm();
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

TrialRecord run_fix(const SimConfig& config, const BeaconLayout& layout, const Point3d& truth, std::uint64_t seed) {
  return FixSimulator(config, layout).run(truth, config.channel.snr_db, seed);
}

std::vector<TrialRecord> run_trials(const FixSimulator& sim, double snr_db, std::size_t count, std::uint64_t master_seed) {
  std::vector<TrialRecord> out(count);
  parallel_for(count, [&](std::size_t i) {
    const std::uint64_t seed = trial_seed(master_seed, i);
    out[i] = sim.run(trial_position(sim.config().placement.drone_domain, seed), snr_db, seed, i);
  });
  return out;
}

SnrRow summarize(double snr_db, const std::vector<TrialRecord>& records) {
  SnrRow row;
  row.snr_db = snr_db;
  row.trials = records.size();
  std::vector<double> ex, ey, ez, exy, e3;
  for (const auto& r : records) {
    if (!r.ok) {
      ++row.failed;
      continue;
    }
    ex.push_back(r.err_x);
    ey.push_back(r.err_y);
    ez.push_back(r.err_z);
    exy.push_back(r.err_xy);
    e3.push_back(r.err_3d);
  }
  row.err_x = stats(ex);
  row.err_y = stats(ey);
  row.err_z = stats(ez);
  row.err_xy = stats(exy);
  row.err_3d = stats(e3);
  return row;
}

std::vector<SnrRow> sweep_snr(const FixSimulator& sim, const std::vector<double>& snr_list, std::size_t trials_per_point,
                              std::uint64_t master_seed, std::vector<TrialRecord>* all_records) {
  std::vector<SnrRow> rows;
  for (double snr : snr_list) {
    auto records = run_trials(sim, snr, trials_per_point, master_seed);
    rows.push_back(summarize(snr, records));
    if (all_records) all_records->insert(all_records->end(), records.begin(), records.end());
  }
  return rows;
}

std::vector<Point3d> Trajectory::fixes() const {
  std::vector<Point3d> out;
  if (waypoints.empty()) return out;
  out.push_back(waypoints.front());
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Point3d a = waypoints[i - 1];
    const Point3d b = waypoints[i];
    const double len = (b - a).norm();
    const auto steps = static_cast<int>(std::floor(len / fix_spacing));
    for (int k = 1; k <= steps; ++k) {
      const double t = k * fix_spacing / len;
      if (t < 1.0 - 1e-9) out.push_back(a + t * (b - a));
    }
    if (len > 0.0) out.push_back(b);
  }
  return out;
}

void Trajectory::validate(const DroneDomain& domain) const {
  if (waypoints.empty()) throw InvalidArgument("trajectory has no waypoints");
  if (!(fix_spacing > 0.0)) throw InvalidArgument("fix spacing must be positive");
  for (const auto& p : waypoints)
    if ((p.array() < domain.lower.array() - 1e-12).any() || (p.array() > domain.upper.array() + 1e-12).any())
      throw InvalidArgument("trajectory waypoint outside the drone domain");
}

Trajectory random_trajectory(const DroneDomain& domain, int num_waypoints, double fix_spacing, std::uint64_t seed) {
  if (num_waypoints < 1) throw InvalidArgument("need at least one waypoint");
  std::mt19937_64 rng(seed);
  Trajectory t;
  t.fix_spacing = fix_spacing;
  for (int i = 0; i < num_waypoints; ++i) t.waypoints.push_back(random_domain_point(domain, rng));
  return t;
}

Trajectory straight_line(const Point3d& from, const Point3d& to, double fix_spacing) {
  return Trajectory{{from, to}, fix_spacing};
}

TrajectoryResult run_trajectory(const FixSimulator& sim, const Trajectory& trajectory, double snr_db,
                                std::uint64_t master_seed) {
  trajectory.validate(sim.config().placement.drone_domain);
  const auto points = trajectory.fixes();
  TrajectoryResult result;
  result.records.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    result.records[i] = sim.run(points[i], snr_db, trial_seed(master_seed, i), i);
  });
  std::size_t ok = 0;
  for (const auto& r : result.records) {
    if (!r.ok) {
      ++result.failed;
      continue;
    }
    result.mean_err_z += r.err_z;
    result.mean_err_3d += r.err_3d;
    ++ok;
  }
  if (ok > 0) {
    result.mean_err_z /= static_cast<double>(ok);
    result.mean_err_3d /= static_cast<double>(ok);
  }
  return result;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "trial_id,snr_db,true_x,true_y,true_z,est_x,est_y,est_z,err_x,err_y,err_z,err_xy,err_3d,"
         "range_err_0,range_err_1,range_err_2,range_err_3,ok,error\n";
  for (const auto& r : records) {
    out << r.trial_id << ',' << format_number(r.snr_db);
    for (int c = 0; c < 3; ++c) out << ',' << format_number(r.truth(c));
    for (int c = 0; c < 3; ++c) out << ',' << format_number(r.estimate(c));
    for (double e : {r.err_x, r.err_y, r.err_z, r.err_xy, r.err_3d}) out << ',' << format_number(e);
    for (double e : r.range_errors) out << ',' << format_number(e);
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    out << ',' << (r.ok ? 1 : 0) << ',' << msg << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SnrRow>& rows) {
  out << "snr_db,trials,failed,mean_err_x,std_err_x,mean_err_y,std_err_y,mean_err_z,std_err_z,"
         "mean_err_xy,std_err_xy,mean_err_3d,std_err_3d\n";
  for (const auto& r : rows) {
    out << format_number(r.snr_db) << ',' << r.trials << ',' << r.failed;
    for (const auto* s : {&r.err_x, &r.err_y, &r.err_z, &r.err_xy, &r.err_3d})
      out << ',' << format_number(s->mean) << ',' << format_number(s->std);
    out << '\n';
  }
}

}  // namespace usloc
