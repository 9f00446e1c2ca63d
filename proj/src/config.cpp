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

#include "usloc/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>

#include "usloc/errors.hpp"

namespace usloc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, std::string_view seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string_view::npos) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    throw ConfigError(line, "expected a number, got '" + s + "'");
  }
  return v;
}

long long to_int(const std::string& s, int line) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(line, "expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s, int line) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError(line, "expected true/false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& s, int line) {
  std::vector<double> out;
  for (const auto& tok : split(s, " ,\t")) out.push_back(to_double(tok, line));
  if (out.empty()) throw ConfigError(line, "expected a list of numbers");
  return out;
}

Point3d to_point(const std::string& s, int line) {
  const auto v = to_list(s, line);
  if (v.size() != 3) throw ConfigError(line, "expected three coordinates, got " + std::to_string(v.size()));
  return {v[0], v[1], v[2]};
}

std::vector<Point3d> to_points(const std::string& s, int line) {
  std::vector<Point3d> out;
  for (const auto& tok : split(s, ";")) out.push_back(to_point(tok, line));
  return out;
}

int positive_int(const std::string& s, int line) {
  const auto v = to_int(s, line);
  if (v < 1 || v > 1'000'000'000) throw ConfigError(line, "expected a positive integer");
  return static_cast<int>(v);
}

double positive(const std::string& s, int line) {
  const double v = to_double(s, line);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(line, "expected a positive number");
  return v;
}

using Setter = std::function<void(SimConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      // [scene]
      {"scene.room", [](SimConfig& c, const std::string& v, int l) { c.scene.room = to_point(v, l); }},
      {"scene.beacons",
       [](SimConfig& c, const std::string& v, int l) {
         const auto pts = to_points(v, l);
         if (pts.size() != kNumBeacons) throw ConfigError(l, "expected exactly four beacons separated by ';'");
         c.scene.beacons = make_layout(pts[0], pts[1], pts[2], pts[3]);
       }},
      // [waveform]
      {"waveform.sample_rate", [](SimConfig& c, const std::string& v, int l) { c.waveform.sample_rate = positive(v, l); }},
      {"waveform.symbol_duration",
       [](SimConfig& c, const std::string& v, int l) { c.waveform.symbol_duration = positive(v, l); }},
      {"waveform.channels", [](SimConfig& c, const std::string& v, int l) { c.waveform.channels = to_list(v, l); }},
      {"waveform.channel_bandwidth",
       [](SimConfig& c, const std::string& v, int l) { c.waveform.channel_bandwidth = positive(v, l); }},
      {"waveform.walsh_order", [](SimConfig& c, const std::string& v, int l) { c.waveform.walsh_order = positive_int(v, l); }},
      {"waveform.burst_bits", [](SimConfig& c, const std::string& v, int l) { c.waveform.burst_bits = positive_int(v, l); }},
      {"waveform.phase", [](SimConfig& c, const std::string& v, int l) { c.waveform.phase = to_double(v, l); }},
      {"waveform.hop_reuse_gap",
       [](SimConfig& c, const std::string& v, int l) {
         c.waveform.hop_reuse_gap = static_cast<int>(to_int(v, l));
         if (c.waveform.hop_reuse_gap < 0) throw ConfigError(l, "hop_reuse_gap must be non-negative");
       }},
      {"waveform.code_seed",
       [](SimConfig& c, const std::string& v, int l) { c.waveform.code_seed = static_cast<std::uint64_t>(to_int(v, l)); }},
      // [channel]
      {"channel.speed_of_sound",
       [](SimConfig& c, const std::string& v, int l) { c.channel.speed_of_sound = positive(v, l); }},
      {"channel.snr_db", [](SimConfig& c, const std::string& v, int l) { c.channel.snr_db = to_double(v, l); }},
      {"channel.multipath", [](SimConfig& c, const std::string& v, int l) { c.channel.multipath = to_bool(v, l); }},
      {"channel.taps",
       [](SimConfig& c, const std::string& v, int l) {
         const auto n = to_int(v, l);
         if (n < 0 || n > 1000) throw ConfigError(l, "tap count must be in [0, 1000]");
         c.channel.profile.taps = static_cast<int>(n);
       }},
      {"channel.min_excess_delay",
       [](SimConfig& c, const std::string& v, int l) { c.channel.profile.min_excess_delay = positive(v, l); }},
      {"channel.max_excess_delay",
       [](SimConfig& c, const std::string& v, int l) { c.channel.profile.max_excess_delay = positive(v, l); }},
      {"channel.first_tap_db", [](SimConfig& c, const std::string& v, int l) { c.channel.profile.first_tap_db = to_double(v, l); }},
      {"channel.decay_time", [](SimConfig& c, const std::string& v, int l) { c.channel.profile.decay_time = positive(v, l); }},
      {"channel.distance_attenuation",
       [](SimConfig& c, const std::string& v, int l) { c.channel.distance_attenuation = to_bool(v, l); }},
      {"channel.max_doppler",
       [](SimConfig& c, const std::string& v, int l) {
         c.channel.max_doppler = to_double(v, l);
         if (c.channel.max_doppler < 0.0) throw ConfigError(l, "max_doppler must be non-negative");
       }},
      // [fusion]
      {"fusion.enabled", [](SimConfig& c, const std::string& v, int l) { c.fusion.enabled = to_bool(v, l); }},
      {"fusion.w1", [](SimConfig& c, const std::string& v, int l) { c.fusion.weights.w1 = to_double(v, l); }},
      {"fusion.w2", [](SimConfig& c, const std::string& v, int l) { c.fusion.weights.w2 = to_double(v, l); }},
      {"fusion.auto_weights", [](SimConfig& c, const std::string& v, int l) { c.fusion.auto_weights = to_bool(v, l); }},
      {"fusion.echo_noise_std",
       [](SimConfig& c, const std::string& v, int l) {
         c.fusion.echo_noise_std = to_double(v, l);
         if (c.fusion.echo_noise_std < 0.0) throw ConfigError(l, "echo_noise_std must be non-negative");
       }},
      {"fusion.outlier_probability",
       [](SimConfig& c, const std::string& v, int l) {
         c.fusion.outlier_probability = to_double(v, l);
         if (c.fusion.outlier_probability < 0.0 || c.fusion.outlier_probability > 1.0)
           throw ConfigError(l, "outlier_probability must be in [0, 1]");
       }},
      // [placement]
      {"placement.drone_lower",
       [](SimConfig& c, const std::string& v, int l) { c.placement.drone_domain.lower = to_point(v, l); }},
      {"placement.drone_upper",
       [](SimConfig& c, const std::string& v, int l) { c.placement.drone_domain.upper = to_point(v, l); }},
      {"placement.drone_resolution",
       [](SimConfig& c, const std::string& v, int l) { c.placement.drone_domain.resolution = positive(v, l); }},
      {"placement.beacon_resolution",
       [](SimConfig& c, const std::string& v, int l) { c.placement.beacon_resolution = positive(v, l); }},
      {"placement.hdop_tolerance",
       [](SimConfig& c, const std::string& v, int l) { c.placement.hdop_tolerance = positive(v, l); }},
      {"placement.vdop_tolerance",
       [](SimConfig& c, const std::string& v, int l) { c.placement.vdop_tolerance = positive(v, l); }},
      {"placement.population", [](SimConfig& c, const std::string& v, int l) { c.placement.population = positive_int(v, l); }},
      {"placement.parents", [](SimConfig& c, const std::string& v, int l) { c.placement.parents = positive_int(v, l); }},
      {"placement.offspring", [](SimConfig& c, const std::string& v, int l) { c.placement.offspring = positive_int(v, l); }},
      {"placement.iterations", [](SimConfig& c, const std::string& v, int l) { c.placement.iterations = positive_int(v, l); }},
      {"placement.max_restarts",
       [](SimConfig& c, const std::string& v, int l) {
         const auto n = to_int(v, l);
         if (n < 0 || n > 1'000'000) throw ConfigError(l, "max_restarts must be non-negative");
         c.placement.max_restarts = static_cast<int>(n);
       }},
      {"placement.min_separation",
       [](SimConfig& c, const std::string& v, int l) {
         c.placement.min_separation = to_double(v, l);
         if (c.placement.min_separation < 0.0) throw ConfigError(l, "min_separation must be non-negative");
       }},
      {"placement.mutation", [](SimConfig& c, const std::string& v, int l) { c.placement.mutation = to_bool(v, l); }},
      {"placement.mutation_rate",
       [](SimConfig& c, const std::string& v, int l) { c.placement.mutation_rate = to_double(v, l); }},
      // [run]
      {"run.seed", [](SimConfig& c, const std::string& v, int l) { c.run.seed = static_cast<std::uint64_t>(to_int(v, l)); }},
      {"run.trials", [](SimConfig& c, const std::string& v, int l) { c.run.trials = positive_int(v, l); }},
      {"run.snr_list", [](SimConfig& c, const std::string& v, int l) { c.run.snr_list = to_list(v, l); }},
      {"run.layout",
       [](SimConfig& c, const std::string& v, int l) {
         if (v != "original" && v != "optimized" && v != "file")
           throw ConfigError(l, "layout must be original, optimized or file");
         c.run.layout = v;
       }},
      {"run.trajectories", [](SimConfig& c, const std::string& v, int l) { c.run.trajectories = positive_int(v, l); }},
      {"run.trajectory_waypoints",
       [](SimConfig& c, const std::string& v, int l) { c.run.trajectory_waypoints = positive_int(v, l); }},
      {"run.fix_spacing", [](SimConfig& c, const std::string& v, int l) { c.run.fix_spacing = positive(v, l); }},
      {"run.waypoints", [](SimConfig& c, const std::string& v, int l) { c.run.waypoints = to_points(v, l); }},
  };
  return table;
}

}  // namespace

PlacementProblem PlacementSettings::problem(const Point3d& room, std::uint64_t seed) const {
  PlacementProblem p;
  p.drone_domain = drone_domain;
  p.beacon_domain = BeaconDomain::build(room, beacon_resolution);
  p.hdop_tolerance = hdop_tolerance;
  p.vdop_tolerance = vdop_tolerance;
  p.population = population;
  p.parents = parents;
  p.offspring = offspring;
  p.iterations = iterations;
  p.max_restarts = max_restarts;
  p.min_separation = min_separation;
  p.rng_seed = seed;
  p.mutation = mutation;
  p.mutation_rate = mutation_rate;
  return p;
}

void SimConfig::validate() const {
  // Blame the first of the related keys that appears in the file.
  auto check = [this](std::initializer_list<const char*> keys, auto&& fn) {
    try {
      fn();
    } catch (const InvalidArgument& e) {
      for (const char* key : keys)
        if (const auto it = key_lines.find(key); it != key_lines.end())
          throw ConfigError(it->second, std::string(key) + ": " + e.what());
      throw ConfigError(0, std::string(*keys.begin()) + ": " + e.what());
    }
  };

  check({"scene.room"}, [&] {
    if (!(scene.room.array() > 0.0).all()) throw InvalidArgument("room dimensions must be positive");
  });
  check({"scene.beacons", "scene.room"}, [&] {
    scene.beacons.validate();
    for (std::size_t i = 0; i < kNumBeacons; ++i)
      if (!inside_or_on<double>(scene.beacons[i], scene.room))
        throw InvalidArgument("beacon " + std::to_string(i) + " outside the room");
  });
  check({"waveform.channels", "waveform.channel_bandwidth"}, [&] {
    HopPlan plan;
    plan.center_frequencies = waveform.channels;
    plan.channel_bandwidth = waveform.channel_bandwidth;
    plan.validate();
  });
  check({"waveform.hop_reuse_gap", "waveform.channels"}, [&] {
    if (waveform.hop_reuse_gap >= static_cast<int>(waveform.channels.size()))
      throw InvalidArgument("hop_reuse_gap must be smaller than the number of channels");
  });
  check({"waveform.sample_rate", "waveform.channels"}, [&] {
    double fmax = 0.0;
    for (double f : waveform.channels) fmax = std::max(fmax, f);
    if (waveform.sample_rate < 2.0 * fmax) throw InvalidArgument("sample rate below twice the highest channel");
  });
  check({"waveform.walsh_order"}, [&] {
    walsh_hadamard_entries(waveform.walsh_order);
    if (waveform.walsh_order < static_cast<int>(kNumBeacons))
      throw InvalidArgument("need at least one code row per beacon");
  });
  check({"waveform.symbol_duration", "waveform.sample_rate", "waveform.walsh_order"}, [&] {
    WaveformConfig wc{waveform.sample_rate, waveform.symbol_duration, {}, 0};
    wc.validate(waveform.walsh_order);
  });
  check({"channel.max_excess_delay", "channel.min_excess_delay", "channel.decay_time", "channel.first_tap_db",
         "channel.taps"}, [&] { channel.profile.validate(); });
  check({"fusion.w1", "fusion.w2"}, [&] { fusion.weights.validate(); });
  check({"placement.drone_lower", "placement.drone_upper", "placement.drone_resolution", "scene.room"}, [&] { placement.drone_domain.validate(scene.room); });
  check({"placement.parents", "placement.offspring", "placement.population", "placement.iterations",
         "placement.max_restarts", "placement.min_separation", "placement.hdop_tolerance", "placement.vdop_tolerance",
         "placement.beacon_resolution"}, [&] { placement.problem(scene.room, run.seed).validate(); });
  check({"placement.mutation_rate"}, [&] {
    if (placement.mutation_rate < 0.0 || placement.mutation_rate > 1.0)
      throw InvalidArgument("mutation rate must be in [0, 1]");
  });
  check({"run.waypoints", "placement.drone_lower", "placement.drone_upper"}, [&] {
    const auto& d = placement.drone_domain;
    for (const auto& p : run.waypoints)
      if ((p.array() < d.lower.array()).any() || (p.array() > d.upper.array()).any())
        throw InvalidArgument("waypoint outside the drone domain");
  });
}

SimConfig parse_config(std::string_view text) {
  SimConfig cfg;
  static const std::vector<std::string> sections{"scene", "waveform", "channel", "fusion", "placement", "run"};
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        throw ConfigError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    if (section.empty()) throw ConfigError(line, "key outside of any section");
    const std::string key = section + "." + trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (cfg.key_lines.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(line, "missing value for '" + key + "'");
    it->second(cfg, value, line);
    cfg.key_lines[key] = line;
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open config file", path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.line(), e.detail(), path.string());
  }
}

BeaconLayout resolve_layout(const SimConfig& config, std::string_view name) {
  if (name == "original") return original_layout();
  if (name == "optimized") return optimized_layout();
  if (name == "file") return config.scene.beacons;
  throw InvalidArgument("unknown layout '" + std::string(name) + "'");
}

}  // namespace usloc
