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

// Command-line driver: simulate, sweep, trajectory, optimize, dopmap, rangetest.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "usloc/config.hpp"
#include "usloc/dop.hpp"
#include "usloc/errors.hpp"
#include "usloc/harness.hpp"
#include "usloc/placement.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace usloc;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<int> trials;
  std::optional<std::string> layout;
  std::string layout_file;
};

json point_json(const Point3d& p) { return json::array({p.x(), p.y(), p.z()}); }

json layout_json(const BeaconLayout& l) {
  json arr = json::array();
  for (std::size_t i = 0; i < kNumBeacons; ++i) arr.push_back(point_json(l[i]));
  return arr;
}

BeaconLayout layout_from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open layout file", path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(0, std::string("invalid JSON: ") + e.what(), path);
  }
  const json& arr = j.contains("beacons") ? j["beacons"] : j;
  if (!arr.is_array() || arr.size() != kNumBeacons) throw ConfigError(0, "expected four beacons", path);
  BeaconLayout l;
  for (std::size_t i = 0; i < kNumBeacons; ++i) {
    if (!arr[i].is_array() || arr[i].size() != 3) throw ConfigError(0, "each beacon needs three coordinates", path);
    for (std::size_t c = 0; c < 3; ++c)
      l.positions(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = arr[i][c].get<double>();
  }
  l.validate();
  return l;
}

SimConfig load(const Options& opt) {
  SimConfig cfg = opt.config_path.empty() ? SimConfig{} : load_config(opt.config_path);
  if (opt.seed) cfg.run.seed = *opt.seed;
  if (opt.trials) cfg.run.trials = *opt.trials;
  if (!opt.layout_file.empty()) {
    cfg.scene.beacons = layout_from_json_file(opt.layout_file);
    cfg.run.layout = "file";
  }
  if (opt.layout) cfg.run.layout = *opt.layout;
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const Options& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  std::ofstream f(fs::path(opt.out_dir) / name);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(opt.out_dir) / name).string());
  return f;
}

json stats_json(const ErrorStats& s) { return {{"mean", s.mean}, {"std", s.std}}; }

json row_json(const SnrRow& r) {
  return {{"snr_db", r.snr_db},          {"trials", r.trials},          {"failed", r.failed},
          {"err_x", stats_json(r.err_x)}, {"err_y", stats_json(r.err_y)}, {"err_z", stats_json(r.err_z)},
          {"err_xy", stats_json(r.err_xy)}, {"err_3d", stats_json(r.err_3d)}};
}

json run_header(const char* command, const SimConfig& cfg, const BeaconLayout& layout) {
  return {{"command", command}, {"seed", cfg.run.seed}, {"layout", cfg.run.layout}, {"beacons", layout_json(layout)}};
}

void write_json(const Options& opt, const std::string& name, const json& j) { open_out(opt, name) << j.dump(2) << '\n'; }

int cmd_simulate(const Options& opt) {
  const SimConfig cfg = load(opt);
  const BeaconLayout layout = resolve_layout(cfg, cfg.run.layout);
  const FixSimulator sim(cfg, layout);
  const auto records = run_trials(sim, cfg.channel.snr_db, static_cast<std::size_t>(cfg.run.trials), cfg.run.seed);
  auto csv = open_out(opt, "trials.csv");
  write_trials_csv(csv, records);
  json j = run_header("simulate", cfg, layout);
  j["summary"] = row_json(summarize(cfg.channel.snr_db, records));
  write_json(opt, "summary.json", j);
  return 0;
}

int cmd_sweep(const Options& opt) {
  const SimConfig cfg = load(opt);
  const BeaconLayout layout = resolve_layout(cfg, cfg.run.layout);
  const FixSimulator sim(cfg, layout);
  std::vector<TrialRecord> records;
  const auto rows = sweep_snr(sim, cfg.run.snr_list, static_cast<std::size_t>(cfg.run.trials), cfg.run.seed, &records);
  auto trials = open_out(opt, "trials.csv");
  write_trials_csv(trials, records);
  auto sweep = open_out(opt, "sweep.csv");
  write_sweep_csv(sweep, rows);
  json j = run_header("sweep", cfg, layout);
  j["rows"] = json::array();
  for (const auto& r : rows) j["rows"].push_back(row_json(r));
  write_json(opt, "summary.json", j);
  return 0;
}

int cmd_trajectory(const Options& opt) {
  const SimConfig cfg = load(opt);
  const BeaconLayout layout = resolve_layout(cfg, cfg.run.layout);
  const FixSimulator sim(cfg, layout);
  const auto& domain = cfg.placement.drone_domain;

  std::vector<Trajectory> trajectories;
  if (!cfg.run.waypoints.empty()) {
    trajectories.push_back(Trajectory{cfg.run.waypoints, cfg.run.fix_spacing});
  } else {
    for (int k = 0; k < cfg.run.trajectories; ++k)
      trajectories.push_back(random_trajectory(domain, cfg.run.trajectory_waypoints, cfg.run.fix_spacing,
                                               trial_seed(cfg.run.seed, 1'000'000 + static_cast<std::uint64_t>(k))));
  }

  auto csv = open_out(opt, "trajectory.csv");
  json j = run_header("trajectory", cfg, layout);
  j["snr_db"] = cfg.channel.snr_db;
  j["trajectories"] = json::array();
  bool header_done = false;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const auto result = run_trajectory(sim, trajectories[k], cfg.channel.snr_db, trial_seed(cfg.run.seed, k));
    std::ostringstream body;
    write_trials_csv(body, result.records);
    std::istringstream lines(body.str());
    std::string line;
    std::getline(lines, line);
    if (!header_done) {
      csv << "trajectory," << line << '\n';
      header_done = true;
    }
    while (std::getline(lines, line)) csv << k << ',' << line << '\n';
    j["trajectories"].push_back({{"index", k},
                                 {"fixes", result.records.size()},
                                 {"failed", result.failed},
                                 {"mean_err_z", result.mean_err_z},
                                 {"mean_err_3d", result.mean_err_3d}});
  }
  write_json(opt, "summary.json", j);
  return 0;
}

int cmd_optimize(const Options& opt) {
  const SimConfig cfg = load(opt);
  const PlacementProblem problem = cfg.placement.problem(cfg.scene.room, cfg.run.seed);
  const PlacementResult result = optimize(problem);

  json j{{"beacons", layout_json(result.layout)},
         {"vdop_avg", result.vdop_avg},
         {"hdop_avg", result.hdop_avg},
         {"iterations_used", result.iterations_used},
         {"restarts", result.restarts},
         {"feasible", result.feasible},
         {"hdop_tolerance", problem.hdop_tolerance},
         {"vdop_tolerance", problem.vdop_tolerance},
         {"seed", cfg.run.seed}};
  write_json(opt, "result.json", j);

  auto csv = open_out(opt, "history.csv");
  csv << "restart,iteration,best_fitness,best_vdop,best_hdop,population\n";
  for (const auto& h : result.history)
    csv << h.restart << ',' << h.iteration << ',' << format_number(h.best_fitness) << ','
        << format_number(h.best_vdop) << ',' << format_number(h.best_hdop) << ',' << h.population << '\n';

  std::cout << "vdop_avg " << format_number(result.vdop_avg) << " hdop_avg " << format_number(result.hdop_avg)
            << (result.feasible ? " feasible" : " INFEASIBLE") << '\n';
  return 0;
}

int cmd_dopmap(const Options& opt) {
  const SimConfig cfg = load(opt);
  const BeaconLayout layout = resolve_layout(cfg, cfg.run.layout);
  auto csv = open_out(opt, "dopmap.csv");
  csv << "x,y,z,hdop,vdop,gdop\n";
  for (const auto& p : cfg.placement.drone_domain.points()) {
    csv << format_number(p.x()) << ',' << format_number(p.y()) << ',' << format_number(p.z()) << ',';
    try {
      const auto r = dop_at(layout, p);
      csv << format_number(r.hdop) << ',' << format_number(r.vdop) << ',' << format_number(r.gdop) << '\n';
    } catch (const std::exception&) {
      csv << "nan,nan,nan\n";
    }
  }
  return 0;
}

int cmd_rangetest(const Options& opt) {
  const SimConfig cfg = load(opt);
  const BeaconLayout layout = resolve_layout(cfg, cfg.run.layout);
  const FixSimulator sim(cfg, layout);
  auto csv = open_out(opt, "ranges.csv");
  csv << "trial,beacon,true_distance,true_lag,est_distance,peak_sample,peak_value,range_error,lag_error\n";
  for (int t = 0; t < cfg.run.trials; ++t) {
    const std::uint64_t seed = trial_seed(cfg.run.seed, static_cast<std::uint64_t>(t));
    const Point3d truth = trial_position(cfg.placement.drone_domain, seed);
    const auto d = sim.measure_ranges(truth, cfg.channel.snr_db, seed);
    for (std::size_t b = 0; b < kNumBeacons; ++b) {
      const auto& e = d.estimate[b];
      csv << t << ',' << b << ',' << format_number(d.true_distance[b]) << ',' << d.true_lag[b] << ','
          << format_number(e.distance) << ',' << e.peak_sample << ',' << format_number(e.peak_value) << ','
          << format_number(e.distance - d.true_distance[b]) << ',' << (e.peak_sample - d.true_lag[b]) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultrasonic FH-CDMA indoor localization simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Master RNG seed (overrides [run] seed)");
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--trials", opt.trials, "Trials per point (overrides [run] trials)")->check(CLI::PositiveNumber);
    sub->add_option("--layout", opt.layout, "Beacon layout")->check(CLI::IsMember({"original", "optimized", "file"}));
    sub->add_option("--layout-file", opt.layout_file, "JSON layout, e.g. an optimize result.json")
        ->check(CLI::ExistingFile);
  };

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Command commands[] = {
      {"simulate", "Monte Carlo fixes at the configured SNR", cmd_simulate},
      {"sweep", "Localization error versus SNR", cmd_sweep},
      {"trajectory", "Fixes along random or configured trajectories", cmd_trajectory},
      {"optimize", "Evolutionary beacon placement", cmd_optimize},
      {"dopmap", "HDOP/VDOP/GDOP over the drone domain lattice", cmd_dopmap},
      {"rangetest", "Per-beacon ranging diagnostics", cmd_rangetest},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    sub->callback([&selected, fn = c.fn] { selected = fn; });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return selected(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
