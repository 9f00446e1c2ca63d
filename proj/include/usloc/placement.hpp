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
#include <vector>

#include "usloc/dop.hpp"
#include "usloc/geometry.hpp"

namespace usloc {

// Admissible beacon sites: a lattice over the ceiling plus the upper half of
// the four walls.
struct BeaconDomain {
  Point3d room = default_room();
  double resolution = 0.25;
  std::vector<Point3d> candidates;
  std::vector<std::size_t> ceiling;  // indices into candidates with z == room height
  std::vector<std::size_t> wall;     // wall sites below the ceiling

  static BeaconDomain build(const Point3d& room, double resolution);

  std::size_t nearest(const Point3d& p) const;
  bool contains(const Point3d& p) const;
};

struct Individual {
  BeaconLayout beacons;
  double fitness = std::numeric_limits<double>::infinity();
  double vdop_avg = std::numeric_limits<double>::infinity();
  double hdop_avg = std::numeric_limits<double>::infinity();
};

struct PlacementProblem {
  DroneDomain drone_domain;
  BeaconDomain beacon_domain = BeaconDomain::build(default_room(), 0.25);
  double hdop_tolerance = 2.0;
  double vdop_tolerance = 2.0;
  int population = 50;
  int parents = 40;
  int offspring = 20;
  int iterations = 100;
  int max_restarts = 10;
  double min_separation = 0.5;  // m
  std::uint64_t rng_seed = 1;
  bool mutation = false;        // off: crossover is the only variation operator
  double mutation_rate = 0.05;  // per coordinate when mutation is on
  double penalty = 1e6;         // added to the fitness when hdop_avg > h

  void validate() const;
};

bool is_separated(const BeaconLayout& layout, double min_separation);
/// In-domain and separated.
bool is_admissible(const BeaconLayout& layout, const PlacementProblem& problem);

// Domain-averaged VDOP, plus the penalty when the HDOP average breaks the
// tolerance. Degenerate layouts score +infinity.
double fitness(const BeaconLayout& layout, const PlacementProblem& problem, DopAverage* averages = nullptr);
Individual evaluate(const BeaconLayout& layout, const PlacementProblem& problem);

// P individuals split across all-ceiling, all-wall and mixed groups in fixed
// quotas. `restart` selects an independent random stream.
std::vector<Individual> seed_population(const PlacementProblem& problem, int restart = 0);

// Per beacon and per coordinate, a fair coin picks parent a or b; each beacon
// is then snapped to the nearest lattice site. Up to 20 redraws to restore
// separation, after which parent a is returned. The child is not evaluated.
Individual crossover(const Individual& parent_a, const Individual& parent_b, const PlacementProblem& problem,
                     std::mt19937_64& rng);

struct HistoryEntry {
  int restart = 0;
  int iteration = 0;
  double best_fitness = 0.0;
  double best_vdop = 0.0;
  double best_hdop = 0.0;
  std::size_t population = 0;
};

struct PlacementResult {
  BeaconLayout layout;
  double vdop_avg = 0.0;
  double hdop_avg = 0.0;
  int iterations_used = 0;  // across all restarts
  int restarts = 0;
  bool feasible = false;
  std::vector<HistoryEntry> history;
};

PlacementResult optimize(const PlacementProblem& problem);

}  // namespace usloc
