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

#include "usloc/placement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "usloc/errors.hpp"

namespace usloc {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  return splitmix(splitmix(splitmix(splitmix(seed) ^ a) ^ b) ^ c);
}

std::vector<double> grid(double lo, double hi, double step, bool include_hi) {
  std::vector<double> v;
  for (long i = 0;; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if (x > hi + 1e-9 || (!include_hi && x > hi - 1e-9)) break;
    v.push_back(x);
  }
  if (include_hi && std::abs(v.back() - hi) > 1e-9) v.push_back(hi);
  return v;
}

void sort_by_fitness(std::vector<Individual>& pop) {
  std::stable_sort(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) { return a.fitness < b.fitness; });
}

}  // namespace

BeaconDomain BeaconDomain::build(const Point3d& room, double resolution) {
  if (!(resolution > 0.0)) throw InvalidArgument("beacon lattice resolution must be positive");
  if (!(room.array() > 0.0).all()) throw InvalidArgument("room dimensions must be positive");
  BeaconDomain d;
  d.room = room;
  d.resolution = resolution;
  const auto xs = grid(0.0, room.x(), resolution, true);
  const auto ys = grid(0.0, room.y(), resolution, true);
  const auto zs = grid(room.z() / 2.0, room.z(), resolution, false);

  for (double x : xs)
    for (double y : ys) {
      d.ceiling.push_back(d.candidates.size());
      d.candidates.emplace_back(x, y, room.z());
    }
  auto add_wall = [&d](const Point3d& p) {
    d.wall.push_back(d.candidates.size());
    d.candidates.push_back(p);
  };
  for (double z : zs) {
    for (double y : ys) {
      add_wall({0.0, y, z});
      add_wall({room.x(), y, z});
    }
    for (double x : xs) {
      if (x <= 1e-9 || x >= room.x() - 1e-9) continue;  // corners already added
      add_wall({x, 0.0, z});
      add_wall({x, room.y(), z});
    }
  }
  return d;
}

std::size_t BeaconDomain::nearest(const Point3d& p) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double d = (candidates[i] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

bool BeaconDomain::contains(const Point3d& p) const {
  return !candidates.empty() && (candidates[nearest(p)] - p).norm() < 1e-9;
}

void PlacementProblem::validate() const {
  drone_domain.validate(beacon_domain.room);
  if (beacon_domain.candidates.size() < kNumBeacons) throw InvalidArgument("beacon domain has fewer than four sites");
  if (!(hdop_tolerance > 0.0) || !(vdop_tolerance > 0.0)) throw InvalidArgument("DOP tolerances must be positive");
  if (population < 2 || parents < 2 || parents > population)
    throw InvalidArgument("need 2 <= parents <= population");
  if (parents % 2 != 0 || offspring != parents / 2) throw InvalidArgument("offspring must equal parents / 2");
  if (iterations < 1 || max_restarts < 0) throw InvalidArgument("iterations >= 1 and max_restarts >= 0 required");
  if (min_separation < 0.0) throw InvalidArgument("minimum separation must be non-negative");
  if (mutation_rate < 0.0 || mutation_rate > 1.0) throw InvalidArgument("mutation rate must be in [0, 1]");
}

bool is_separated(const BeaconLayout& layout, double min_separation) {
  for (std::size_t i = 0; i < kNumBeacons; ++i)
    for (std::size_t j = i + 1; j < kNumBeacons; ++j)
      if ((layout[i] - layout[j]).norm() < min_separation - 1e-12 || (layout[i] - layout[j]).norm() < 1e-9)
        return false;
  return true;
}

bool is_admissible(const BeaconLayout& layout, const PlacementProblem& problem) {
  for (std::size_t i = 0; i < kNumBeacons; ++i)
    if (!problem.beacon_domain.contains(layout[i])) return false;
  return is_separated(layout, problem.min_separation);
}

double fitness(const BeaconLayout& layout, const PlacementProblem& problem, DopAverage* averages) {
  const auto lattice = problem.drone_domain.points();
  DopAverage avg;
  try {
    avg = dop_average(BeaconMatrix<double>(layout.positions), lattice);
  } catch (const DomainDegeneracy&) {
    if (averages) *averages = DopAverage{std::numeric_limits<double>::infinity(),
                                         std::numeric_limits<double>::infinity(), 0, lattice.size()};
    return std::numeric_limits<double>::infinity();
  }
  if (averages) *averages = avg;
  return avg.vdop + (avg.hdop > problem.hdop_tolerance ? problem.penalty : 0.0);
}

Individual evaluate(const BeaconLayout& layout, const PlacementProblem& problem) {
  Individual ind;
  ind.beacons = layout;
  DopAverage avg;
  ind.fitness = fitness(layout, problem, &avg);
  ind.vdop_avg = avg.vdop;
  ind.hdop_avg = avg.hdop;
  return ind;
}

std::vector<Individual> seed_population(const PlacementProblem& problem, int restart) {
  problem.validate();
  const auto& dom = problem.beacon_domain;
  std::mt19937_64 rng(stream_seed(problem.rng_seed, 0x5eedULL, static_cast<std::uint64_t>(restart)));

  const int p = problem.population;
  const int n_ceiling = p / 3 + (p % 3 > 0 ? 1 : 0);
  const int n_wall = p / 3 + (p % 3 > 1 ? 1 : 0);

  auto draw = [&](int ceiling_count) {
    std::uniform_int_distribution<std::size_t> pick_c(0, dom.ceiling.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_w(0, dom.wall.size() - 1);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      BeaconLayout layout;
      for (int k = 0; k < static_cast<int>(kNumBeacons); ++k) {
        const bool on_ceiling = k < ceiling_count;
        if ((on_ceiling && dom.ceiling.empty()) || (!on_ceiling && dom.wall.empty()))
          throw InfeasibleDomain("beacon domain lacks ceiling or wall sites");
        const std::size_t idx = on_ceiling ? dom.ceiling[pick_c(rng)] : dom.wall[pick_w(rng)];
        layout.positions.row(k) = dom.candidates[idx].transpose();
      }
      if (is_separated(layout, problem.min_separation)) return layout;
    }
    throw InfeasibleDomain("could not draw four beacons with the required separation");
  };

  std::vector<Individual> pop;
  pop.reserve(static_cast<std::size_t>(p));
  std::uniform_int_distribution<int> mixed_split(1, static_cast<int>(kNumBeacons) - 1);
  for (int i = 0; i < p; ++i) {
    int ceiling_count = 0;
    if (i < n_ceiling)
      ceiling_count = static_cast<int>(kNumBeacons);
    else if (i < n_ceiling + n_wall)
      ceiling_count = 0;
    else
      ceiling_count = mixed_split(rng);
    pop.push_back(evaluate(draw(ceiling_count), problem));
  }
  return pop;
}

Individual crossover(const Individual& parent_a, const Individual& parent_b, const PlacementProblem& problem,
                     std::mt19937_64& rng) {
  const auto& dom = problem.beacon_domain;
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution mutate(problem.mutation ? problem.mutation_rate : 0.0);
  std::normal_distribution<double> jitter(0.0, 0.5);

  for (int attempt = 0; attempt < 20; ++attempt) {
    Individual child;
    for (Eigen::Index k = 0; k < 4; ++k) {
      Point3d p;
      for (Eigen::Index c = 0; c < 3; ++c) {
        p(c) = coin(rng) ? parent_a.beacons.positions(k, c) : parent_b.beacons.positions(k, c);
        if (problem.mutation && mutate(rng)) p(c) += jitter(rng);
      }
      child.beacons.positions.row(k) = dom.candidates[dom.nearest(p)].transpose();
    }
    if (is_separated(child.beacons, problem.min_separation)) return child;
  }
  Individual fallback;
  fallback.beacons = parent_a.beacons;
  return fallback;
}

PlacementResult optimize(const PlacementProblem& problem) {
  problem.validate();
  PlacementResult result;
  Individual overall_best;
  const auto p = static_cast<std::size_t>(problem.population);

  for (int restart = 0; restart <= problem.max_restarts; ++restart) {
    std::vector<Individual> pop = seed_population(problem, restart);
    sort_by_fitness(pop);

    for (int it = 1; it <= problem.iterations; ++it) {
      // Offspring are appended after the current population so the stable
      // sort breaks fitness ties by insertion order.
      for (int k = 0; k < problem.offspring; ++k) {
        std::mt19937_64 rng(stream_seed(problem.rng_seed, static_cast<std::uint64_t>(restart) + 1,
                                        static_cast<std::uint64_t>(it), static_cast<std::uint64_t>(k)));
        Individual child = crossover(pop[static_cast<std::size_t>(2 * k)], pop[static_cast<std::size_t>(2 * k + 1)],
                                     problem, rng);
        pop.push_back(evaluate(child.beacons, problem));
      }
      sort_by_fitness(pop);
      pop.resize(p);

      result.history.push_back({restart, it, pop.front().fitness, pop.front().vdop_avg, pop.front().hdop_avg, pop.size()});
      ++result.iterations_used;
    }

    const Individual& best = pop.front();
    if (best.fitness < overall_best.fitness) overall_best = best;
    result.restarts = restart;
    if (best.vdop_avg <= problem.vdop_tolerance && best.hdop_avg <= problem.hdop_tolerance) {
      overall_best = best;
      result.feasible = true;
      break;
    }
  }

  result.layout = overall_best.beacons;
  result.vdop_avg = overall_best.vdop_avg;
  result.hdop_avg = overall_best.hdop_avg;
  return result;
}

}  // namespace usloc
