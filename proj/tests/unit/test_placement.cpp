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
#include <limits>

#include "usloc/errors.hpp"
#include "usloc/placement.hpp"

using namespace usloc;

namespace {

int ceiling_beacons(const BeaconLayout& l, double h) {
  int n = 0;
  for (std::size_t i = 0; i < kNumBeacons; ++i) n += std::abs(l[i].z() - h) < 1e-9;
  return n;
}

}  // namespace

TEST_CASE("beacon domain covers the ceiling and the upper walls") {
  const auto d = BeaconDomain::build(default_room(), 0.25);
  CHECK(d.ceiling.size() == 21 * 21);
  CHECK(d.wall.size() == 8 * (2 * 21 + 2 * 19));
  CHECK(d.candidates.size() == d.ceiling.size() + d.wall.size());
  for (std::size_t i : d.ceiling) CHECK(d.candidates[i].z() == 4.0);
  for (std::size_t i : d.wall) {
    const Point3d& p = d.candidates[i];
    CHECK(p.z() >= 2.0);
    CHECK(p.z() < 4.0);
    const bool on_wall = p.x() == 0.0 || p.x() == 5.0 || p.y() == 0.0 || p.y() == 5.0;
    CHECK(on_wall);
  }
  for (std::size_t i = 0; i < d.candidates.size(); ++i)
    for (std::size_t j = i + 1; j < d.candidates.size(); ++j) REQUIRE((d.candidates[i] - d.candidates[j]).norm() > 1e-9);

  CHECK(d.contains({2.5, 2.5, 4.0}));
  CHECK(d.contains({0.0, 1.25, 2.0}));
  CHECK_FALSE(d.contains({2.5, 0.0, 1.5}));
  CHECK_FALSE(d.contains({2.4, 2.5, 4.0}));
  CHECK(d.candidates[d.nearest({2.4, 2.6, 3.9})] == Point3d(2.5, 2.5, 4.0));
  CHECK_THROWS_AS(BeaconDomain::build(default_room(), 0.0), InvalidArgument);
}

TEST_CASE("separation and admissibility") {
  PlacementProblem problem;
  const auto opt = make_layout({0.5, 1.0, 4.0}, {4.75, 0.25, 4.0}, {1.0, 4.5, 4.0}, {5.0, 3.75, 3.75});
  CHECK(is_separated(opt, 0.5));
  CHECK(is_admissible(opt, problem));
  CHECK_FALSE(is_admissible(original_layout(), problem));  // beacon 0 sits below half height

  const auto close = make_layout({1.0, 1.0, 4.0}, {1.25, 1.0, 4.0}, {3.0, 3.0, 4.0}, {0.0, 2.0, 3.0});
  CHECK_FALSE(is_separated(close, 0.5));
  CHECK(is_separated(close, 0.25));
  CHECK_FALSE(is_admissible(close, problem));
}

TEST_CASE("fitness is mean VDOP with an HDOP penalty") {
  PlacementProblem problem;
  DopAverage avg;
  const double f = fitness(optimized_layout(), problem, &avg);
  CHECK(f == avg.vdop);
  CHECK(avg.hdop <= problem.hdop_tolerance);

  problem.hdop_tolerance = 1.0;
  CHECK(fitness(optimized_layout(), problem) == doctest::Approx(avg.vdop + 1e6));

  const auto line = make_layout({0.5, 2.5, 4.0}, {1.5, 2.5, 4.0}, {2.5, 2.5, 4.0}, {3.5, 2.5, 4.0});
  CHECK(fitness(line, problem) == std::numeric_limits<double>::infinity());
  const auto ind = evaluate(line, problem);
  CHECK(ind.fitness == std::numeric_limits<double>::infinity());
}

TEST_CASE("seeded population fills the ceiling, wall and mixed quotas") {
  PlacementProblem problem;
  const auto pop = seed_population(problem);
  REQUIRE(pop.size() == 50);
  for (int i = 0; i < 50; ++i) {
    const auto& ind = pop[static_cast<std::size_t>(i)];
    CHECK(is_admissible(ind.beacons, problem));
    CHECK(ind.fitness == fitness(ind.beacons, problem));
    const int c = ceiling_beacons(ind.beacons, 4.0);
    if (i < 17)
      CHECK(c == 4);
    else if (i < 34)
      CHECK(c == 0);
    else
      CHECK((c >= 1 && c <= 3));
  }
  const auto again = seed_population(problem);
  const auto other = seed_population(problem, 1);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < 50; ++i) {
    same &= pop[i].beacons.positions == again[i].beacons.positions;
    differs |= pop[i].beacons.positions != other[i].beacons.positions;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("crossover mixes coordinates with a fair coin") {
  PlacementProblem problem;
  Individual a, b;
  a.beacons = make_layout({0.5, 0.5, 4.0}, {4.5, 0.5, 4.0}, {0.5, 4.5, 4.0}, {4.5, 4.5, 4.0});
  b.beacons = make_layout({1.5, 2.0, 4.0}, {3.0, 1.0, 4.0}, {2.0, 3.5, 4.0}, {3.5, 3.0, 4.0});
  std::mt19937_64 rng(7);
  int from_a = 0, total = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    const auto child = crossover(a, b, problem, rng);
    CHECK(is_admissible(child.beacons, problem));
    for (Eigen::Index k = 0; k < 4; ++k)
      for (Eigen::Index c = 0; c < 2; ++c) {
        const double v = child.beacons.positions(k, c);
        const bool is_a = v == a.beacons.positions(k, c);
        CHECK((is_a || v == b.beacons.positions(k, c)));
        from_a += is_a;
        ++total;
      }
  }
  CHECK(static_cast<double>(from_a) / total == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("crossover snaps mixed wall/ceiling coordinates onto the lattice") {
  PlacementProblem problem;
  Individual a, b;
  a.beacons = make_layout({0.0, 1.0, 2.5}, {5.0, 4.0, 3.0}, {2.0, 0.0, 3.5}, {3.0, 5.0, 2.0});
  b.beacons = make_layout({1.0, 1.5, 4.0}, {4.0, 2.0, 4.0}, {2.5, 3.5, 4.0}, {1.5, 4.0, 4.0});
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 200; ++rep) CHECK(is_admissible(crossover(a, b, problem, rng).beacons, problem));
}

TEST_CASE("crossover falls back to parent a when separation cannot be met") {
  PlacementProblem problem;
  problem.min_separation = 50.0;
  Individual a, b;
  a.beacons = optimized_layout();
  b.beacons = original_layout();
  std::mt19937_64 rng(1);
  CHECK(crossover(a, b, problem, rng).beacons.positions == a.beacons.positions);
}

TEST_CASE("optimizer invariants") {
  PlacementProblem problem;
  problem.rng_seed = 3;
  const auto r1 = optimize(problem);
  const auto r2 = optimize(problem);
  CHECK(r1.layout.positions == r2.layout.positions);
  CHECK(r1.vdop_avg == r2.vdop_avg);
  REQUIRE(r1.history.size() == r2.history.size());
  CHECK(r1.iterations_used == static_cast<int>(r1.history.size()));

  for (std::size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].population == 50);
    CHECK(r1.history[i].best_fitness == r2.history[i].best_fitness);
    if (i > 0 && r1.history[i].restart == r1.history[i - 1].restart)
      CHECK(r1.history[i].best_fitness <= r1.history[i - 1].best_fitness);
  }
  CHECK(is_admissible(r1.layout, problem));
  CHECK(r1.feasible);
  CHECK(r1.vdop_avg <= problem.vdop_tolerance);
  CHECK(r1.hdop_avg <= problem.hdop_tolerance);
}

TEST_CASE("optimizer restarts when tolerances are out of reach") {
  PlacementProblem problem;
  problem.vdop_tolerance = 0.01;
  problem.iterations = 3;
  problem.max_restarts = 2;
  const auto r = optimize(problem);
  CHECK_FALSE(r.feasible);
  CHECK(r.restarts == 2);
  CHECK(r.iterations_used == 9);
  CHECK(r.history.back().restart == 2);
  CHECK(std::isfinite(r.vdop_avg));
}

TEST_CASE("mutation keeps children admissible") {
  PlacementProblem problem;
  problem.mutation = true;
  problem.mutation_rate = 0.5;
  const auto pop = seed_population(problem);
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep)
    CHECK(is_admissible(crossover(pop[static_cast<std::size_t>(rep % 50)], pop[static_cast<std::size_t>((rep + 7) % 50)],
                                  problem, rng).beacons,
                        problem));
}

TEST_CASE("problem validation") {
  PlacementProblem p;
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.offspring = 10;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.parents = 60;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.hdop_tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.drone_domain.upper.z() = 4.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.min_separation = 100.0;
  CHECK_THROWS_AS(seed_population(bad), InfeasibleDomain);
}
