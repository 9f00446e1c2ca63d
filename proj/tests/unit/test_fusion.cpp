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

#include <algorithm>
#include <random>

#include "usloc/fusion.hpp"

using namespace usloc;

TEST_CASE("weighted height examples") {
  CHECK(fuse_height(1.0, 1.1, {0.2, 0.8}) == doctest::Approx(1.08).epsilon(1e-12));
  CHECK(fuse_height(1.37, 2.0, {1.0, 0.0}) == 1.37);
  CHECK(fuse_height(1.37, 2.0, {0.0, 1.0}) == 2.0);
  CHECK_THROWS_AS(fuse_height(1.0, 1.0, {0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(fuse_height(1.0, 1.0, {-0.1, 1.1}), InvalidArgument);
}

TEST_CASE("fused height lies between its inputs") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 4.0), w(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng), b = u(rng), w1 = w(rng);
    const double f = fuse_height(a, b, {w1, 1.0 - w1});
    CHECK(f >= std::min(a, b) - 1e-12);
    CHECK(f <= std::max(a, b) + 1e-12);
  }
}

TEST_CASE("echo height inversion") {
  const auto m = height_from_echo(2.0 * 2.5 / 343.0, 4.0, 343.0);
  CHECK(m.derived_height == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(height_from_echo(-1e-3, 4.0, 343.0).derived_height == 4.0);
  CHECK(height_from_echo(1.0, 4.0, 343.0).derived_height == 0.0);
}

TEST_CASE("simulated echoes are unbiased with the configured jitter") {
  std::mt19937_64 rng(4);
  const double noise = 10e-6;
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double h = simulate_ceiling_echo(1.2, 4.0, 343.0, noise, rng).derived_height;
    sum += h;
    sq += h * h;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(mean == doctest::Approx(1.2).epsilon(1e-4));
  CHECK(sd == doctest::Approx(343.0 * noise / 2.0).epsilon(0.05));
  CHECK_THROWS_AS(simulate_ceiling_echo(4.0, 4.0, 343.0, noise, rng), InvalidArgument);
  CHECK_THROWS_AS(simulate_ceiling_echo(0.0, 4.0, 343.0, noise, rng), InvalidArgument);
}

TEST_CASE("obstructions only ever shorten the echo") {
  std::mt19937_64 rng(9);
  int short_reads = 0;
  for (int i = 0; i < 5000; ++i) {
    const double h = simulate_ceiling_echo(1.0, 4.0, 343.0, 0.0, rng, 0.3).derived_height;
    CHECK(h >= 1.0 - 1e-12);
    short_reads += h > 1.0 + 1e-9;
  }
  CHECK(static_cast<double>(short_reads) / 5000 == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("inverse-variance weights do not increase the variance") {
  const double v1 = 4e-6, v2 = 1e-6;
  const auto w = FusionWeights::inverse_variance(v1, v2);
  CHECK(w.w1 + w.w2 == doctest::Approx(1.0));
  CHECK(w.w1 == doctest::Approx(0.2));
  std::mt19937_64 rng(12);
  std::normal_distribution<double> e1(0.0, std::sqrt(v1)), e2(0.0, std::sqrt(v2));
  double s = 0.0, ss = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double f = fuse_height(1.5 + e1(rng), 1.5 + e2(rng), w);
    s += f;
    ss += f * f;
  }
  const double var = ss / n - (s / n) * (s / n);
  CHECK(var <= std::min(v1, v2));
  CHECK(var == doctest::Approx(v1 * v2 / (v1 + v2)).epsilon(0.05));
  CHECK_THROWS_AS(FusionWeights::inverse_variance(0.0, 1.0), InvalidArgument);
}
