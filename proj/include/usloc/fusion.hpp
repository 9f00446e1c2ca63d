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

#include <algorithm>
#include <cmath>
#include <random>

#include "usloc/errors.hpp"

namespace usloc {

/// Ceiling echo reading from an upward-facing rangefinder.
struct HeightMeasurement {
  double round_trip_time = 0.0;  // s
  double ceiling_height = 0.0;   // m, room height H
  double derived_height = 0.0;   // m, H - c t / 2 clamped to [0, H]
};

struct FusionWeights {
  double w1 = 0.2;  // trilateration z
  double w2 = 0.8;  // ceiling rangefinder

  void validate() const {
    if (w1 < 0.0 || w1 > 1.0 || w2 < 0.0 || w2 > 1.0 || std::abs(w1 + w2 - 1.0) > 1e-12)
      throw InvalidArgument("fusion weights must lie in [0, 1] and sum to 1");
  }

  /// Weights proportional to 1 / variance.
  static FusionWeights inverse_variance(double var_z, double var_height) {
    if (!(var_z > 0.0) || !(var_height > 0.0)) throw InvalidArgument("variances must be positive");
    const double w1 = var_height / (var_z + var_height);
    return {w1, 1.0 - w1};
  }
};

inline HeightMeasurement height_from_echo(double round_trip_time, double ceiling_height, double speed_of_sound) {
  HeightMeasurement m;
  m.round_trip_time = round_trip_time;
  m.ceiling_height = ceiling_height;
  m.derived_height = std::clamp(ceiling_height - speed_of_sound * round_trip_time / 2.0, 0.0, ceiling_height);
  return m;
}

// Echo time 2 (H - h) / c plus Gaussian timing jitter. With probability
// `outlier_probability` the pulse bounces off an obstruction at a uniformly
// random point between the drone and the ceiling.
template <typename Rng>
HeightMeasurement simulate_ceiling_echo(double true_height, double ceiling_height, double speed_of_sound,
                                        double noise_std, Rng& rng, double outlier_probability = 0.0) {
  if (!(true_height > 0.0) || !(true_height < ceiling_height))
    throw InvalidArgument("true height must lie strictly between floor and ceiling");
  if (!(speed_of_sound > 0.0) || noise_std < 0.0) throw InvalidArgument("bad echo parameters");

  double gap = ceiling_height - true_height;
  if (outlier_probability > 0.0) {
    std::bernoulli_distribution blocked(outlier_probability);
    if (blocked(rng)) gap *= std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  double t = 2.0 * gap / speed_of_sound;
  if (noise_std > 0.0) t += std::normal_distribution<double>(0.0, noise_std)(rng);
  return height_from_echo(t, ceiling_height, speed_of_sound);
}

inline double fuse_height(double z_trilateration, double height_from_ceiling, const FusionWeights& weights) {
  weights.validate();
  return weights.w1 * z_trilateration + weights.w2 * height_from_ceiling;
}

}  // namespace usloc
