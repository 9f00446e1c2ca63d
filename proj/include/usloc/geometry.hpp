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

#include <Eigen/Dense>

#include <cstddef>

#include "usloc/errors.hpp"

namespace usloc {

template <typename Scalar>
using Point3 = Eigen::Matrix<Scalar, 3, 1>;

using Point3d = Point3<double>;

// One beacon per row, columns x, y, z in meters.
template <typename Scalar>
using BeaconMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

inline constexpr std::size_t kNumBeacons = 4;

/// Positions of the four ultrasonic transmitters, one per row.
struct BeaconLayout {
  Eigen::Matrix<double, 4, 3> positions = Eigen::Matrix<double, 4, 3>::Zero();

  Point3d operator[](std::size_t i) const { return positions.row(static_cast<Eigen::Index>(i)).transpose(); }

  /// Throws InvalidArgument if two beacons coincide or a coordinate is not finite.
  void validate() const {
    if (!positions.allFinite()) throw InvalidArgument("beacon layout has non-finite coordinates");
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = i + 1; j < 4; ++j)
        if ((positions.row(i) - positions.row(j)).norm() < 1e-9)
          throw InvalidArgument("beacons " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
  }
};

inline BeaconLayout make_layout(const Point3d& a, const Point3d& b, const Point3d& c, const Point3d& d) {
  BeaconLayout layout;
  layout.positions.row(0) = a.transpose();
  layout.positions.row(1) = b.transpose();
  layout.positions.row(2) = c.transpose();
  layout.positions.row(3) = d.transpose();
  return layout;
}

// Reference layout used for the preliminary 5 x 5 x 4 m room experiments.
inline BeaconLayout original_layout() {
  return make_layout({2.5, 0.0, 1.5}, {5.0, 2.5, 2.5}, {2.5, 5.0, 2.0}, {0.0, 5.0, 3.0});
}

// Layout produced by the evolutionary placement search for the same room.
inline BeaconLayout optimized_layout() {
  return make_layout({4.5, 0.0, 2.5}, {5.0, 4.0, 3.5}, {1.0, 5.0, 2.0}, {1.5, 2.0, 4.0});
}

inline Point3d default_room() { return {5.0, 5.0, 4.0}; }

template <typename Scalar>
bool strictly_inside(const Point3<Scalar>& p, const Point3<Scalar>& room) {
  return (p.array() > Scalar(0)).all() && (p.array() < room.array()).all();
}

template <typename Scalar>
bool inside_or_on(const Point3<Scalar>& p, const Point3<Scalar>& room) {
  return (p.array() >= Scalar(0)).all() && (p.array() <= room.array()).all();
}

}  // namespace usloc
