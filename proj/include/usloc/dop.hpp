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

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "usloc/errors.hpp"
#include "usloc/geometry.hpp"

namespace usloc {

// Geometry quality bands for GDOP. Edges are half-open: [1,2) VeryGood,
// [2,5) Good, [5,10) Medium, [10,20) Sufficient, [20,inf) Bad; exactly 1 is
// Ideal and anything below 1 signals measurement error or redundancy.
enum class DopClass { MeasurementErrorOrRedundancy, Ideal, VeryGood, Good, Medium, Sufficient, Bad };

std::string_view to_string(DopClass c);

inline DopClass classify_gdop(double gdop) {
  if (gdop < 1.0) return DopClass::MeasurementErrorOrRedundancy;
  if (gdop == 1.0) return DopClass::Ideal;
  if (gdop < 2.0) return DopClass::VeryGood;
  if (gdop < 5.0) return DopClass::Good;
  if (gdop < 10.0) return DopClass::Medium;
  if (gdop < 20.0) return DopClass::Sufficient;
  return DopClass::Bad;
}

template <typename Scalar>
struct DopReport {
  Scalar hdop = Scalar(0);
  Scalar vdop = Scalar(0);
  Scalar gdop = Scalar(0);
  DopClass classification = DopClass::Bad;
};

inline constexpr double kDefaultConditionCap = 1e8;

/// Unit vectors from the target to each beacon, one row per beacon.
template <typename Derived>
BeaconMatrix<typename Derived::Scalar> geometry_matrix(const Eigen::MatrixBase<Derived>& beacons,
                                                       const Point3<typename Derived::Scalar>& target) {
  using Scalar = typename Derived::Scalar;
  BeaconMatrix<Scalar> u = beacons.rowwise() - target.transpose();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const Scalar r = u.row(i).norm();
    if (!(r > Scalar(0))) throw InvalidArgument("target coincides with beacon " + std::to_string(i));
    u.row(i) /= r;
  }
  return u;
}

/// Q = (U^T U)^-1; throws DegenerateGeometry when cond(U^T U) exceeds the cap.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> dop_covariance(const BeaconMatrix<Scalar>& u, double condition_cap = kDefaultConditionCap) {
  const Eigen::Matrix<Scalar, 3, 3> normal = u.transpose() * u;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 3, 3>> eig;
  eig.computeDirect(normal, Eigen::EigenvaluesOnly);
  const Scalar lo = eig.eigenvalues()(0);
  const Scalar hi = eig.eigenvalues()(2);
  if (!(lo > Scalar(0)) || hi / lo > Scalar(condition_cap))
    throw DegenerateGeometry("U^T U is singular or ill-conditioned");
  return normal.ldlt().solve(Eigen::Matrix<Scalar, 3, 3>::Identity());
}

template <typename Derived>
DopReport<typename Derived::Scalar> dop_at(const Eigen::MatrixBase<Derived>& beacons,
                                           const Point3<typename Derived::Scalar>& target,
                                           double condition_cap = kDefaultConditionCap) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, 3, 3> q = dop_covariance<Scalar>(geometry_matrix(beacons, target), condition_cap);
  DopReport<Scalar> report;
  report.hdop = std::sqrt(q(0, 0) + q(1, 1));
  report.vdop = std::sqrt(q(2, 2));
  report.gdop = std::sqrt(q.trace());
  report.classification = classify_gdop(static_cast<double>(report.gdop));
  return report;
}

inline DopReport<double> dop_at(const BeaconLayout& layout, const Point3d& target) {
  return dop_at(layout.positions, target);
}

/// Regular lattice of candidate drone positions inside an axis-aligned box.
struct DroneDomain {
  Point3d lower{0.5, 0.5, 0.5};
  Point3d upper{4.5, 4.5, 3.0};
  double resolution = 0.5;

  std::vector<Point3d> points() const;
  // Throws InvalidArgument if the box is empty or not strictly inside the room.
  void validate(const Point3d& room) const;
};

struct DopAverage {
  double hdop = 0.0;
  double vdop = 0.0;
  std::size_t points = 0;      // lattice points used
  std::size_t degenerate = 0;  // lattice points skipped
};

// Mean HDOP and VDOP over the lattice. Degenerate points are skipped while
// they stay under 1% of the lattice; otherwise DomainDegeneracy is thrown.
DopAverage dop_average(const BeaconMatrix<double>& beacons, std::span<const Point3d> lattice,
                       double condition_cap = kDefaultConditionCap);
DopAverage dop_average(const BeaconLayout& layout, const DroneDomain& domain);

/// 2-D Cramer-Rao bound sigma_r * sqrt(N / sum_{i<j} |sin(theta_i - theta_j)|).
double crb_2d(std::span<const double> beacon_angles, double sigma_r);

}  // namespace usloc
