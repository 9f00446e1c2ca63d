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

#include "usloc/errors.hpp"
#include "usloc/geometry.hpp"

namespace usloc {

template <typename Scalar>
struct PositionFix {
  Point3<Scalar> position = Point3<Scalar>::Zero();
  Scalar residual_norm = Scalar(0);  // ||A x - b|| of the linear system
};

// Linear system A x = b obtained by subtracting the last beacon's sphere
// equation from every other one:
//   A_i = 2 (p_n - p_i)
//   b_i = d_i^2 - d_n^2 - |p_i|^2 + |p_n|^2
template <typename Derived, typename RangeDerived>
void trilateration_system(const Eigen::MatrixBase<Derived>& beacons, const Eigen::MatrixBase<RangeDerived>& ranges,
                          BeaconMatrix<typename Derived::Scalar>& a,
                          Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>& b) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = beacons.rows();
  if (beacons.cols() != 3) throw InvalidArgument("beacon matrix must have three columns");
  if (ranges.size() != n) throw InvalidArgument("one range per beacon required");
  if (n < 4) throw InvalidArgument("trilateration needs at least four beacons");

  const auto ref = beacons.row(n - 1);
  const Scalar ref_sq = ref.squaredNorm();
  const Scalar d_ref = ranges(n - 1);
  a.resize(n - 1, 3);
  b.resize(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    a.row(i) = Scalar(2) * (ref - beacons.row(i));
    b(i) = ranges(i) * ranges(i) - d_ref * d_ref - beacons.row(i).squaredNorm() + ref_sq;
  }
}

/// Least-squares position from ranges to n >= 4 beacons (one per row).
/// Throws SingularGeometry when A loses column rank.
template <typename Derived, typename RangeDerived>
PositionFix<typename Derived::Scalar> trilaterate(const Eigen::MatrixBase<Derived>& beacons,
                                                  const Eigen::MatrixBase<RangeDerived>& ranges) {
  using Scalar = typename Derived::Scalar;
  BeaconMatrix<Scalar> a;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b;
  trilateration_system(beacons, ranges, a, b);
  if (!a.allFinite() || !b.allFinite()) throw InvalidArgument("non-finite beacon or range input");

  // Column-pivoted QR solves the normal equations without forming (A^T A)^-1.
  Eigen::ColPivHouseholderQR<BeaconMatrix<Scalar>> qr(a);
  qr.setThreshold(Scalar(1e-10));
  if (qr.rank() < 3) throw SingularGeometry("beacon geometry is rank deficient (collinear or coplanar)");

  PositionFix<Scalar> fix;
  fix.position = qr.solve(b);
  fix.residual_norm = (a * fix.position - b).norm();
  return fix;
}

// Gauss-Newton polish on the range residuals |x - p_i| - d_i, started from
// `initial`. Used where the estimator should attain the DOP covariance.
template <typename Derived, typename RangeDerived>
Point3<typename Derived::Scalar> refine_position(const Eigen::MatrixBase<Derived>& beacons,
                                                 const Eigen::MatrixBase<RangeDerived>& ranges,
                                                 Point3<typename Derived::Scalar> initial, int max_iterations = 20) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = beacons.rows();
  Point3<Scalar> x = initial;
  for (int it = 0; it < max_iterations; ++it) {
    BeaconMatrix<Scalar> jac(n, 3);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> res(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Point3<Scalar> diff = x - beacons.row(i).transpose();
      const Scalar r = diff.norm();
      if (r <= Scalar(0)) throw DegenerateGeometry("iterate coincides with a beacon");
      jac.row(i) = (diff / r).transpose();
      res(i) = r - ranges(i);
    }
    const Point3<Scalar> step = jac.colPivHouseholderQr().solve(res);
    x -= step;
    if (step.norm() < Scalar(1e-13)) break;
  }
  return x;
}

inline PositionFix<double> trilaterate(const BeaconLayout& layout, const Eigen::Vector4d& ranges) {
  return trilaterate(layout.positions, ranges);
}

}  // namespace usloc
