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

#include "usloc/dop.hpp"

#include <cmath>
#include <string>

namespace usloc {

std::string_view to_string(DopClass c) {
  switch (c) {
    case DopClass::MeasurementErrorOrRedundancy: return "measurement-error-or-redundancy";
    case DopClass::Ideal: return "ideal";
    case DopClass::VeryGood: return "very-good";
    case DopClass::Good: return "good";
    case DopClass::Medium: return "medium";
    case DopClass::Sufficient: return "sufficient";
    case DopClass::Bad: return "bad";
  }
  return "unknown";
}

namespace {

std::vector<double> axis(double lo, double hi, double step) {
  std::vector<double> v;
  const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

}  // namespace

std::vector<Point3d> DroneDomain::points() const {
  std::vector<Point3d> out;
  for (double x : axis(lower.x(), upper.x(), resolution))
    for (double y : axis(lower.y(), upper.y(), resolution))
      for (double z : axis(lower.z(), upper.z(), resolution)) out.emplace_back(x, y, z);
  return out;
}

void DroneDomain::validate(const Point3d& room) const {
  if (!(resolution > 0.0)) throw InvalidArgument("drone domain resolution must be positive");
  if ((upper.array() < lower.array()).any()) throw InvalidArgument("drone domain upper corner below lower corner");
  if (!strictly_inside<double>(lower, room) || !strictly_inside<double>(upper, room))
    throw InvalidArgument("drone domain must lie strictly inside the room");
}

DopAverage dop_average(const BeaconMatrix<double>& beacons, std::span<const Point3d> lattice, double condition_cap) {
  if (lattice.empty()) throw InvalidArgument("empty drone domain");
  DopAverage avg;
  for (const auto& p : lattice) {
    try {
      const auto r = dop_at(beacons, p, condition_cap);
      avg.hdop += r.hdop;
      avg.vdop += r.vdop;
      ++avg.points;
    } catch (const DegenerateGeometry&) {
      ++avg.degenerate;
    } catch (const InvalidArgument&) {
      ++avg.degenerate;  // lattice point on top of a beacon
    }
  }
  if (avg.degenerate > 0 && static_cast<double>(avg.degenerate) >= 0.01 * static_cast<double>(lattice.size()))
    throw DomainDegeneracy(std::to_string(avg.degenerate) + " of " + std::to_string(lattice.size()) +
                             " domain points are degenerate");
  avg.hdop /= static_cast<double>(avg.points);
  avg.vdop /= static_cast<double>(avg.points);
  return avg;
}

DopAverage dop_average(const BeaconLayout& layout, const DroneDomain& domain) {
  const auto pts = domain.points();
  return dop_average(BeaconMatrix<double>(layout.positions), pts);
}

double crb_2d(std::span<const double> beacon_angles, double sigma_r) {
  const std::size_t n = beacon_angles.size();
  if (n < 3) throw InvalidArgument("the 2-D bound needs at least three beacons");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += std::abs(std::sin(beacon_angles[i] - beacon_angles[j]));
  if (!(sum > 1e-12)) throw DegenerateGeometry("all beacon bearings are collinear");
  return sigma_r * std::sqrt(static_cast<double>(n) / sum);
}

}  // namespace usloc
