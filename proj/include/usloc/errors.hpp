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

#include <stdexcept>
#include <string>

namespace usloc {

// Bad input to a pure function: wrong sizes, non-power-of-two orders, mismatched rates.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Trilateration matrix lost column rank (collinear / coplanar beacons).
class SingularGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// U^T U is singular or its condition number exceeds the configured cap.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// More than the tolerated share of drone-domain points are degenerate.
class DomainDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoPeak : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Beacon domain cannot host a separated set of four beacons.
class InfeasibleDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& detail, const std::string& source = {})
      : std::runtime_error(format(line, detail, source)), line_(line), detail_(detail) {}

  // 1-based line in the config file, 0 when the error is not tied to a line.
  int line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(int line, const std::string& detail, const std::string& source) {
    std::string where = source;
    if (line > 0) where += (where.empty() ? "line " : ":") + std::to_string(line);
    return where.empty() ? detail : where + ": " + detail;
  }

  int line_;
  std::string detail_;
};

}  // namespace usloc
