// Copyright 2026 The robustpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robustpd/check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace robustpd {

namespace {

std::string describe(double lhs, double rhs, std::string_view where) {
  std::ostringstream os;
  os.precision(17);
  if (!where.empty()) os << where << ": ";
  os << "lhs=" << lhs << " rhs=" << rhs;
  return os.str();
}

}  // namespace

void CheckReport::expect_le(double lhs, double rhs, double tol,
                            std::string_view where) {
  ++evaluated;
  double slack;
  if (std::isnan(lhs) || std::isnan(rhs)) {
    slack = -std::numeric_limits<double>::infinity();
  } else if (rhs == std::numeric_limits<double>::infinity()) {
    slack = std::numeric_limits<double>::infinity();
  } else if (lhs == -std::numeric_limits<double>::infinity()) {
    slack = std::numeric_limits<double>::infinity();
  } else if (std::isinf(lhs) || std::isinf(rhs)) {
    slack = -std::numeric_limits<double>::infinity();
  } else {
    slack = (rhs - lhs) / std::max(1.0, std::abs(rhs));
  }
  worst_slack = std::min(worst_slack, slack);
  if (!(slack >= -tol)) {
    if (violations == 0) first_violation = describe(lhs, rhs, where);
    ++violations;
  }
}

void CheckReport::expect_eq(double lhs, double rhs, double tol,
                            std::string_view where) {
  ++evaluated;
  const double gap = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
  const double slack = std::isnan(gap) ? -std::numeric_limits<double>::infinity()
                                       : -gap;
  worst_slack = std::min(worst_slack, slack);
  if (!(gap <= tol)) {
    if (violations == 0) first_violation = describe(lhs, rhs, where);
    ++violations;
  }
}

void CheckReport::expect_true(bool ok, std::string_view where) {
  ++evaluated;
  if (!ok) {
    if (violations == 0) first_violation = std::string(where);
    ++violations;
    worst_slack = std::min(worst_slack, -1.0);
  } else {
    worst_slack = std::min(worst_slack, 0.0);
  }
}

void CheckReport::merge(const CheckReport& other) {
  if (violations == 0 && other.violations != 0) {
    first_violation = other.first_violation;
  }
  evaluated += other.evaluated;
  violations += other.violations;
  worst_slack = std::min(worst_slack, other.worst_slack);
}

}  // namespace robustpd
