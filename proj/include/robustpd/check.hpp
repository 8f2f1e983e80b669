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

#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>

namespace robustpd {

// Absolute slack allowed after normalizing by max(1, |rhs|).
inline constexpr double kCheckTolerance = 1e-8;

// Accumulates the outcome of one family of inequality checks.
struct CheckReport {
  std::string name;
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  // Smallest normalized slack (rhs - lhs) / max(1, |rhs|) seen so far.
  double worst_slack = std::numeric_limits<double>::infinity();
  std::string first_violation;

  CheckReport() = default;
  explicit CheckReport(std::string n) : name(std::move(n)) {}

  // Records the claim lhs <= rhs.
  void expect_le(double lhs, double rhs, double tol = kCheckTolerance,
                 std::string_view where = {});
  // Records |lhs - rhs| within tol after normalization.
  void expect_eq(double lhs, double rhs, double tol = kCheckTolerance,
                 std::string_view where = {});
  void expect_true(bool ok, std::string_view where = {});

  void merge(const CheckReport& other);
  bool passed() const noexcept { return violations == 0; }
};

}  // namespace robustpd
