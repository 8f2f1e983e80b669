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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "robustpd/check.hpp"

namespace robustpd {

using Vec = std::vector<double>;

enum class Family { SumOfPowers, LinearPlusPower, SeparableGeneric };

const char* family_name(Family family) noexcept;

// One coordinate of a separable cost supplied by the caller. `value` must be
// convex, non-decreasing and vanish at 0; `derivative` must be its derivative.
struct ScalarPiece {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

struct ConjugateValue {
  double value = 0.0;
  // Maximizing u of <y,u> - psi(u), when it is available in closed form.
  std::optional<Vec> argmax_point;
};

// A "nice" cost psi: R^m_+ -> R_+ (convex, differentiable, non-decreasing,
// psi(0) = 0) with non-decreasing gradient and growth of order at most p.
//
// Every supported family is separable, so evaluation, gradients and the
// Fenchel conjugate all decompose per coordinate:
//   SumOfPowers       psi(u) = sum_i w_i u_i^p
//   LinearPlusPower   psi(u) = sum_i (l_i u_i)^p + sum_i c_i u_i
//   SeparableGeneric  psi(u) = sum_i psi_i(u_i), conjugate found numerically
//
// Instances are immutable and safe to share between threads.
class CostFunction {
 public:
  static CostFunction sum_of_powers(Vec weights, double p);
  static CostFunction linear_plus_power(Vec scales, Vec slopes, double p);
  static CostFunction separable_generic(std::vector<ScalarPiece> pieces, double p,
                                        bool homogeneous = false);

  std::size_t dim() const noexcept { return m_; }
  double order() const noexcept { return p_; }
  Family family() const noexcept { return family_; }
  bool separable() const noexcept { return true; }
  bool homogeneous() const noexcept { return homogeneous_; }

  // Family parameters. weights() holds w_i for SumOfPowers and l_i^p for
  // LinearPlusPower; scales()/slopes() are the LinearPlusPower l_i / c_i.
  const Vec& weights() const noexcept { return weights_; }
  const Vec& scales() const noexcept { return scales_; }
  const Vec& slopes() const noexcept { return slopes_; }

  double eval(std::span<const double> u) const;
  Vec grad(std::span<const double> u) const;
  ConjugateValue conjugate(std::span<const double> y) const;
  // Shorthand for conjugate(y).value.
  double conj(std::span<const double> y) const;
  double fenchel_gap(std::span<const double> u, std::span<const double> y) const;

  double coord_value(std::size_t i, double x) const;
  double coord_derivative(std::size_t i, double x) const;
  double coord_conjugate(std::size_t i, double y) const;

  // psi(p * 1), the additive loss that appears in every guarantee.
  double shift_value() const;

  // Split psi = psi_lin + psi_high. The linear part is returned as its
  // (constant) gradient; for SumOfPowers and SeparableGeneric it is zero.
  Vec linear_part_slopes() const;
  CostFunction high_part() const;

  friend bool operator==(const CostFunction& a, const CostFunction& b);

 private:
  CostFunction() = default;

  void check_point(std::span<const double> u, const char* what) const;
  double generic_conjugate(std::size_t i, double y) const;

  Family family_ = Family::SumOfPowers;
  std::size_t m_ = 0;
  double p_ = 2.0;
  bool homogeneous_ = false;
  Vec weights_;
  Vec scales_;
  Vec slopes_;
  std::vector<ScalarPiece> pieces_;
};

// One sample for the growth checks.
struct GrowthSample {
  Vec u;
  Vec y;
  double gamma = 1.0;  // >= 1
  double delta = 1.0;  // in (0, 1]
};

struct GrowthReport {
  CheckReport value_growth{"psi(g u) <= g^p psi(u)"};
  CheckReport gradient_growth{"grad psi(g u) <= g^(p-1) grad psi(u)"};
  CheckReport conjugate_scaling{"psi*(d y) <= d^(p/(p-1)) psi*(y)"};
  CheckReport conjugate_at_gradient{"psi*(grad psi(u)) <= p psi(u)"};
  CheckReport euler{"<grad psi(u), u> <= p psi(u)"};

  bool passed() const noexcept {
    return value_growth.passed() && gradient_growth.passed() &&
           conjugate_scaling.passed() && conjugate_at_gradient.passed() &&
           euler.passed();
  }
};

GrowthReport check_growth(const CostFunction& f,
                                std::span<const GrowthSample> samples);

struct SuperadditivityReport {
  double lower_slack = 0.0;  // psi(u+v) - psi(u) - psi(v)
  double upper_slack = 0.0;  // 2^(p-1)(psi(u) + psi(v)) - psi(u+v)
  bool passed = false;
};

// psi(u+v) >= psi(u) + psi(v) and psi(u+v) <= 2^(p-1) (psi(u) + psi(v)),
// both up to an absolute 1e-9.
SuperadditivityReport check_superadditivity(const CostFunction& f,
                                            std::span<const double> u,
                                            std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace robustpd
