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

#include "robustpd/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "robustpd/error.hpp"

namespace robustpd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sup_{u >= 0} y u - w u^p, for y >= 0.
double power_conjugate(double w, double p, double y) {
  if (y <= 0.0) return 0.0;
  if (w <= 0.0) return kInf;
  if (p == 1.0) return y <= w ? 0.0 : kInf;
  const double q = p / (p - 1.0);
  return (1.0 - 1.0 / p) * std::pow(w * p, -1.0 / (p - 1.0)) * std::pow(y, q);
}

double power_argmax(double w, double p, double y) {
  if (y <= 0.0 || w <= 0.0 || p == 1.0) return 0.0;
  return std::pow(y / (w * p), 1.0 / (p - 1.0));
}

void require_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    fail(ErrorKind::InvalidArgument, "growth order p must be a finite real >= 1");
  }
}

void require_nonnegative(const Vec& v, const char* what) {
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      fail(ErrorKind::InvalidArgument,
           std::string(what) + " must be finite and non-negative");
    }
  }
}

}  // namespace

const char* family_name(Family family) noexcept {
  switch (family) {
    case Family::SumOfPowers:
      return "SumOfPowers";
    case Family::LinearPlusPower:
      return "LinearPlusPower";
    case Family::SeparableGeneric:
      return "SeparableGeneric";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

CostFunction CostFunction::sum_of_powers(Vec weights, double p) {
  require_order(p);
  if (weights.empty()) fail(ErrorKind::Dimension, "cost dimension must be positive");
  require_nonnegative(weights, "SumOfPowers weights");
  CostFunction f;
  f.family_ = Family::SumOfPowers;
  f.m_ = weights.size();
  f.p_ = p;
  f.homogeneous_ = true;
  f.weights_ = std::move(weights);
  f.slopes_.assign(f.m_, 0.0);
  return f;
}

CostFunction CostFunction::linear_plus_power(Vec scales, Vec slopes, double p) {
  require_order(p);
  if (scales.empty()) fail(ErrorKind::Dimension, "cost dimension must be positive");
  if (scales.size() != slopes.size()) {
    fail(ErrorKind::Dimension, "LinearPlusPower scales and slopes differ in length");
  }
  require_nonnegative(scales, "LinearPlusPower scales");
  require_nonnegative(slopes, "LinearPlusPower slopes");
  CostFunction f;
  f.family_ = Family::LinearPlusPower;
  f.m_ = scales.size();
  f.p_ = p;
  f.homogeneous_ = std::all_of(slopes.begin(), slopes.end(),
                               [](double c) { return c == 0.0; });
  f.weights_.resize(f.m_);
  for (std::size_t i = 0; i < f.m_; ++i) f.weights_[i] = std::pow(scales[i], p);
  f.scales_ = std::move(scales);
  f.slopes_ = std::move(slopes);
  return f;
}

CostFunction CostFunction::separable_generic(std::vector<ScalarPiece> pieces,
                                             double p, bool homogeneous) {
  require_order(p);
  if (pieces.empty()) fail(ErrorKind::Dimension, "cost dimension must be positive");
  for (const auto& piece : pieces) {
    if (!piece.value || !piece.derivative) {
      fail(ErrorKind::InvalidArgument, "SeparableGeneric piece is missing a callable");
    }
    if (piece.value(0.0) != 0.0) {
      fail(ErrorKind::InvalidArgument, "SeparableGeneric piece must vanish at 0");
    }
  }
  CostFunction f;
  f.family_ = Family::SeparableGeneric;
  f.m_ = pieces.size();
  f.p_ = p;
  f.homogeneous_ = homogeneous;
  f.pieces_ = std::move(pieces);
  f.slopes_.assign(f.m_, 0.0);
  return f;
}

void CostFunction::check_point(std::span<const double> u, const char* what) const {
  if (u.size() != m_) {
    std::ostringstream os;
    os << what << " has dimension " << u.size() << ", expected " << m_;
    fail(ErrorKind::Dimension, os.str());
  }
  for (double x : u) {
    if (!(x >= 0.0)) {
      fail(ErrorKind::Domain, std::string(what) + " must be coordinate-wise non-negative");
    }
  }
}

double CostFunction::coord_value(std::size_t i, double x) const {
  switch (family_) {
    case Family::SumOfPowers:
      return weights_[i] * std::pow(x, p_);
    case Family::LinearPlusPower:
      return std::pow(scales_[i] * x, p_) + slopes_[i] * x;
    case Family::SeparableGeneric:
      return pieces_[i].value(x);
  }
  return 0.0;
}

double CostFunction::coord_derivative(std::size_t i, double x) const {
  switch (family_) {
    case Family::SumOfPowers:
      return weights_[i] * p_ * std::pow(x, p_ - 1.0);
    case Family::LinearPlusPower:
      return weights_[i] * p_ * std::pow(x, p_ - 1.0) + slopes_[i];
    case Family::SeparableGeneric:
      return pieces_[i].derivative(x);
  }
  return 0.0;
}

double CostFunction::coord_conjugate(std::size_t i, double y) const {
  switch (family_) {
    case Family::SumOfPowers:
      return power_conjugate(weights_[i], p_, y);
    case Family::LinearPlusPower:
      // The linear slope is absorbed first; psi_i* is flat at 0 up to c_i.
      return y <= slopes_[i] ? 0.0 : power_conjugate(weights_[i], p_, y - slopes_[i]);
    case Family::SeparableGeneric:
      return generic_conjugate(i, y);
  }
  return 0.0;
}

// Golden-section search of the concave map u -> y u - psi_i(u) on [0, U],
// where U doubles from 1 until psi_i'(U) exceeds y.
double CostFunction::generic_conjugate(std::size_t i, double y) const {
  const auto& piece = pieces_[i];
  if (y <= piece.derivative(0.0)) return 0.0;
  double hi = 1.0;
  while (piece.derivative(hi) <= y) {
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  auto objective = [&](double u) { return y * u - piece.value(u); };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double a = hi - ratio * (hi - lo);
  double b = lo + ratio * (hi - lo);
  double fa = objective(a);
  double fb = objective(b);
  for (int iter = 0; iter < 400 && hi - lo > 1e-10 * std::max(1.0, hi); ++iter) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = objective(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = objective(a);
    }
  }
  return std::max({0.0, fa, fb, objective(0.5 * (lo + hi))});
}

double CostFunction::eval(std::span<const double> u) const {
  check_point(u, "cost argument");
  double s = 0.0;
  for (std::size_t i = 0; i < m_; ++i) s += coord_value(i, u[i]);
  return s;
}

Vec CostFunction::grad(std::span<const double> u) const {
  check_point(u, "gradient argument");
  Vec g(m_);
  for (std::size_t i = 0; i < m_; ++i) g[i] = coord_derivative(i, u[i]);
  return g;
}

ConjugateValue CostFunction::conjugate(std::span<const double> y) const {
  check_point(y, "conjugate argument");
  ConjugateValue out;
  for (std::size_t i = 0; i < m_; ++i) out.value += coord_conjugate(i, y[i]);
  if (family_ != Family::SeparableGeneric && std::isfinite(out.value)) {
    Vec u(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const double shifted = family_ == Family::LinearPlusPower ? y[i] - slopes_[i] : y[i];
      u[i] = power_argmax(weights_[i], p_, shifted);
    }
    out.argmax_point = std::move(u);
  }
  return out;
}

double CostFunction::conj(std::span<const double> y) const {
  check_point(y, "conjugate argument");
  double s = 0.0;
  for (std::size_t i = 0; i < m_; ++i) s += coord_conjugate(i, y[i]);
  return s;
}

double CostFunction::fenchel_gap(std::span<const double> u,
                                 std::span<const double> y) const {
  return eval(u) + conj(y) - dot(y, u);
}

double CostFunction::shift_value() const { return eval(Vec(m_, p_)); }

Vec CostFunction::linear_part_slopes() const { return slopes_; }

CostFunction CostFunction::high_part() const {
  switch (family_) {
    case Family::LinearPlusPower:
      return sum_of_powers(weights_, p_);
    case Family::SumOfPowers:
    case Family::SeparableGeneric:
      return *this;
  }
  return *this;
}

bool operator==(const CostFunction& a, const CostFunction& b) {
  if (a.family_ != b.family_ || a.m_ != b.m_ || a.p_ != b.p_) return false;
  switch (a.family_) {
    case Family::SumOfPowers:
      return a.weights_ == b.weights_;
    case Family::LinearPlusPower:
      return a.scales_ == b.scales_ && a.slopes_ == b.slopes_;
    case Family::SeparableGeneric:
      return false;
  }
  return false;
}

GrowthReport check_growth(const CostFunction& f,
                                std::span<const GrowthSample> samples) {
  GrowthReport report;
  const double p = f.order();
  for (const auto& s : samples) {
    Vec scaled(s.u.size());
    for (std::size_t i = 0; i < s.u.size(); ++i) scaled[i] = s.gamma * s.u[i];
    const double psi_u = f.eval(s.u);
    report.value_growth.expect_le(f.eval(scaled), std::pow(s.gamma, p) * psi_u);

    const Vec g = f.grad(s.u);
    const Vec g_scaled = f.grad(scaled);
    const double factor = std::pow(s.gamma, p - 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      report.gradient_growth.expect_le(g_scaled[i], factor * g[i]);
    }

    if (p > 1.0) {
      Vec dy(s.y.size());
      for (std::size_t i = 0; i < s.y.size(); ++i) dy[i] = s.delta * s.y[i];
      report.conjugate_scaling.expect_le(f.conj(dy),
                                         std::pow(s.delta, p / (p - 1.0)) * f.conj(s.y));
    }
    report.conjugate_at_gradient.expect_le(f.conj(g), p * psi_u);
    report.euler.expect_le(dot(g, s.u), p * psi_u);
  }
  return report;
}

SuperadditivityReport check_superadditivity(const CostFunction& f,
                                            std::span<const double> u,
                                            std::span<const double> v) {
  Vec sum(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) sum[i] = u[i] + v[i];
  const double joint = f.eval(sum);
  const double pu = f.eval(u);
  const double pv = f.eval(v);
  const double scale = std::pow(2.0, f.order() - 1.0);
  SuperadditivityReport r;
  r.lower_slack = joint - pu - pv;
  r.upper_slack = scale * (pu + pv) - joint;
  const double tol = 1e-9 * std::max(1.0, joint);
  r.passed = r.lower_slack >= -tol && r.upper_slack >= -tol;
  return r;
}

}  // namespace robustpd
