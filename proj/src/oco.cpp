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

#include "robustpd/oco.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "robustpd/error.hpp"

namespace robustpd {

namespace {

constexpr double kGammaMatch = 1e-12;
constexpr double kCompleteTolerance = 1e-9;

bool run_complete(const OcoState& state) {
  return std::abs(state.cumulative_gamma() - 1.0) <= kCompleteTolerance;
}

}  // namespace

const char* mutation_name(Mutation m) noexcept {
  switch (m) {
    case Mutation::None:
      return "none";
    case Mutation::NoShift:
      return "no-shift";
    case Mutation::NoRegularizer:
      return "no-regularizer";
  }
  return "unknown";
}

Vec ssftrl_argument(double p, std::span<const double> cum_load, double cum_gamma,
                    double extra, double shift) {
  const double denom = 4.0 * (1.0 + cum_gamma + extra);
  Vec w(cum_load.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = (shift * 4.0 * p + cum_load[i]) / denom;
  }
  return w;
}

OcoState::OcoState(CostFunction f, double gamma_bar, Mutation mutation)
    : f_(std::move(f)), gamma_bar_(gamma_bar), mutation_(mutation),
      cum_load_(f_.dim(), 0.0) {
  const double cap = 1.0 / (4.0 * f_.order());
  if (!(gamma_bar >= 0.0) || gamma_bar > cap * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "gamma_bar=" << gamma_bar << " exceeds 1/(4p)=" << cap;
    fail(ErrorKind::Configuration, os.str());
  }
  ledger_.shift_value = f_.shift_value();
  ledger_.join.assign(f_.dim(), 0.0);
  const Vec first = ftl_iterate();
  ledger_.initial_gain = 4.0 * f_.order() * std::accumulate(first.begin(), first.end(), 0.0) -
                         4.0 * f_.conj(first);
}

double OcoState::cumulative_gamma() const noexcept {
  return static_cast<double>(gamma_steps_) * gamma_bar_;
}

Vec OcoState::iterate_argument() const {
  const double shift = mutation_ == Mutation::NoShift ? 0.0 : 1.0;
  const double extra = mutation_ == Mutation::NoRegularizer ? 0.0 : gamma_bar_;
  return ssftrl_argument(f_.order(), cum_load_, cumulative_gamma(), extra, shift);
}

Vec OcoState::next_iterate() const { return f_.grad(iterate_argument()); }

Vec OcoState::ftl_iterate() const {
  return f_.grad(ssftrl_argument(f_.order(), cum_load_, cumulative_gamma(), 0.0));
}

LedgerDelta OcoState::observe(std::span<const double> load, double gamma) {
  if (load.size() != f_.dim()) {
    fail(ErrorKind::Dimension, "observed load has the wrong dimension");
  }
  for (double x : load) {
    if (!(x >= 0.0 && x <= 1.0)) {
      fail(ErrorKind::Domain, "observed load must lie in [0,1]^m");
    }
  }
  const bool active = gamma != 0.0;
  if (active && std::abs(gamma - gamma_bar_) > kGammaMatch * std::max(gamma_bar_, 1e-300)) {
    fail(ErrorKind::InvalidArgument, "gamma_t must be either 0 or gamma_bar");
  }
  if (active &&
      static_cast<double>(gamma_steps_ + 1) * gamma_bar_ > 1.0 + gamma_bar_ + 1e-12) {
    fail(ErrorKind::Configuration, "cumulative gamma would exceed 1 + gamma_bar");
  }

  OcoStep step;
  step.argument = iterate_argument();
  step.iterate = f_.grad(step.argument);
  step.load.assign(load.begin(), load.end());
  step.gamma = active ? gamma_bar_ : 0.0;
  step.iterate_conjugate = f_.conj(step.iterate);
  step.inner = dot(step.iterate, load);
  step.half_fake_gain = 0.5 * step.inner - step.gamma * step.iterate_conjugate;

  for (std::size_t i = 0; i < cum_load_.size(); ++i) cum_load_[i] += load[i];
  if (active) ++gamma_steps_;

  step.ftl_next = ftl_iterate();
  step.ftl_gain = dot(step.ftl_next, load) - 4.0 * step.gamma * f_.conj(step.ftl_next);

  LedgerDelta delta{step.half_fake_gain, step.inner, step.ftl_gain, step.iterate_conjugate};
  ledger_.half_fake_gain += delta.half_fake_gain;
  ledger_.inner += delta.inner;
  ledger_.ftl_gain += delta.ftl_gain;
  ledger_.max_conjugate = std::max(ledger_.max_conjugate, step.iterate_conjugate);
  for (std::size_t i = 0; i < ledger_.join.size(); ++i) {
    ledger_.join[i] = std::max(ledger_.join[i], step.iterate[i]);
  }
  history_.push_back(std::move(step));
  return delta;
}

BtlReport check_btl(const OcoState& state) {
  BtlReport report;
  const CostFunction& f = state.cost();
  const double p = f.order();
  const auto& ledger = state.ledger();
  report.initial.expect_eq(ledger.initial_gain, 4.0 * ledger.shift_value);

  Vec cum(f.dim(), 0.0);
  std::size_t steps = 0;
  double lhs = ledger.initial_gain;
  report.prefix.expect_le(4.0 * ledger.shift_value, lhs, kCheckTolerance, "t=0");
  const auto& hist = state.history();
  for (std::size_t t = 0; t < hist.size(); ++t) {
    for (std::size_t i = 0; i < cum.size(); ++i) cum[i] += hist[t].load[i];
    if (hist[t].gamma != 0.0) ++steps;
    const double g = static_cast<double>(steps) * state.gamma_bar();
    lhs += hist[t].ftl_gain;
    const double rhs = 4.0 * (1.0 + g) * f.eval(ssftrl_argument(p, cum, g, 0.0));
    report.prefix.expect_le(rhs, lhs, kCheckTolerance, "t=" + std::to_string(t + 1));
  }
  return report;
}

StabilityReport check_stability(const OcoState& state) {
  StabilityReport report;
  const CostFunction& f = state.cost();
  const double p = f.order();
  const double ratio_cap = std::pow(2.0, 1.0 / p) * (1.0 + 1e-12);
  Vec cum(f.dim(), 0.0);
  std::size_t steps = 0;
  const auto& hist = state.history();
  for (std::size_t t = 0; t < hist.size(); ++t) {
    const auto& s = hist[t];
    const std::string where = "t=" + std::to_string(t + 1);
    for (std::size_t j = 0; j < f.dim(); ++j) {
      report.lower.expect_le(s.iterate[j], s.ftl_next[j], kCheckTolerance, where);
      report.upper.expect_le(s.ftl_next[j], 2.0 * s.iterate[j], kCheckTolerance, where);
    }
    for (std::size_t i = 0; i < cum.size(); ++i) cum[i] += s.load[i];
    if (s.gamma != 0.0) ++steps;
    const Vec next_arg =
        ssftrl_argument(p, cum, static_cast<double>(steps) * state.gamma_bar(), 0.0);
    for (std::size_t j = 0; j < f.dim(); ++j) {
      const double ratio = s.argument[j] > 0.0
                               ? next_arg[j] / s.argument[j]
                               : std::numeric_limits<double>::infinity();
      report.argument_ratio.expect_le(1.0, ratio, 1e-12, where);
      report.argument_ratio.expect_le(ratio, ratio_cap, 1e-12, where);
    }
  }
  return report;
}

DominationCertificate dominating_set(const OcoState& state) {
  if (!run_complete(state)) {
    fail(ErrorKind::Structural, "dominating set needs a complete run with sum gamma_t = 1");
  }
  const auto& hist = state.history();
  const double gbar = state.gamma_bar();
  const std::size_t n = hist.size();
  std::vector<double> cum_gamma(n);
  std::size_t steps = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (hist[t].gamma != 0.0) ++steps;
    cum_gamma[t] = static_cast<double>(steps) * gbar;
  }

  DominationCertificate cert;
  const auto k = static_cast<std::size_t>(std::ceil(state.cost().order() - 1e-9));
  for (std::size_t i = 1; i <= k; ++i) {
    const double lo = std::pow(2.0, static_cast<double>(i) / static_cast<double>(k)) - 1.0;
    const double hi = lo + gbar;
    // Latest time whose cumulative gamma lies in [lo, hi].
    std::size_t chosen = 0;
    for (std::size_t t = n; t >= 1; --t) {
      const double g = cum_gamma[t - 1];
      if (g >= lo - 1e-12 && g <= hi + 1e-12) {
        chosen = t;
        break;
      }
    }
    if (chosen == 0) {
      fail(ErrorKind::Structural,
           "no time with cumulative gamma in interval " + std::to_string(i));
    }
    cert.times.push_back(chosen);
  }
  cert.check.expect_true(cert.times.size() <= k, "|T| <= ceil(p)");

  cert.witness.resize(n);
  for (std::size_t t = 1; t <= n; ++t) {
    auto it = std::lower_bound(cert.times.begin(), cert.times.end(), t);
    if (it == cert.times.end()) {
      fail(ErrorKind::Structural, "time " + std::to_string(t) + " has no witness");
    }
    cert.witness[t - 1] = *it;
    const Vec& y = hist[t - 1].iterate;
    const Vec& yw = hist[*it - 1].iterate;
    for (std::size_t j = 0; j < y.size(); ++j) {
      cert.check.expect_le(y[j], std::numbers::e * yw[j], kCheckTolerance,
                           "t=" + std::to_string(t));
      double ratio = 0.0;
      if (yw[j] > 0.0) {
        ratio = y[j] / yw[j];
      } else if (y[j] > 0.0) {
        ratio = std::numeric_limits<double>::infinity();
      }
      cert.max_ratio = std::max(cert.max_ratio, ratio);
    }
  }
  return cert;
}

RegretBoundsReport check_regret_bounds(const OcoState& state) {
  RegretBoundsReport report;
  const CostFunction& f = state.cost();
  const double p = f.order();
  const auto& ledger = state.ledger();
  const double shift = ledger.shift_value;

  Vec cum(f.dim(), 0.0);
  std::size_t steps = 0;
  double half = 0.0;
  double inner = 0.0;
  const auto& hist = state.history();
  for (std::size_t t = 0; t < hist.size(); ++t) {
    const auto& s = hist[t];
    const std::string where = "t=" + std::to_string(t + 1);
    for (std::size_t i = 0; i < cum.size(); ++i) cum[i] += s.load[i];
    if (s.gamma != 0.0) ++steps;
    const double g = static_cast<double>(steps) * state.gamma_bar();
    half += s.half_fake_gain;
    inner += s.inner;
    report.regret_prefix.expect_le(f.eval(ssftrl_argument(p, cum, g, 0.0)) - shift, half,
                                   kCheckTolerance, where);
    report.size_control_prefix.expect_le(s.iterate_conjugate / p, inner + shift,
                                         kCheckTolerance, where);
  }

  if (run_complete(state)) {
    Vec eighth(cum.size());
    for (std::size_t i = 0; i < cum.size(); ++i) eighth[i] = cum[i] / 8.0;
    report.regret.expect_le(f.eval(eighth) - shift, ledger.half_fake_gain);
    report.size_control.expect_le(ledger.max_conjugate / p, ledger.inner + shift);
    if (f.separable()) {
      report.separable_size.expect_le(f.conj(ledger.join) / p, ledger.inner + shift);
    }
  }
  return report;
}

}  // namespace robustpd
