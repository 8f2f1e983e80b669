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

#include "robustpd/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "robustpd/error.hpp"

namespace robustpd {

namespace {

void require_unit_box(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) {
      fail(ErrorKind::Domain, std::string(what) + " must lie in [0,1]^m");
    }
  }
}

void require_run_length(std::size_t n, double p) {
  if (static_cast<double>(n) < 4.0 * p * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "run length n=" << n << " is below 4p=" << 4.0 * p
       << " (gamma_bar = 1/n must be at most 1/(4p))";
    fail(ErrorKind::Configuration, os.str());
  }
}

}  // namespace

const char* origin_name(Origin o) noexcept {
  switch (o) {
    case Origin::Adversarial:
      return "adv";
    case Origin::Stochastic:
      return "stoch";
    case Origin::Unknown:
      return "unknown";
  }
  return "unknown";
}

FeasibleSet::FeasibleSet(std::vector<Vec> options) : options_(std::move(options)) {
  if (options_.empty()) fail(ErrorKind::InvalidArgument, "feasible set must be nonempty");
  const std::size_t m = options_.front().size();
  if (m == 0) fail(ErrorKind::Dimension, "feasible set options must have positive dimension");
  for (const auto& v : options_) {
    if (v.size() != m) fail(ErrorKind::Dimension, "feasible set options differ in dimension");
    require_unit_box(v, "feasible set option");
  }
}

BestResponse best_response(std::span<const double> y, const FeasibleSet& options,
                           double gamma, const CostFunction& f) {
  if (y.size() != options.dim()) {
    fail(ErrorKind::Dimension, "dual and options differ in dimension");
  }
  BestResponse best;
  double best_inner = dot(y, options[0]);
  for (std::size_t k = 1; k < options.size(); ++k) {
    const double inner = dot(y, options[k]);
    if (inner < best_inner) {
      best_inner = inner;
      best.index = k;
    }
  }
  best.fake_cost = best_inner - (gamma == 0.0 ? 0.0 : gamma * f.conj(y));
  return best;
}

double OcpRunTrace::fake_cost_total() const {
  double s = 0.0;
  for (const auto& step : steps) s += step.fake_cost;
  return s;
}

namespace {

template <typename Choose>
OcpRunTrace run_loop(std::size_t n, const CostFunction& f, Mutation mutation,
                     Choose&& choose) {
  require_run_length(n, f.order());
  const double gamma = 1.0 / static_cast<double>(n);
  OcpRunTrace trace{{}, gamma, Vec(f.dim(), 0.0), 0.0, OcoState(f, gamma, mutation)};
  trace.steps.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    OcpStepRecord rec;
    rec.dual = trace.oco.next_iterate();
    rec.dual_conjugate = f.conj(rec.dual);
    choose(t, rec);
    rec.fake_cost = dot(rec.dual, rec.choice) - gamma * rec.dual_conjugate;
    trace.oco.observe(rec.choice, gamma);
    for (std::size_t i = 0; i < f.dim(); ++i) trace.total_load[i] += rec.choice[i];
    rec.running_load = trace.total_load;
    trace.steps.push_back(std::move(rec));
  }
  trace.cost = f.eval(trace.total_load);
  return trace;
}

}  // namespace

OcpRunTrace run_ocp(std::span<const FeasibleSet> sets, const CostFunction& f,
                    Mutation mutation) {
  for (const auto& s : sets) {
    if (s.dim() != f.dim()) fail(ErrorKind::Dimension, "feasible set dimension differs from cost");
  }
  return run_loop(sets.size(), f, mutation, [&](std::size_t t, OcpStepRecord& rec) {
    const BestResponse br = best_response(rec.dual, sets[t], 0.0, f);
    rec.choice_index = br.index;
    rec.choice = sets[t][br.index];
  });
}

OcpRunTrace run_ocp(std::size_t n, const LinearOracle& oracle, const CostFunction& f,
                    Mutation mutation) {
  return run_loop(n, f, mutation, [&](std::size_t t, OcpStepRecord& rec) {
    rec.choice = oracle(t, rec.dual);
    if (rec.choice.size() != f.dim()) fail(ErrorKind::Dimension, "oracle returned wrong dimension");
    require_unit_box(rec.choice, "oracle choice");
  });
}

void attach_origins(OcpRunTrace& trace, std::span<const Origin> origins) {
  if (origins.size() != trace.steps.size()) {
    fail(ErrorKind::Dimension, "origin labels do not match the run length");
  }
  for (std::size_t t = 0; t < origins.size(); ++t) trace.steps[t].origin = origins[t];
}

double fake_cost_of(const OcpRunTrace& trace, std::span<const std::size_t> times,
                    std::span<const Vec> choices) {
  if (times.size() != choices.size()) {
    fail(ErrorKind::Dimension, "times and choices differ in length");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& step = trace.steps.at(times[k]);
    s += dot(step.dual, choices[k]) - trace.gamma * step.dual_conjugate;
  }
  return s;
}

CostCertificateReport check_cost_certificate(const OcpRunTrace& trace) {
  CostCertificateReport report;
  const CostFunction& f = trace.oco.cost();
  const double p = f.order();
  Vec eighth(trace.total_load);
  for (double& x : eighth) x /= 8.0;
  report.lhs = f.eval(eighth);
  const double fake = trace.fake_cost_total();
  const double tail = 1.5 * trace.oco.ledger().shift_value;
  report.general.expect_le(report.lhs,
                           fake - trace.oco.ledger().max_conjugate / (2.0 * p) + tail);
  if (f.separable()) {
    report.separable.expect_le(report.lhs,
                               fake - f.conj(trace.oco.ledger().join) / (2.0 * p) + tail);
  }
  return report;
}

AdversarialReport check_adversarial_part(const OcpRunTrace& trace, double alpha,
                                  std::span<const std::size_t> adv_times,
                                  std::span<const Vec> opt_choices) {
  if (!(alpha >= 1.0)) fail(ErrorKind::InvalidArgument, "alpha must be at least 1");
  const CostFunction& f = trace.oco.cost();
  AdversarialReport report;
  report.lhs = fake_cost_of(trace, adv_times, opt_choices);
  Vec scaled(f.dim(), 0.0);
  for (const auto& v : opt_choices) {
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] += alpha * v[i];
  }
  const double psi_opt = f.eval(scaled);
  const double e = std::numbers::e;
  report.max_form.expect_le(
      report.lhs, e * psi_opt + e * f.order() / alpha * trace.oco.ledger().max_conjugate);
  report.join_form.expect_le(report.lhs, psi_opt + f.conj(trace.oco.ledger().join) / alpha);
  return report;
}

double effective_load_balance_order(double p, std::size_t m) {
  const double cap = std::max(2.0, std::ceil(std::log(static_cast<double>(m))));
  return std::min(p, cap);
}

CostFunction load_balance_cost(double p, std::size_t m) {
  return CostFunction::sum_of_powers(Vec(m, 1.0), p);
}

double lp_norm(std::span<const double> v, double p) {
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

LoadBalanceResult run_loadbalance(std::span<const FeasibleSet> sets, double p,
                                  std::size_t m, Mutation mutation) {
  if (!(p >= 1.0)) fail(ErrorKind::InvalidArgument, "norm order must be at least 1");
  const double pe = effective_load_balance_order(p, m);
  LoadBalanceResult out{run_ocp(sets, load_balance_cost(pe, m), mutation), p, pe, 0.0, 0.0};
  out.norm_requested = lp_norm(out.trace.total_load, p);
  out.norm_effective = lp_norm(out.trace.total_load, pe);
  return out;
}

HomogeneousReport check_homogeneous_equivalence(const OcpRunTrace& trace,
                                                std::span<const FeasibleSet> sets,
                                                const std::vector<bool>& stoch_mask) {
  const CostFunction& f = trace.oco.cost();
  if (!f.homogeneous()) {
    fail(ErrorKind::InvalidArgument, "homogeneous equivalence needs a homogeneous cost");
  }
  if (stoch_mask.size() != trace.n() || sets.size() != trace.n()) {
    fail(ErrorKind::Dimension, "mask/sets do not match the run length");
  }
  const auto stoch = static_cast<std::size_t>(
      std::count(stoch_mask.begin(), stoch_mask.end(), true));
  if (stoch == 0) {
    fail(ErrorKind::InvalidArgument, "homogeneous equivalence needs a stochastic step");
  }
  const double gbar = 1.0 / static_cast<double>(stoch);
  HomogeneousReport report;
  report.min_alpha = std::numeric_limits<double>::infinity();
  Vec cum(f.dim(), 0.0);
  std::size_t steps = 0;
  for (std::size_t t = 0; t < trace.n(); ++t) {
    const auto& rec = trace.steps[t];
    const std::string where = "t=" + std::to_string(t + 1);
    const Vec modified = f.grad(ssftrl_argument(f.order(), cum,
                                                static_cast<double>(steps) * gbar, gbar));
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool zero_mismatch = false;
    for (std::size_t j = 0; j < f.dim(); ++j) {
      if (rec.dual[j] > 0.0) {
        const double r = modified[j] / rec.dual[j];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      } else if (modified[j] != 0.0) {
        zero_mismatch = true;
      }
    }
    if (hi > 0.0) {
      const double spread = (hi - lo) / hi;
      report.max_spread = std::max(report.max_spread, spread);
      report.scaling.expect_le(spread, 0.0, 1e-9, where);
      report.min_alpha = std::min(report.min_alpha, lo);
      report.scaling.expect_true(lo > 0.0, where + " alpha > 0");
    } else {
      report.min_alpha = 0.0;
      report.scaling.expect_true(false, where + " dual vanished");
    }
    report.scaling.expect_true(!zero_mismatch, where + " zero pattern");
    const BestResponse br = best_response(modified, sets[t], 0.0, f);
    report.same_choice.expect_true(br.index == rec.choice_index, where);

    for (std::size_t i = 0; i < cum.size(); ++i) cum[i] += rec.choice[i];
    if (stoch_mask[t]) ++steps;
  }
  return report;
}

}  // namespace robustpd
