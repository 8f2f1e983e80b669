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

#include "robustpd/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "robustpd/error.hpp"
#include "robustpd/rng.hpp"

namespace robustpd {

void Request::validate() const {
  if (!std::isfinite(reward)) fail(ErrorKind::InvalidArgument, "request reward must be finite");
  if (consumption.empty()) fail(ErrorKind::Dimension, "request consumption must be nonempty");
  for (double a : consumption) {
    if (!(a >= 0.0 && a <= 1.0)) {
      fail(ErrorKind::Domain, "request consumption must lie in [0,1]^m");
    }
  }
}

double virtual_best_response(std::span<const double> y, const Request& req) {
  if (y.size() != req.consumption.size()) {
    fail(ErrorKind::Dimension, "dual and request differ in dimension");
  }
  return req.reward - dot(y, req.consumption) > 0.0 ? 1.0 : 0.0;
}

WelfareDecomposition decompose_for_welfare(const CostFunction& f) {
  WelfareDecomposition d{f.linear_part_slopes(), f.high_part()};
  const std::size_t m = f.dim();
  StreamRng rng(0x5157A7E5ULL, m);
  const double gammas[] = {1.0, 1.25, 2.0, 3.0, 8.0, 64.0};
  for (int k = 0; k < 32; ++k) {
    Vec u(m);
    for (auto& x : u) x = k < 4 ? std::pow(10.0, k - 2) : rng.uniform(0.0, 5.0);
    const double base = d.high.eval(u);
    for (double g : gammas) {
      Vec gu(u);
      for (auto& x : gu) x *= g;
      const double lhs = d.high.eval(gu);
      const double rhs = g * g * base;
      if (lhs < rhs - 1e-12 * std::max(1.0, std::abs(rhs))) {
        std::ostringstream os;
        os << "cost's nonlinear part grows slower than quadratically (gamma=" << g << ")";
        fail(ErrorKind::Configuration, os.str());
      }
    }
  }
  return d;
}

WelfareTrace run_welfare(std::span<const Request> requests, const CostFunction& f,
                         Mutation mutation) {
  const std::size_t n = requests.size();
  if (static_cast<double>(n) < 4.0 * f.order() * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "run length n=" << n << " is below 4p=" << 4.0 * f.order();
    fail(ErrorKind::Configuration, os.str());
  }
  for (const auto& r : requests) {
    r.validate();
    if (r.consumption.size() != f.dim()) {
      fail(ErrorKind::Dimension, "request dimension differs from cost");
    }
  }
  WelfareDecomposition d = decompose_for_welfare(f);
  const double gamma = 1.0 / static_cast<double>(n);
  WelfareTrace trace{{}, gamma, d.linear_slopes, Vec(f.dim(), 0.0), 0.0, 0.0, 0.0, 0.0,
                     OcoState(d.high, gamma, mutation)};
  trace.steps.reserve(n);
  double virtual_reward = 0.0;
  for (const auto& req : requests) {
    WelfareStepRecord rec;
    rec.dual = trace.oco.next_iterate();
    rec.dual_conjugate = d.high.conj(rec.dual);
    rec.reduced_reward = req.reward - dot(d.linear_slopes, req.consumption);
    rec.virtual_play = virtual_best_response(rec.dual, Request{rec.reduced_reward, req.consumption});
    rec.played = rec.virtual_play * kPlayScale;
    rec.virtual_load = req.consumption;
    for (auto& a : rec.virtual_load) a *= rec.virtual_play;
    rec.fake_cost = dot(rec.dual, rec.virtual_load) - gamma * rec.dual_conjugate;
    trace.oco.observe(rec.virtual_load, gamma);

    for (std::size_t i = 0; i < f.dim(); ++i) {
      trace.played_load[i] += req.consumption[i] * rec.played;
    }
    trace.reward += req.reward * rec.played;
    virtual_reward += rec.reduced_reward * rec.virtual_play;
    trace.virtual_fake_profit -= rec.fake_cost;
    trace.steps.push_back(std::move(rec));
  }
  trace.virtual_fake_profit += virtual_reward;
  trace.cost = f.eval(trace.played_load);
  trace.profit = trace.reward - trace.cost;
  return trace;
}

WelfareRealizationReport check_welfare_realization(const WelfareTrace& trace,
                                                   std::span<const Request> requests,
                                                   const std::vector<bool>& stoch_mask,
                                                   std::span<const double> opt_fraction) {
  const std::size_t n = trace.n();
  if (requests.size() != n || stoch_mask.size() != n || opt_fraction.size() != n) {
    fail(ErrorKind::Dimension, "welfare check inputs do not match the run length");
  }
  const auto stoch = static_cast<std::size_t>(
      std::count(stoch_mask.begin(), stoch_mask.end(), true));
  const double beta = stoch > 0 ? static_cast<double>(n) / static_cast<double>(stoch) : 0.0;

  WelfareRealizationReport report;
  double virtual_total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto& rec = trace.steps[t];
    const auto& a = requests[t].consumption;
    const double penalty = trace.gamma * rec.dual_conjugate;
    const double ya = dot(rec.dual, a);
    auto fake_profit = [&](double x) { return rec.reduced_reward * x - (ya * x - penalty); };
    const double chosen = fake_profit(rec.virtual_play);
    virtual_total += chosen;
    const std::string where = "t=" + std::to_string(t + 1);

    report.best_response.expect_le(fake_profit(0.0), chosen, 1e-10, where);
    report.best_response.expect_le(fake_profit(1.0), chosen, 1e-10, where);
    report.adversarial_candidate.expect_le(penalty, chosen, kCheckTolerance, where);
    report.adversarial_candidate.expect_le(0.0, penalty, kCheckTolerance, where);
    if (stoch_mask[t]) {
      const double x = opt_fraction[t] / beta;
      report.best_response.expect_le(fake_profit(x), chosen, 1e-10, where);
      report.scaled_opt_fake_profit += fake_profit(x);
    }
  }
  report.fake_profit_comparison.expect_le(report.scaled_opt_fake_profit, virtual_total);
  const double shift = trace.oco.ledger().shift_value;
  report.regret_chain.expect_le(kPlayScale * (trace.virtual_fake_profit - shift), trace.profit);
  return report;
}

CheckReport check_expected_profit_bound(double mean_profit, double standard_error,
                                 double opt_stoch, std::size_t n, std::size_t stoch_count,
                                 double shift_value) {
  CheckReport report("expected profit >= OPT_Stoch/(64 beta) - psi(p1)/64");
  double rhs = -kPlayScale * shift_value;
  if (stoch_count > 0) {
    const double beta = static_cast<double>(n) / static_cast<double>(stoch_count);
    rhs += kPlayScale * opt_stoch / beta;
  }
  report.expect_le(rhs, mean_profit + 3.0 * standard_error);
  return report;
}

void GreedyMarginalPolicy::reset(const CostFunction& f, std::size_t) { f_ = f; }

double GreedyMarginalPolicy::decide(const Request& req, std::span<const double> committed) {
  if (!f_) fail(ErrorKind::InvalidArgument, "policy used before reset");
  Vec next(committed.begin(), committed.end());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += req.consumption[i];
  return req.reward > dot(f_->grad(next), req.consumption) ? 1.0 : 0.0;
}

MixtureArm mixture_coin(std::uint64_t coin_seed) {
  return (CounterRng::bits(coin_seed, 0xC014ULL, 0) & 1ULL) == 0 ? MixtureArm::PrimalDual
                                                                 : MixtureArm::Adversarial;
}

double welfare_profit(std::span<const Request> requests, std::span<const double> x,
                      const CostFunction& f) {
  Vec load(f.dim(), 0.0);
  double reward = 0.0;
  for (std::size_t t = 0; t < requests.size(); ++t) {
    reward += requests[t].reward * x[t];
    for (std::size_t i = 0; i < load.size(); ++i) load[i] += requests[t].consumption[i] * x[t];
  }
  return reward - f.eval(load);
}

MixtureResult mixture_wrapper(std::span<const Request> requests, const CostFunction& f,
                              WelfarePolicy& adversarial_strategy, std::uint64_t coin_seed,
                              std::optional<MixtureArm> forced) {
  MixtureResult out;
  out.arm = forced ? *forced : mixture_coin(coin_seed);
  if (out.arm == MixtureArm::PrimalDual) {
    out.trace = run_welfare(requests, f);
    out.played.reserve(requests.size());
    for (const auto& s : out.trace->steps) out.played.push_back(s.played);
    out.profit = out.trace->profit;
    return out;
  }
  adversarial_strategy.reset(f, requests.size());
  Vec load(f.dim(), 0.0);
  for (const auto& req : requests) {
    req.validate();
    const double x = std::clamp(adversarial_strategy.decide(req, load), 0.0, 1.0);
    out.played.push_back(x);
    for (std::size_t i = 0; i < load.size(); ++i) load[i] += req.consumption[i] * x;
  }
  out.profit = welfare_profit(requests, out.played, f);
  return out;
}

}  // namespace robustpd
