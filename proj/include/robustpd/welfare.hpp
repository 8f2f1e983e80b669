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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustpd/check.hpp"
#include "robustpd/convex.hpp"
#include "robustpd/oco.hpp"

namespace robustpd {

// A customer: reward c (any sign) and resource consumption a in [0,1]^m.
struct Request {
  double reward = 0;
  Vec consumption;

  void validate() const;
  friend bool operator==(const Request&, const Request&) = default;
};

// Played values are the virtual plays scaled by 1/8^2.
inline constexpr double kPlayScale = 1.0 / 64.0;

// argmax over x in [0,1] of c x - L(y, a x); returns 1 when c > <y, a> and 0
// otherwise (ties go to 0).
double virtual_best_response(std::span<const double> y, const Request& req);

// psi = psi_lin + psi_high with psi_high growing at least quadratically.
struct WelfareDecomposition {
  Vec linear_slopes;   // grad psi_lin
  CostFunction high;   // psi_high
};

// Throws Configuration when sampled (gamma, u) violate
// psi_high(gamma u) >= gamma^2 psi_high(u).
WelfareDecomposition decompose_for_welfare(const CostFunction& f);

struct WelfareStepRecord {
  Vec dual;                    // y_t
  double reduced_reward = 0;   // c_t - <grad psi_lin, a_t>
  double virtual_play = 0;     // x_t in {0, 1}
  double played = 0;           // x_t / 64
  Vec virtual_load;            // a_t x_t
  double fake_cost = 0;        // L(y_t, a_t x_t) under psi_high
  double dual_conjugate = 0;   // psi_high*(y_t)
};

struct WelfareTrace {
  std::vector<WelfareStepRecord> steps;
  double gamma = 0;              // 1/n
  Vec linear_slopes;
  Vec played_load;               // sum_t a_t x~_t
  double reward = 0;             // sum_t c_t x~_t (original rewards)
  double cost = 0;               // psi(played_load) (original psi)
  double profit = 0;             // reward - cost
  double virtual_fake_profit = 0;  // sum_t c'_t x_t - sum_t L(y_t, v_t)
  OcoState oco;                  // runs on psi_high

  std::size_t n() const noexcept { return steps.size(); }
};

// Requires n >= 4p. When psi has a linear part the run uses reduced rewards
// and psi_high; the reported profit is always against the original psi.
WelfareTrace run_welfare(std::span<const Request> requests, const CostFunction& f,
                         Mutation mutation = Mutation::None);

struct WelfareRealizationReport {
  CheckReport best_response{"per-step best response"};
  CheckReport adversarial_candidate{"adv step: fake profit >= psi*(y)/n >= 0"};
  CheckReport fake_profit_comparison{"virtual fake profit >= scaled OPT fake profit"};
  CheckReport regret_chain{"profit >= (fake profit - psi(p1)) / 64"};
  double scaled_opt_fake_profit = 0;  // sum_{Stoch} c x*/beta - L(y, a x*/beta)
  bool passed() const noexcept {
    return best_response.passed() && adversarial_candidate.passed() &&
           fake_profit_comparison.passed() && regret_chain.passed();
  }
};

// opt_fraction[t] is x*(c_t, a_t) for stochastic steps (ignored elsewhere).
WelfareRealizationReport check_welfare_realization(const WelfareTrace& trace,
                                                   std::span<const Request> requests,
                                                   const std::vector<bool>& stoch_mask,
                                                   std::span<const double> opt_fraction);

// Expected-profit bound: mean + 3 se >= OPT_Stoch/(64 beta) - psi(p1)/64.
// stoch_count == 0 drops the OPT term.
CheckReport check_expected_profit_bound(double mean_profit, double standard_error,
                                 double opt_stoch, std::size_t n,
                                 std::size_t stoch_count, double shift_value);

// Step interface for strategies run on the whole instance.
class WelfarePolicy {
 public:
  virtual ~WelfarePolicy() = default;
  virtual std::string name() const = 0;
  virtual void reset(const CostFunction& f, std::size_t n) = 0;
  // Returns x_t in [0,1] given the load committed so far.
  virtual double decide(const Request& req, std::span<const double> committed_load) = 0;
};

// Accepts a request fully when its reward exceeds the marginal cost
// <grad psi(load + a), a>. A naive baseline, not an approximation algorithm.
class GreedyMarginalPolicy final : public WelfarePolicy {
 public:
  std::string name() const override { return "greedy-marginal"; }
  void reset(const CostFunction& f, std::size_t n) override;
  double decide(const Request& req, std::span<const double> committed_load) override;

 private:
  std::optional<CostFunction> f_;
};

enum class MixtureArm { PrimalDual, Adversarial };

struct MixtureResult {
  MixtureArm arm = MixtureArm::PrimalDual;
  std::vector<double> played;
  double profit = 0;
  std::optional<WelfareTrace> trace;  // set for the primal-dual arm
};

MixtureArm mixture_coin(std::uint64_t coin_seed);

// One fair coin per run picks the primal-dual algorithm or the plug-in.
MixtureResult mixture_wrapper(std::span<const Request> requests, const CostFunction& f,
                              WelfarePolicy& adversarial_strategy, std::uint64_t coin_seed,
                              std::optional<MixtureArm> forced = std::nullopt);

double welfare_profit(std::span<const Request> requests, std::span<const double> x,
                      const CostFunction& f);

}  // namespace robustpd
