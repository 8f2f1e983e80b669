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
#include <span>
#include <vector>

#include "robustpd/check.hpp"
#include "robustpd/convex.hpp"
#include "robustpd/oco.hpp"

namespace robustpd {

enum class Origin { Adversarial, Stochastic, Unknown };

const char* origin_name(Origin o) noexcept;

// A finite menu V_t of processing options, each in [0,1]^m.
class FeasibleSet {
 public:
  explicit FeasibleSet(std::vector<Vec> options);

  std::size_t size() const noexcept { return options_.size(); }
  std::size_t dim() const noexcept { return options_.front().size(); }
  const Vec& operator[](std::size_t i) const { return options_[i]; }
  const std::vector<Vec>& options() const noexcept { return options_; }

  friend bool operator==(const FeasibleSet&, const FeasibleSet&) = default;

 private:
  std::vector<Vec> options_;
};

struct BestResponse {
  std::size_t index = 0;
  double fake_cost = 0;  // <y, v> - gamma psi*(y)
};

// argmin over the options of L_gamma(y, v) = <y, v> - gamma psi*(y); the
// conjugate term does not depend on v, so this is linear minimization with
// ties broken towards the lowest index.
BestResponse best_response(std::span<const double> y, const FeasibleSet& options,
                           double gamma, const CostFunction& f);

// Linear minimization oracle over a set presented implicitly: given the
// step index and dual y, return a minimizer of <y, .> over V_t.
using LinearOracle = std::function<Vec(std::size_t t, std::span<const double> y)>;

struct OcpStepRecord {
  Vec dual;               // y_t
  Vec choice;             // chosen v_t
  std::size_t choice_index = 0;
  double fake_cost = 0;   // L(y_t, v_t) with multiplier 1/n
  double dual_conjugate = 0;  // psi*(y_t)
  Vec running_load;       // v_1 + ... + v_t
  Origin origin = Origin::Unknown;
};

struct OcpRunTrace {
  std::vector<OcpStepRecord> steps;
  double gamma = 0;    // 1/n
  Vec total_load;
  double cost = 0;     // psi(total_load)
  OcoState oco;

  std::size_t n() const noexcept { return steps.size(); }
  double fake_cost_total() const;
};

// Primal-dual loop: dual from SS-FTRL with gamma_bar = 1/n, primal as best
// response to the fake cost, then the OCO algorithm observes (v_t, 1/n).
// Requires n >= 4p.
OcpRunTrace run_ocp(std::span<const FeasibleSet> sets, const CostFunction& f,
                    Mutation mutation = Mutation::None);
OcpRunTrace run_ocp(std::size_t n, const LinearOracle& oracle, const CostFunction& f,
                    Mutation mutation = Mutation::None);

// Labels are oracle knowledge; the algorithm never reads them.
void attach_origins(OcpRunTrace& trace, std::span<const Origin> origins);

// sum over the given times of L(y_t, choices[k]) using the trace's duals.
double fake_cost_of(const OcpRunTrace& trace, std::span<const std::size_t> times,
                    std::span<const Vec> choices);

struct CostCertificateReport {
  CheckReport general{"cost certificate: max form"};
  CheckReport separable{"cost certificate: join form"};
  double lhs = 0;  // psi(sum v / 8)
  bool passed() const noexcept { return general.passed() && separable.passed(); }
};
CostCertificateReport check_cost_certificate(const OcpRunTrace& trace);

struct AdversarialReport {
  CheckReport max_form{"adversarial part: max form"};
  CheckReport join_form{"adversarial part: join form"};
  double lhs = 0;
  bool passed() const noexcept { return max_form.passed() && join_form.passed(); }
};
// adv_times are 0-based step indices; opt_choices[k] is OPT's choice there.
AdversarialReport check_adversarial_part(const OcpRunTrace& trace, double alpha,
                                  std::span<const std::size_t> adv_times,
                                  std::span<const Vec> opt_choices);

struct LoadBalanceResult {
  OcpRunTrace trace;
  double requested_p = 0;
  double effective_p = 0;
  double norm_requested = 0;  // ||sum v||_p
  double norm_effective = 0;  // ||sum v||_p'
};

// p' = min(p, max(2, ceil(ln m))); the norms agree up to a constant above
// that order.
double effective_load_balance_order(double p, std::size_t m);
CostFunction load_balance_cost(double p, std::size_t m);
double lp_norm(std::span<const double> v, double p);
LoadBalanceResult run_loadbalance(std::span<const FeasibleSet> sets, double p,
                                  std::size_t m, Mutation mutation = Mutation::None);

struct HomogeneousReport {
  CheckReport scaling{"modified iterates are scalings"};
  CheckReport same_choice{"best response unchanged"};
  double max_spread = 0;
  double min_alpha = 0;
  bool passed() const noexcept { return scaling.passed() && same_choice.passed(); }
};
// Recomputes the iterates with gamma_t = 1/|Stoch| on stochastic steps and 0
// elsewhere (gamma_bar = 1/|Stoch|) on the same choices, and checks they are
// positive multiples of the recorded duals selecting the same options.
HomogeneousReport check_homogeneous_equivalence(const OcpRunTrace& trace,
                                                std::span<const FeasibleSet> sets,
                                                const std::vector<bool>& stoch_mask);

}  // namespace robustpd
