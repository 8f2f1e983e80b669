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
#include <span>
#include <string>
#include <vector>

#include "robustpd/convex.hpp"
#include "robustpd/ocp.hpp"
#include "robustpd/welfare.hpp"

namespace robustpd {

enum class OptMethod { Enumeration, MonteCarlo, ProjectedGradient, Grid };

const char* method_name(OptMethod m) noexcept;

inline constexpr double kAdvEnumerationGuard = 1e7;
inline constexpr double kSelectorGuard = 1e5;
inline constexpr double kMultisetGuard = 1e6;
inline constexpr std::size_t kWelfareMaxRequests = 64;
inline constexpr std::size_t kMonteCarloSamples = 20000;

struct OptReport {
  double opt_value = 0;
  // OCP: option index per adversarial time, or per support element for a
  // selector. Welfare: unused.
  std::vector<std::size_t> choices;
  // OCP: the chosen vectors matching `choices`.
  std::vector<Vec> chosen;
  // Welfare: x per request, or per support element for a selector.
  std::vector<double> fractions;
  Vec v_opt_adv;        // sum of the adversarial choices
  Vec e_v_opt_stoch;    // |Stoch| sum_j probs_j v*(support_j)
  OptMethod method = OptMethod::Enumeration;
  bool exact = true;
  bool converged = true;
  double standard_error = 0;
  std::size_t iterations = 0;
};

// min psi(sum_t v_t) over all choice combinations (lowest-index argmin).
OptReport opt_adv_ocp(std::span<const FeasibleSet> sets, const CostFunction& f);

// Draw-count vectors of `draws` i.i.d. samples over `probs`, with their
// multinomial probabilities.
struct DrawCounts {
  std::vector<std::vector<std::size_t>> counts;
  std::vector<double> probability;
};
double multiset_count(std::size_t draws, std::size_t support);
DrawCounts enumerate_draw_counts(std::span<const double> probs, std::size_t draws);

// Best selector support -> option under E psi(sum of the selected options).
// Exact by multinomial enumeration; falls back to Monte Carlo (flagged
// non-exact) above the multiset guard.
OptReport opt_stoch_ocp(std::span<const FeasibleSet> support, std::span<const double> probs,
                        std::size_t stoch_count, const CostFunction& f,
                        std::uint64_t mc_seed = 0);

// E psi(sum of the selected options) for a fixed selector.
double selector_cost(std::span<const FeasibleSet> support, std::span<const double> probs,
                     std::size_t stoch_count, std::span<const std::size_t> selector,
                     const CostFunction& f);

// max over x in [0,1]^n of sum_t c_t x_t - psi(sum_t a_t x_t).
OptReport opt_welfare(std::span<const Request> requests, const CostFunction& f);
double welfare_objective(std::span<const Request> requests, std::span<const double> x,
                         const CostFunction& f);

// Best fractional selector support -> [0,1] for the stochastic part, with
// the expectation taken exactly over draw counts.
OptReport opt_stoch_welfare(std::span<const Request> support, std::span<const double> probs,
                            std::size_t stoch_count, const CostFunction& f);
double selector_profit(std::span<const Request> support, std::span<const double> probs,
                       std::size_t stoch_count, std::span<const double> selector,
                       const CostFunction& f);

}  // namespace robustpd
