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
#include <span>
#include <vector>

#include "robustpd/check.hpp"
#include "robustpd/convex.hpp"

namespace robustpd {

// Test-only perturbations of the iterate formula, used to show that the
// inequality checks are not vacuous.
enum class Mutation {
  None,
  NoShift,        // drop the 4p*1 shift from the iterate numerator
  NoRegularizer,  // drop the extra gamma_bar term from the denominator
};

const char* mutation_name(Mutation m) noexcept;

// Point at which the gradient is evaluated by the shifted and scaled FTRL:
//   (shift * 4p*1 + cum_load) / (4 (1 + cum_gamma + extra))
// shift is 1 normally, 0 under Mutation::NoShift.
Vec ssftrl_argument(double p, std::span<const double> cum_load, double cum_gamma,
                    double extra, double shift = 1.0);

// Everything recorded about one observed step t.
struct OcoStep {
  Vec argument;      // w_t, so that iterate = grad psi(w_t)
  Vec iterate;       // y_t
  Vec load;          // v_t
  double gamma = 0;  // gamma_t, either 0 or gamma_bar
  double iterate_conjugate = 0;  // psi*(y_t)
  Vec ftl_next;      // follow-the-leader iterate after observing v_t
  double ftl_gain = 0;           // <ftl_next, v_t> - 4 gamma_t psi*(ftl_next)
  double half_fake_gain = 0;     // L_{gamma_t}(y_t, v_t / 2)
  double inner = 0;              // <y_t, v_t>
};

// Running sums over observed steps.
struct RegretLedger {
  double half_fake_gain = 0;  // sum_t L_{gamma_t}(y_t, v_t/2)
  double inner = 0;           // sum_t <y_t, v_t>
  double ftl_gain = 0;        // sum_{t>=1} ~L_t(~y_{t+1})
  double initial_gain = 0;    // ~L_0(~y_1)
  double shift_value = 0;     // psi(p*1)
  double max_conjugate = 0;   // max_t psi*(y_t)
  Vec join;                   // coordinate-wise max of the y_t
};

struct LedgerDelta {
  double half_fake_gain = 0;
  double inner = 0;
  double ftl_gain = 0;
  double iterate_conjugate = 0;
};

// State of SS-FTRL run over Lagrangians L_{gamma_t}(., v_t) with
// gamma_t in {0, gamma_bar}. A run is sequential and owned by one caller.
class OcoState {
 public:
  OcoState(CostFunction f, double gamma_bar, Mutation mutation = Mutation::None);

  // y_t = grad psi((4p*1 + v_{1:t-1}) / (4 (1 + gamma_{1:t-1} + gamma_bar))).
  Vec next_iterate() const;
  // ~y_t, same without the gamma_bar regularizer. Never mutated.
  Vec ftl_iterate() const;
  Vec iterate_argument() const;

  // Plays the current iterate against L_{gamma}(., load) and advances t.
  LedgerDelta observe(std::span<const double> load, double gamma);

  const CostFunction& cost() const noexcept { return f_; }
  double gamma_bar() const noexcept { return gamma_bar_; }
  Mutation mutation() const noexcept { return mutation_; }
  // 1-based index of the next step.
  std::size_t t() const noexcept { return history_.size() + 1; }
  double cumulative_gamma() const noexcept;
  const Vec& cumulative_load() const noexcept { return cum_load_; }
  const std::vector<OcoStep>& history() const noexcept { return history_; }
  const RegretLedger& ledger() const noexcept { return ledger_; }

 private:
  CostFunction f_;
  double gamma_bar_;
  Mutation mutation_;
  Vec cum_load_;
  std::size_t gamma_steps_ = 0;
  std::vector<OcoStep> history_;
  RegretLedger ledger_;
};

// Be-the-Leader: for every prefix t,
//   ~L_0(~y_1) + sum_{s<=t} ~L_s(~y_{s+1}) >= 4(1+g_{1:t}) psi((4p1+v_{1:t})/(4(1+g_{1:t})))
// and ~L_0(~y_1) = 4 psi(p1).
struct BtlReport {
  CheckReport prefix{"be-the-leader"};
  CheckReport initial{"initial gain = 4 psi(p1)"};
  bool passed() const noexcept { return prefix.passed() && initial.passed(); }
};
BtlReport check_btl(const OcoState& state);

// y_t <= ~y_{t+1} <= 2 y_t, plus the argument ratio ~w_{t+1}/w_t in
// [1, 2^(1/p)] from the stability proof.
struct StabilityReport {
  CheckReport lower{"y_t <= ~y_{t+1}"};
  CheckReport upper{"~y_{t+1} <= 2 y_t"};
  CheckReport argument_ratio{"~w_{t+1}/w_t in [1, 2^(1/p)]"};
  bool passed() const noexcept {
    return lower.passed() && upper.passed() && argument_ratio.passed();
  }
};
StabilityReport check_stability(const OcoState& state);

// Almost-monotone certificate: at most ceil(p) times dominating every
// iterate up to a factor e.
struct DominationCertificate {
  std::vector<std::size_t> times;    // 1-based t_1 < ... < t_k
  std::vector<std::size_t> witness;  // witness[t-1] in times, witness >= t
  double max_ratio = 0;              // max_t,j y_t[j] / y_witness[j]
  CheckReport check{"y_t <= e y_witness(t)"};
};
DominationCertificate dominating_set(const OcoState& state);

struct RegretBoundsReport {
  CheckReport regret{"regret: sum L(y,v/2) >= psi(sum v/8) - psi(p1)"};
  CheckReport regret_prefix{"regret per prefix"};
  CheckReport size_control{"size: max psi*(y)/p <= sum <y,v> + psi(p1)"};
  CheckReport size_control_prefix{"size per prefix"};
  CheckReport separable_size{"separable size: psi*(join y)/p <= sum <y,v> + psi(p1)"};
  bool passed() const noexcept {
    return regret.passed() && regret_prefix.passed() && size_control.passed() &&
           size_control_prefix.passed() && separable_size.passed();
  }
};
// The final-time claims need sum_t gamma_t = 1; prefix claims always apply.
RegretBoundsReport check_regret_bounds(const OcoState& state);

}  // namespace robustpd
