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

#include "robustpd/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "robustpd/error.hpp"
#include "robustpd/instance.hpp"
#include "robustpd/rng.hpp"

namespace robustpd {

namespace {

constexpr std::size_t kWelfareIterations = 100000;
constexpr double kProjectedGradientTol = 1e-8;
constexpr std::size_t kGridPoints = 101;
constexpr double kGridWork = 1e8;
constexpr double kPatternFloor = 1e-9;
constexpr std::uint64_t kMonteCarloStream = 0x4D43ULL;

[[noreturn]] void too_large(const std::string& what, double size, double guard) {
  std::ostringstream os;
  os << what << " has " << size << " cases, above the guard of " << guard
     << "; use a smaller instance";
  fail(ErrorKind::OracleSize, os.str());
}

void add_scaled(Vec& acc, std::span<const double> v, double s) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s * v[i];
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace

const char* method_name(OptMethod m) noexcept {
  switch (m) {
    case OptMethod::Enumeration: return "enumeration";
    case OptMethod::MonteCarlo: return "monte-carlo";
    case OptMethod::ProjectedGradient: return "projected-gradient";
    case OptMethod::Grid: return "grid";
  }
  return "unknown";
}

OptReport opt_adv_ocp(std::span<const FeasibleSet> sets, const CostFunction& f) {
  const std::size_t m = f.dim();
  double combos = 1.0;
  for (const auto& s : sets) {
    if (s.dim() != m) fail(ErrorKind::Dimension, "feasible set dimension differs from cost");
    combos *= static_cast<double>(s.size());
  }
  if (combos > kAdvEnumerationGuard) too_large("adversarial enumeration", combos, kAdvEnumerationGuard);

  OptReport best;
  best.method = OptMethod::Enumeration;
  best.v_opt_adv.assign(m, 0.0);
  best.e_v_opt_stoch.assign(m, 0.0);
  best.opt_value = std::numeric_limits<double>::infinity();
  const std::size_t n = sets.size();
  std::vector<std::size_t> pick(n, 0);
  std::vector<Vec> partial(n + 1, Vec(m, 0.0));

  // Depth-first over choices with prefix loads cached per level.
  std::size_t depth = 0;
  for (;;) {
    while (depth < n) {
      partial[depth + 1] = partial[depth];
      add_scaled(partial[depth + 1], sets[depth][pick[depth]], 1.0);
      ++depth;
    }
    const double value = f.eval(partial[n]);
    if (value < best.opt_value) {
      best.opt_value = value;
      best.choices = pick;
      best.v_opt_adv = partial[n];
    }
    // Advance the odometer from the last level.
    while (depth > 0 && pick[depth - 1] + 1 == sets[depth - 1].size()) {
      pick[depth - 1] = 0;
      --depth;
    }
    if (depth == 0) break;
    ++pick[depth - 1];
    --depth;
  }
  if (n == 0) best.choices.clear();
  for (std::size_t t = 0; t < n; ++t) best.chosen.push_back(sets[t][best.choices[t]]);
  return best;
}

double multiset_count(std::size_t draws, std::size_t support) {
  if (support == 0) return draws == 0 ? 1.0 : 0.0;
  // C(draws + support - 1, support - 1)
  return std::round(std::exp(std::lgamma(static_cast<double>(draws + support)) -
                             std::lgamma(static_cast<double>(draws + 1)) -
                             std::lgamma(static_cast<double>(support))));
}

DrawCounts enumerate_draw_counts(std::span<const double> probs, std::size_t draws) {
  const std::size_t s = probs.size();
  DrawCounts out;
  if (s == 0) {
    if (draws == 0) {
      out.counts.emplace_back();
      out.probability.push_back(1.0);
    }
    return out;
  }
  const double log_norm = std::lgamma(static_cast<double>(draws) + 1.0);
  std::vector<std::size_t> c(s, 0);
  // Recursive fill: coordinates before `j` fixed, `left` draws remaining.
  auto rec = [&](auto&& self, std::size_t j, std::size_t left) -> void {
    if (j + 1 == s) {
      c[j] = left;
      double lp = log_norm;
      for (std::size_t k = 0; k < s; ++k) {
        if (c[k] == 0) continue;
        if (probs[k] <= 0.0) return;
        lp += static_cast<double>(c[k]) * std::log(probs[k]) -
              std::lgamma(static_cast<double>(c[k]) + 1.0);
      }
      out.counts.push_back(c);
      out.probability.push_back(std::exp(lp));
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      c[j] = k;
      self(self, j + 1, left - k);
    }
  };
  rec(rec, 0, draws);
  return out;
}

namespace {

void check_support(std::span<const double> probs, std::size_t support_size) {
  if (probs.size() != support_size) {
    fail(ErrorKind::Dimension, "probabilities and support differ in length");
  }
}

double expected_selected_cost(const DrawCounts& dc, std::span<const FeasibleSet> support,
                              std::span<const std::size_t> selector, const CostFunction& f) {
  double e = 0.0;
  Vec load(f.dim());
  for (std::size_t k = 0; k < dc.counts.size(); ++k) {
    std::fill(load.begin(), load.end(), 0.0);
    for (std::size_t j = 0; j < support.size(); ++j) {
      if (dc.counts[k][j] > 0) {
        add_scaled(load, support[j][selector[j]], static_cast<double>(dc.counts[k][j]));
      }
    }
    e += dc.probability[k] * f.eval(load);
  }
  return e;
}

void finish_stoch_report(OptReport& r, std::span<const FeasibleSet> support,
                         std::span<const double> probs, std::size_t stoch_count,
                         std::size_t m) {
  r.v_opt_adv.assign(m, 0.0);
  r.e_v_opt_stoch.assign(m, 0.0);
  for (std::size_t j = 0; j < support.size(); ++j) {
    r.chosen.push_back(support[j][r.choices[j]]);
    add_scaled(r.e_v_opt_stoch, support[j][r.choices[j]],
               static_cast<double>(stoch_count) * probs[j]);
  }
}

}  // namespace

double selector_cost(std::span<const FeasibleSet> support, std::span<const double> probs,
                     std::size_t stoch_count, std::span<const std::size_t> selector,
                     const CostFunction& f) {
  check_support(probs, support.size());
  if (selector.size() != support.size()) fail(ErrorKind::Dimension, "selector size mismatch");
  if (multiset_count(stoch_count, support.size()) > kMultisetGuard) {
    too_large("draw-count enumeration", multiset_count(stoch_count, support.size()), kMultisetGuard);
  }
  return expected_selected_cost(enumerate_draw_counts(probs, stoch_count), support, selector, f);
}

OptReport opt_stoch_ocp(std::span<const FeasibleSet> support, std::span<const double> probs,
                        std::size_t stoch_count, const CostFunction& f, std::uint64_t mc_seed) {
  check_support(probs, support.size());
  const std::size_t s = support.size();
  OptReport r;
  r.method = OptMethod::Enumeration;
  if (stoch_count == 0 || s == 0) {
    r.choices.assign(s, 0);
    finish_stoch_report(r, support, probs, 0, f.dim());
    return r;
  }
  double selectors = 1.0;
  for (const auto& set : support) {
    if (set.dim() != f.dim()) fail(ErrorKind::Dimension, "support set dimension differs from cost");
    selectors *= static_cast<double>(set.size());
  }
  if (selectors > kSelectorGuard) too_large("selector enumeration", selectors, kSelectorGuard);

  std::vector<std::size_t> sel(s, 0);
  auto advance = [&] {
    for (std::size_t j = 0; j < s; ++j) {
      if (++sel[j] < support[j].size()) return true;
      sel[j] = 0;
    }
    return false;
  };

  const double multisets = multiset_count(stoch_count, s);
  r.opt_value = std::numeric_limits<double>::infinity();
  if (multisets <= kMultisetGuard) {
    const DrawCounts dc = enumerate_draw_counts(probs, stoch_count);
    do {
      const double v = expected_selected_cost(dc, support, sel, f);
      if (v < r.opt_value) {
        r.opt_value = v;
        r.choices = sel;
      }
    } while (advance());
  } else {
    // Common random draws for every selector.
    r.method = OptMethod::MonteCarlo;
    r.exact = false;
    std::vector<std::vector<std::size_t>> counts(kMonteCarloSamples, std::vector<std::size_t>(s, 0));
    for (std::size_t k = 0; k < kMonteCarloSamples; ++k) {
      for (std::size_t t = 0; t < stoch_count; ++t) {
        ++counts[k][pick_index(probs, CounterRng::unit(mc_seed, kMonteCarloStream + k, t))];
      }
    }
    Vec samples(kMonteCarloSamples);
    Vec load(f.dim());
    do {
      for (std::size_t k = 0; k < kMonteCarloSamples; ++k) {
        std::fill(load.begin(), load.end(), 0.0);
        for (std::size_t j = 0; j < s; ++j) {
          add_scaled(load, support[j][sel[j]], static_cast<double>(counts[k][j]));
        }
        samples[k] = f.eval(load);
      }
      const double mean = mean_of(samples);
      if (mean < r.opt_value) {
        double var = 0.0;
        for (double x : samples) var += (x - mean) * (x - mean);
        var /= static_cast<double>(kMonteCarloSamples - 1);
        r.opt_value = mean;
        r.choices = sel;
        r.standard_error = std::sqrt(var / static_cast<double>(kMonteCarloSamples));
      }
    } while (advance());
  }
  finish_stoch_report(r, support, probs, stoch_count, f.dim());
  return r;
}

double welfare_objective(std::span<const Request> requests, std::span<const double> x,
                         const CostFunction& f) {
  return welfare_profit(requests, x, f);
}

namespace {

Vec welfare_gradient(std::span<const Request> requests, std::span<const double> x,
                     const CostFunction& f) {
  Vec load(f.dim(), 0.0);
  for (std::size_t t = 0; t < requests.size(); ++t) add_scaled(load, requests[t].consumption, x[t]);
  const Vec g = f.grad(load);
  Vec out(requests.size());
  for (std::size_t t = 0; t < requests.size(); ++t) {
    out[t] = requests[t].reward - dot(g, requests[t].consumption);
  }
  return out;
}

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

OptReport opt_welfare(std::span<const Request> requests, const CostFunction& f) {
  const std::size_t n = requests.size();
  if (n > kWelfareMaxRequests) {
    too_large("welfare optimization", static_cast<double>(n),
              static_cast<double>(kWelfareMaxRequests));
  }
  for (const auto& r : requests) {
    r.validate();
    if (r.consumption.size() != f.dim()) fail(ErrorKind::Dimension, "request dimension differs from cost");
  }
  OptReport rep;
  rep.method = OptMethod::ProjectedGradient;
  rep.converged = false;
  Vec x(n, 0.0);
  double value = welfare_objective(requests, x, f);
  double lip = 1.0;
  Vec trial(n);
  std::size_t it = 0;
  for (; it < kWelfareIterations; ++it) {
    const Vec g = welfare_gradient(requests, x, f);
    double pg = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double d = clip01(x[t] + g[t]) - x[t];
      pg += d * d;
    }
    if (std::sqrt(pg) <= kProjectedGradientTol) {
      rep.converged = true;
      break;
    }
    // Backtracking on the quadratic upper model with curvature `lip`.
    double trial_value = 0.0;
    for (;;) {
      double lin = 0.0;
      double sq = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        trial[t] = clip01(x[t] + g[t] / lip);
        const double d = trial[t] - x[t];
        lin += g[t] * d;
        sq += d * d;
      }
      trial_value = welfare_objective(requests, trial, f);
      if (trial_value >= value + lin - 0.5 * lip * sq - 1e-15 * std::max(1.0, std::abs(value)) ||
          lip > 1e30) {
        break;
      }
      lip *= 2.0;
    }
    if (trial_value < value) {
      // No ascent possible at machine precision.
      rep.converged = true;
      break;
    }
    x = trial;
    value = trial_value;
    lip = std::max(lip * 0.5, 1e-12);
  }
  rep.iterations = it;
  rep.fractions = x;
  rep.opt_value = value;
  rep.v_opt_adv.assign(f.dim(), 0.0);
  for (std::size_t t = 0; t < n; ++t) add_scaled(rep.v_opt_adv, requests[t].consumption, x[t]);
  rep.e_v_opt_stoch.assign(f.dim(), 0.0);
  return rep;
}

namespace {

double expected_profit(const DrawCounts& dc, std::span<const Request> support,
                       std::span<const double> probs, std::size_t stoch_count,
                       std::span<const double> x, const CostFunction& f) {
  double reward = 0.0;
  for (std::size_t j = 0; j < support.size(); ++j) {
    reward += static_cast<double>(stoch_count) * probs[j] * support[j].reward * x[j];
  }
  double cost = 0.0;
  Vec load(f.dim());
  for (std::size_t k = 0; k < dc.counts.size(); ++k) {
    std::fill(load.begin(), load.end(), 0.0);
    for (std::size_t j = 0; j < support.size(); ++j) {
      add_scaled(load, support[j].consumption, static_cast<double>(dc.counts[k][j]) * x[j]);
    }
    cost += dc.probability[k] * f.eval(load);
  }
  return reward - cost;
}

}  // namespace

double selector_profit(std::span<const Request> support, std::span<const double> probs,
                       std::size_t stoch_count, std::span<const double> selector,
                       const CostFunction& f) {
  check_support(probs, support.size());
  if (selector.size() != support.size()) fail(ErrorKind::Dimension, "selector size mismatch");
  if (multiset_count(stoch_count, support.size()) > kMultisetGuard) {
    too_large("draw-count enumeration", multiset_count(stoch_count, support.size()), kMultisetGuard);
  }
  return expected_profit(enumerate_draw_counts(probs, stoch_count), support, probs, stoch_count,
                         selector, f);
}

OptReport opt_stoch_welfare(std::span<const Request> support, std::span<const double> probs,
                            std::size_t stoch_count, const CostFunction& f) {
  check_support(probs, support.size());
  const std::size_t s = support.size();
  for (const auto& r : support) {
    r.validate();
    if (r.consumption.size() != f.dim()) fail(ErrorKind::Dimension, "request dimension differs from cost");
  }
  OptReport rep;
  rep.method = OptMethod::Grid;
  rep.fractions.assign(s, 0.0);
  rep.v_opt_adv.assign(f.dim(), 0.0);
  rep.e_v_opt_stoch.assign(f.dim(), 0.0);
  if (stoch_count == 0 || s == 0) return rep;

  const double multisets = multiset_count(stoch_count, s);
  if (multisets > kMultisetGuard) too_large("draw-count enumeration", multisets, kMultisetGuard);
  const double sweep_work = static_cast<double>(s * kGridPoints) * multisets;
  if (sweep_work > kGridWork) too_large("selector grid search", sweep_work, kGridWork);
  const DrawCounts dc = enumerate_draw_counts(probs, stoch_count);
  auto value_of = [&](std::span<const double> x) {
    return expected_profit(dc, support, probs, stoch_count, x, f);
  };
  auto grid = [](std::size_t k) { return static_cast<double>(k) / (kGridPoints - 1); };

  Vec x(s, 0.0);
  double best = value_of(x);
  std::size_t evals = 1;
  if (s <= 2) {
    Vec cand(s);
    const std::size_t total = s == 1 ? kGridPoints : kGridPoints * kGridPoints;
    for (std::size_t k = 0; k < total; ++k) {
      cand[0] = grid(k % kGridPoints);
      if (s == 2) cand[1] = grid(k / kGridPoints);
      const double v = value_of(cand);
      ++evals;
      if (v > best) {
        best = v;
        x = cand;
      }
    }
  } else {
    for (int sweep = 0; sweep < 50; ++sweep) {
      bool moved = false;
      for (std::size_t j = 0; j < s; ++j) {
        Vec cand = x;
        for (std::size_t k = 0; k < kGridPoints; ++k) {
          cand[j] = grid(k);
          const double v = value_of(cand);
          ++evals;
          if (v > best) {
            best = v;
            x[j] = cand[j];
            moved = true;
          }
        }
      }
      if (!moved) break;
    }
  }

  // Pattern search refinement around the grid optimum.
  for (double h = 0.5 / (kGridPoints - 1); h >= kPatternFloor;) {
    bool improved = false;
    for (std::size_t j = 0; j < s; ++j) {
      for (double dir : {1.0, -1.0}) {
        Vec cand = x;
        cand[j] = clip01(x[j] + dir * h);
        if (cand[j] == x[j]) continue;
        const double v = value_of(cand);
        ++evals;
        if (v > best) {
          best = v;
          x = cand;
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }

  rep.iterations = evals;
  rep.fractions = x;
  rep.opt_value = best;
  for (std::size_t j = 0; j < s; ++j) {
    add_scaled(rep.e_v_opt_stoch, support[j].consumption,
               static_cast<double>(stoch_count) * probs[j] * x[j]);
  }
  return rep;
}

}  // namespace robustpd
