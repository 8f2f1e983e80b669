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

// Reference computations used as independent ground truth in tests. None of
// these call into the library's own solvers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace testing_oracle {

using Vec = std::vector<double>;

// sup over u in [0, hi] of y u - phi(u) for a convex phi: coarse grid, then
// ternary search around the best grid cell.
inline double numeric_sup(const std::function<double(double)>& phi, double y, double hi,
                          int grid = 2000) {
  double best_u = 0.0;
  double best = -phi(0.0);
  for (int k = 1; k <= grid; ++k) {
    const double u = hi * k / grid;
    const double v = y * u - phi(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  double lo = std::max(0.0, best_u - hi / grid);
  double up = std::min(hi, best_u + hi / grid);
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (up - lo) / 3.0;
    const double b = up - (up - lo) / 3.0;
    if (y * a - phi(a) < y * b - phi(b)) {
      lo = a;
    } else {
      up = b;
    }
  }
  const double u = 0.5 * (lo + up);
  return std::max(best, y * u - phi(u));
}

// sum_i w_i u_i^p
inline double power_sum(const Vec& w, double p, const Vec& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(u[i], p);
  return s;
}

// Iterate of the shifted and scaled FTRL for sum_i w_i u_i^p, written out
// from the defining formula.
inline Vec ssftrl_power_iterate(const Vec& w, double p, const Vec& cum_load, double cum_gamma,
                                double gamma_bar) {
  Vec y(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double arg = (4.0 * p + cum_load[i]) / (4.0 * (1.0 + cum_gamma + gamma_bar));
    y[i] = w[i] * p * std::pow(arg, p - 1.0);
  }
  return y;
}

// Conjugate of sum_i w_i u_i^p by the numeric sup, coordinate by coordinate.
inline double power_conjugate_numeric(const Vec& w, double p, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wi = w[i];
    // maximizer is (y / (w p))^(1/(p-1)); search well past it.
    const double peak = std::pow(y[i] / (wi * p), 1.0 / (p - 1.0));
    s += numeric_sup([wi, p](double u) { return wi * std::pow(u, p); }, y[i], 4.0 * peak + 1.0);
  }
  return s;
}

// Every sequence of `draws` indices over `probs`, weighted by its probability.
inline void for_each_sequence(const Vec& probs, std::size_t draws,
                              const std::function<void(const std::vector<std::size_t>&, double)>& fn) {
  std::vector<std::size_t> seq(draws, 0);
  const std::size_t s = probs.size();
  for (;;) {
    double pr = 1.0;
    for (std::size_t j : seq) pr *= probs[j];
    fn(seq, pr);
    std::size_t k = 0;
    while (k < draws && ++seq[k] == s) seq[k++] = 0;
    if (k == draws) break;
  }
}

// Integer power by repeated multiplication (grid oracles only).
inline double ipow(double x, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}

}  // namespace testing_oracle
