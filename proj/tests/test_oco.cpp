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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle_util.hpp"
#include "robustpd/error.hpp"
#include "robustpd/oco.hpp"

using robustpd::CostFunction;
using robustpd::Mutation;
using robustpd::OcoState;
using robustpd::Vec;

namespace {

CostFunction quad1() { return CostFunction::sum_of_powers({1.0}, 2.0); }

}  // namespace

TEST(OcoIterate, FirstTwoIterates) {
  OcoState s(quad1(), 1.0 / 8);
  EXPECT_NEAR(s.next_iterate()[0], 32.0 / 9.0, 1e-14);
  EXPECT_DOUBLE_EQ(s.ftl_iterate()[0], 4.0);
  s.observe(Vec{1.0}, 1.0 / 8);
  EXPECT_NEAR(s.next_iterate()[0], 3.6, 1e-14);
  EXPECT_NEAR(s.ftl_iterate()[0], 2.0 * 9.0 / (4.0 * 1.125), 1e-14);
  EXPECT_EQ(s.t(), 2u);
}

TEST(OcoIterate, NextIterateDoesNotMutate) {
  OcoState s(quad1(), 1.0 / 8);
  const Vec a = s.next_iterate();
  const Vec b = s.next_iterate();
  EXPECT_EQ(a, b);
  EXPECT_EQ(s.t(), 1u);
}

TEST(OcoIterate, ScalingArgumentLeavesHomogeneousGradientDirection) {
  const Vec cum{3.0, 1.0};
  const Vec a = robustpd::ssftrl_argument(2.0, cum, 0.5, 0.125);
  // (8 + cum) / (4 * 1.625)
  EXPECT_NEAR(a[0], 11.0 / 6.5, 1e-14);
  EXPECT_NEAR(a[1], 9.0 / 6.5, 1e-14);
  const Vec none = robustpd::ssftrl_argument(2.0, cum, 0.5, 0.125, 0.0);
  EXPECT_NEAR(none[0], 3.0 / 6.5, 1e-14);
}

TEST(OcoIterate, ZeroRegularizerMatchesFtl) {
  OcoState s(CostFunction::sum_of_powers({1.0, 2.0}, 3.0), 0.0);
  EXPECT_EQ(s.next_iterate(), s.ftl_iterate());
  s.observe(Vec{0.5, 1.0}, 0.0);
  EXPECT_EQ(s.next_iterate(), s.ftl_iterate());
}

TEST(OcoIterate, RejectsRegularizerAboveCap) {
  try {
    OcoState s(quad1(), 0.2);
    FAIL() << "expected an error";
  } catch (const robustpd::Error& e) {
    EXPECT_EQ(e.kind(), robustpd::ErrorKind::Configuration);
  }
  EXPECT_NO_THROW(OcoState(quad1(), 0.125));
}

TEST(OcoObserve, RejectsBadLoads) {
  OcoState s(quad1(), 1.0 / 8);
  EXPECT_THROW(s.observe(Vec{1.5}, 0.125), robustpd::Error);
  EXPECT_THROW(s.observe(Vec{1.0, 0.0}, 0.125), robustpd::Error);
  EXPECT_THROW(s.observe(Vec{1.0}, 0.3), robustpd::Error);
}

TEST(OcoObserve, ZeroStepOnlyMovesConjugateMax) {
  OcoState s(quad1(), 1.0 / 8);
  const auto d = s.observe(Vec{0.0}, 0.0);
  EXPECT_EQ(d.half_fake_gain, 0.0);
  EXPECT_EQ(d.inner, 0.0);
  EXPECT_EQ(d.ftl_gain, 0.0);
  const double y = 32.0 / 9.0;
  EXPECT_NEAR(d.iterate_conjugate, y * y / 4.0, 1e-12);
  EXPECT_NEAR(s.ledger().max_conjugate, y * y / 4.0, 1e-12);
}

TEST(BeTheLeader, InitialGain) {
  OcoState s(quad1(), 1.0 / 8);
  EXPECT_DOUBLE_EQ(s.ledger().initial_gain, 16.0);
  const auto r = robustpd::check_btl(s);
  EXPECT_TRUE(r.passed());
}

TEST(BeTheLeader, AllZeroRunIsStrictInequality) {
  // Telescoping the all-zero run by hand: 16 - (1/2) psi*(32/9) against
  // 4.5 psi(2/1.125).
  OcoState s(quad1(), 1.0 / 8);
  s.observe(Vec{0.0}, 1.0 / 8);
  const double y2 = 2.0 * 2.0 / 1.125;
  const double lhs = 16.0 - 4.0 * 0.125 * (y2 * y2 / 4.0);
  const double rhs = 4.0 * 1.125 * std::pow(2.0 / 1.125, 2);
  EXPECT_NEAR(s.ledger().initial_gain + s.ledger().ftl_gain, lhs, 1e-12);
  EXPECT_GT(lhs, rhs);
  const auto r = robustpd::check_btl(s);
  EXPECT_TRUE(r.passed());
}

TEST(Stability, WorkedPair) {
  OcoState s(quad1(), 1.0 / 8);
  s.observe(Vec{1.0}, 1.0 / 8);
  EXPECT_TRUE(robustpd::check_stability(s).passed());
  const auto& h = s.history().front();
  EXPECT_LE(h.iterate[0], h.ftl_next[0]);
  EXPECT_LE(h.ftl_next[0], 2 * h.iterate[0]);
}

TEST(Stability, ZeroLoadsAndRegularizerCap) {
  for (double p : {2.0, 3.0}) {
    const auto n = static_cast<std::size_t>(4 * p);
    OcoState s(CostFunction::sum_of_powers({1.0, 0.5}, p), 1.0 / n);
    for (std::size_t t = 0; t < n; ++t) s.observe(Vec{0.0, 0.0}, 1.0 / n);
    EXPECT_TRUE(robustpd::check_stability(s).passed()) << p;
    OcoState one(CostFunction::sum_of_powers({1.0, 0.5}, p), 1.0 / (4 * p));
    for (std::size_t t = 0; t < n; ++t) one.observe(Vec{1.0, 1.0}, 1.0 / n);
    EXPECT_TRUE(robustpd::check_stability(one).passed()) << p;
  }
}

TEST(DominatingSet, UniformGammaQuadratic) {
  OcoState s(quad1(), 1.0 / 8);
  for (int t = 0; t < 8; ++t) s.observe(Vec{1.0}, 1.0 / 8);
  const auto d = robustpd::dominating_set(s);
  EXPECT_EQ(d.times, (std::vector<std::size_t>{4, 8}));
  EXPECT_TRUE(d.check.passed());
  EXPECT_LE(d.max_ratio, std::exp(1.0));
  for (std::size_t t = 1; t <= 8; ++t) EXPECT_GE(d.witness[t - 1], t);
}

TEST(DominatingSet, LinearOrderIsSingleTime) {
  OcoState s(CostFunction::sum_of_powers({1.0}, 1.0), 1.0 / 8);
  for (int t = 0; t < 8; ++t) s.observe(Vec{0.5}, 1.0 / 8);
  const auto d = robustpd::dominating_set(s);
  EXPECT_EQ(d.times, (std::vector<std::size_t>{8}));
}

TEST(DominatingSet, IncompleteRunIsStructuralError) {
  OcoState s(quad1(), 1.0 / 8);
  s.observe(Vec{1.0}, 1.0 / 8);
  try {
    robustpd::dominating_set(s);
    FAIL();
  } catch (const robustpd::Error& e) {
    EXPECT_EQ(e.kind(), robustpd::ErrorKind::Structural);
  }
}

TEST(RegretBounds, AllZeroRun) {
  OcoState s(CostFunction::sum_of_powers({1.0, 1.0, 1.0}, 2.0), 1.0 / 16);
  for (int t = 0; t < 16; ++t) s.observe(Vec{0, 0, 0}, 1.0 / 16);
  EXPECT_TRUE(robustpd::check_regret_bounds(s).passed());
}

// Random runs with mixed gamma patterns; every iterate is also compared with
// the formula written out in the test oracle.
TEST(RegretBounds, RandomRunsAgainstReferenceIterates) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int run = 0; run < 60; ++run) {
    const std::size_t m = 1 + run % 3;
    const double p = 2.0 + run % 3;
    const std::size_t n = static_cast<std::size_t>(4 * p) + run % 9;
    Vec w(m);
    for (auto& x : w) x = 0.5 + 1.5 * unit(gen);
    const auto f = CostFunction::sum_of_powers(w, p);
    const double gbar = 1.0 / n;
    OcoState s(f, gbar);
    Vec cum(m, 0.0);
    double cum_gamma = 0;
    // Pick exactly n gamma steps among n positions, sometimes with zeros
    // interleaved by shortening: keep total gamma at 1.
    std::size_t zero_budget = run % 4;
    std::size_t gamma_left = n;
    while (gamma_left > 0) {
      const Vec ref = testing_oracle::ssftrl_power_iterate(w, p, cum, cum_gamma, gbar);
      const Vec got = s.next_iterate();
      for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(got[i], ref[i], 1e-12 * std::max(1.0, ref[i]));
      Vec v(m);
      for (auto& x : v) x = unit(gen) < 0.2 ? 0.0 : unit(gen);
      double g = gbar;
      if (zero_budget > 0 && unit(gen) < 0.3) {
        g = 0.0;
        --zero_budget;
      } else {
        --gamma_left;
      }
      s.observe(v, g);
      for (std::size_t i = 0; i < m; ++i) cum[i] += v[i];
      cum_gamma += g;
    }
    EXPECT_TRUE(robustpd::check_btl(s).passed()) << run;
    EXPECT_TRUE(robustpd::check_stability(s).passed()) << run;
    EXPECT_TRUE(robustpd::check_regret_bounds(s).passed()) << run;
    const auto d = robustpd::dominating_set(s);
    EXPECT_TRUE(d.check.passed()) << run;
    EXPECT_LE(d.times.size(), static_cast<std::size_t>(std::ceil(p)));
    // Item 1 recomputed from the trace with the oracle's power sum.
    Vec eighth(m);
    for (std::size_t i = 0; i < m; ++i) eighth[i] = cum[i] / 8.0;
    const double shift = testing_oracle::power_sum(w, p, Vec(m, p));
    EXPECT_GE(s.ledger().half_fake_gain,
              testing_oracle::power_sum(w, p, eighth) - shift - 1e-8 * std::max(1.0, shift));
  }
}

TEST(Mutations, NoShiftBreaksStabilityOnZeroStart) {
  OcoState s(quad1(), 1.0 / 8, Mutation::NoShift);
  EXPECT_EQ(s.next_iterate()[0], 0.0);
  for (int t = 0; t < 8; ++t) s.observe(Vec{1.0}, 1.0 / 8);
  EXPECT_FALSE(robustpd::check_stability(s).passed());
}
