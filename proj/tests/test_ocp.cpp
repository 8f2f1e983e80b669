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
#include "robustpd/ocp.hpp"

using robustpd::CostFunction;
using robustpd::FeasibleSet;
using robustpd::Vec;

namespace {

FeasibleSet machines2() { return FeasibleSet({Vec{1, 0}, Vec{0, 1}}); }

std::vector<FeasibleSet> random_sets(std::mt19937_64& gen, std::size_t n, std::size_t m) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<FeasibleSet> out;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t k = 1 + gen() % 3;
    std::vector<Vec> opts;
    for (std::size_t j = 0; j < k; ++j) {
      Vec v(m);
      for (auto& x : v) x = unit(gen) < 0.3 ? 0.0 : unit(gen);
      opts.push_back(v);
    }
    out.emplace_back(opts);
  }
  return out;
}

}  // namespace

TEST(BestResponse, Examples) {
  const auto f = CostFunction::sum_of_powers({1, 1}, 2);
  const FeasibleSet three({Vec{1, 0}, Vec{0, 1}, Vec{0.5, 0.5}});
  auto r = robustpd::best_response(Vec{1, 2}, three, 0.125, f);
  EXPECT_EQ(r.index, 0u);
  EXPECT_NEAR(r.fake_cost, 1.0 - 0.125 * f.conj(Vec{1, 2}), 1e-14);
  EXPECT_EQ(robustpd::best_response(Vec{0, 0}, three, 0.125, f).index, 0u);
  const FeasibleSet two({Vec{0.3, 0.3}, Vec{0.2, 0.5}});
  EXPECT_EQ(robustpd::best_response(Vec{1, 1}, two, 0.125, f).index, 0u);
}

TEST(FeasibleSetTest, RejectsBadOptions) {
  EXPECT_THROW(FeasibleSet({}), robustpd::Error);
  EXPECT_THROW(FeasibleSet({Vec{1, 0}, Vec{1}}), robustpd::Error);
}

TEST(RunOcp, SingletonZeroSets) {
  const auto f = CostFunction::sum_of_powers({1, 1}, 2);
  const std::vector<FeasibleSet> sets(8, FeasibleSet({Vec{0, 0}}));
  const auto tr = robustpd::run_ocp(sets, f);
  EXPECT_EQ(tr.cost, 0.0);
  EXPECT_EQ(tr.n(), 8u);
}

TEST(RunOcp, ForcedUnitLoads) {
  const auto f = CostFunction::sum_of_powers({1}, 2);
  const std::vector<FeasibleSet> sets(8, FeasibleSet({Vec{1}}));
  EXPECT_DOUBLE_EQ(robustpd::run_ocp(sets, f).cost, 64.0);
}

TEST(RunOcp, BalancesTwoMachinesAndMatchesBruteForce) {
  const auto f = CostFunction::sum_of_powers({1, 1}, 2);
  const std::vector<FeasibleSet> sets(8, machines2());
  const auto tr = robustpd::run_ocp(sets, f);
  EXPECT_EQ(tr.total_load, (Vec{4, 4}));
  EXPECT_DOUBLE_EQ(tr.cost, 32.0);
  double best = 1e300;
  for (unsigned mask = 0; mask < 256; ++mask) {
    const double a = __builtin_popcount(mask);
    best = std::min(best, a * a + (8 - a) * (8 - a));
  }
  EXPECT_DOUBLE_EQ(tr.cost, best);
  EXPECT_TRUE(robustpd::check_cost_certificate(tr).passed());
}

TEST(RunOcp, TooShortHorizonIsConfigurationError) {
  const auto f = CostFunction::sum_of_powers({1, 1}, 2);
  const std::vector<FeasibleSet> sets(7, machines2());
  try {
    robustpd::run_ocp(sets, f);
    FAIL();
  } catch (const robustpd::Error& e) {
    EXPECT_EQ(e.kind(), robustpd::ErrorKind::Configuration);
  }
}

TEST(RunOcp, LinearOracleMatchesExplicitSets) {
  const auto f = CostFunction::sum_of_powers({1, 2}, 2);
  std::mt19937_64 gen(9);
  const auto sets = random_sets(gen, 10, 2);
  const auto a = robustpd::run_ocp(sets, f);
  const auto b = robustpd::run_ocp(
      sets.size(),
      [&](std::size_t t, std::span<const double> y) {
        return sets[t][robustpd::best_response(y, sets[t], 0.0, f).index];
      },
      f);
  EXPECT_EQ(a.total_load, b.total_load);
  EXPECT_EQ(a.cost, b.cost);
}

TEST(CostCertificate, ZeroInstanceAndRandomRuns) {
  const auto f = CostFunction::sum_of_powers({1, 1, 1}, 2);
  const std::vector<FeasibleSet> zeros(16, FeasibleSet({Vec{0, 0, 0}}));
  EXPECT_TRUE(robustpd::check_cost_certificate(robustpd::run_ocp(zeros, f)).passed());
  std::mt19937_64 gen(17);
  for (int r = 0; r < 30; ++r) {
    const auto sets = random_sets(gen, 16, 3);
    const auto tr = robustpd::run_ocp(sets, f);
    const auto rep = robustpd::check_cost_certificate(tr);
    EXPECT_TRUE(rep.passed()) << r;
    // join form is at least as tight as the max form
    EXPECT_LE(rep.separable.worst_slack, rep.general.worst_slack + 1e-12);
  }
}

TEST(AdversarialPart, NoAdversarialStepsAndRandomMixedRuns) {
  const double p = 2.0;
  const auto f = CostFunction::sum_of_powers({1, 0.5}, p);
  std::mt19937_64 gen(23);
  const auto sets = random_sets(gen, 12, 2);
  const auto tr = robustpd::run_ocp(sets, f);
  auto rep = robustpd::check_adversarial_part(tr, 2 * p, {}, {});
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.lhs, 0.0);
  for (int r = 0; r < 20; ++r) {
    const auto s = random_sets(gen, 12, 2);
    const auto t = robustpd::run_ocp(s, f);
    std::vector<std::size_t> adv;
    std::vector<Vec> choice;
    for (std::size_t k = 0; k < 12; ++k) {
      if (gen() % 2) {
        adv.push_back(k);
        choice.push_back(s[k][gen() % s[k].size()]);
      }
    }
    EXPECT_TRUE(robustpd::check_adversarial_part(t, 2 * std::exp(1.0) * p * p, adv, choice).passed());
    EXPECT_TRUE(robustpd::check_adversarial_part(t, 2 * p, adv, choice).join_form.passed());
  }
  EXPECT_THROW(robustpd::check_adversarial_part(tr, 0.5, {}, {}), robustpd::Error);
}

TEST(FakeCost, SumsRecordedDuals) {
  const auto f = CostFunction::sum_of_powers({1, 1}, 2);
  const std::vector<FeasibleSet> sets(8, machines2());
  const auto tr = robustpd::run_ocp(sets, f);
  const std::vector<std::size_t> times{0, 3};
  const std::vector<Vec> ch{Vec{0, 1}, Vec{1, 0}};
  double expect = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    const Vec& y = tr.steps[times[k]].dual;
    expect += y[0] * ch[k][0] + y[1] * ch[k][1] - f.conj(y) / 8.0;
  }
  EXPECT_NEAR(robustpd::fake_cost_of(tr, times, ch), expect, 1e-12);
  double total = 0;
  for (const auto& s : tr.steps) total += s.fake_cost;
  EXPECT_NEAR(tr.fake_cost_total(), total, 1e-12);
}

TEST(LoadBalance, Examples) {
  const std::vector<FeasibleSet> one{FeasibleSet({Vec{1, 0, 0, 0}, Vec{0, 1, 0, 0},
                                                  Vec{0, 0, 1, 0}, Vec{0, 0, 0, 1}})};
  // a single job needs n >= 4p', so repeat zero jobs around it
  std::vector<FeasibleSet> padded(8, FeasibleSet({Vec{0, 0, 0, 0}}));
  padded[0] = one[0];
  const auto r = robustpd::run_loadbalance(padded, 3.0, 4);
  EXPECT_DOUBLE_EQ(r.norm_requested, 1.0);
  EXPECT_DOUBLE_EQ(r.norm_effective, 1.0);

  const std::vector<FeasibleSet> jobs(8, machines2());
  const auto lb = robustpd::run_loadbalance(jobs, 2.0, 2);
  EXPECT_EQ(lb.trace.total_load, (Vec{4, 4}));
  EXPECT_DOUBLE_EQ(lb.norm_requested, std::sqrt(32.0));
}

TEST(LoadBalance, EffectiveOrderAndNormComparison) {
  EXPECT_EQ(robustpd::effective_load_balance_order(2.0, 2), 2.0);
  EXPECT_EQ(robustpd::effective_load_balance_order(10.0, 2), 2.0);
  EXPECT_EQ(robustpd::effective_load_balance_order(10.0, 100), std::ceil(std::log(100.0)));
  EXPECT_EQ(robustpd::effective_load_balance_order(3.0, 100), 3.0);
  std::mt19937_64 gen(31);
  const std::size_t m = 30;
  std::vector<FeasibleSet> jobs;
  for (int t = 0; t < 40; ++t) {
    std::vector<Vec> opts;
    for (int k = 0; k < 3; ++k) {
      Vec v(m, 0.0);
      v[gen() % m] = 1.0;
      opts.push_back(v);
    }
    jobs.emplace_back(opts);
  }
  const double p = 8.0;
  const auto r = robustpd::run_loadbalance(jobs, p, m);
  const double pe = r.effective_p;
  EXPECT_EQ(pe, 4.0);
  EXPECT_LE(r.norm_requested, r.norm_effective + 1e-12);
  EXPECT_LE(r.norm_effective,
            std::pow(static_cast<double>(m), 1.0 / pe - 1.0 / p) * r.norm_requested + 1e-12);
}

TEST(LpNorm, Values) {
  EXPECT_DOUBLE_EQ(robustpd::lp_norm(Vec{3, 4}, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(robustpd::lp_norm(Vec{1, 2}, 1.0), 3.0);
}

TEST(Homogeneous, AllStochasticIsIdentity) {
  const auto f = CostFunction::sum_of_powers({1, 1}, 2);
  const std::vector<FeasibleSet> sets(8, machines2());
  const auto tr = robustpd::run_ocp(sets, f);
  const auto rep = robustpd::check_homogeneous_equivalence(tr, sets, std::vector<bool>(8, true));
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(rep.min_alpha, 1.0, 1e-12);
  EXPECT_LE(rep.max_spread, 1e-12);
}

TEST(Homogeneous, MixedRunKeepsChoices) {
  const auto f = CostFunction::sum_of_powers({1, 1}, 2);
  std::mt19937_64 gen(41);
  for (int r = 0; r < 20; ++r) {
    const auto sets = random_sets(gen, 8, 2);
    const auto tr = robustpd::run_ocp(sets, f);
    std::vector<bool> mask(8, false);
    for (std::size_t k : {1u, 2u, 5u, 7u}) mask[k] = true;
    const auto rep = robustpd::check_homogeneous_equivalence(tr, sets, mask);
    EXPECT_TRUE(rep.passed()) << r;
    EXPECT_GT(rep.min_alpha, 0.0);
    EXPECT_LE(rep.max_spread, 1e-9);
  }
}

TEST(Homogeneous, NeedsHomogeneousCost) {
  const auto f = CostFunction::linear_plus_power({1, 1}, {0.5, 0.5}, 2);
  const std::vector<FeasibleSet> sets(8, machines2());
  const auto tr = robustpd::run_ocp(sets, f);
  EXPECT_THROW(robustpd::check_homogeneous_equivalence(tr, sets, std::vector<bool>(8, true)),
               robustpd::Error);
}
