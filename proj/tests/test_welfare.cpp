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

#include <random>

#include "robustpd/error.hpp"
#include "robustpd/welfare.hpp"

using robustpd::CostFunction;
using robustpd::Request;
using robustpd::Vec;

namespace {

std::vector<Request> random_requests(std::mt19937_64& gen, std::size_t n, std::size_t m) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Request> out;
  for (std::size_t t = 0; t < n; ++t) {
    Request r;
    r.reward = -1.0 + 5.0 * unit(gen);
    r.consumption.resize(m);
    for (auto& a : r.consumption) a = unit(gen) < 0.3 ? 0.0 : unit(gen);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(VirtualBestResponse, Examples) {
  EXPECT_EQ(robustpd::virtual_best_response(Vec{1, 2}, Request{5, {1, 1}}), 1.0);
  EXPECT_EQ(robustpd::virtual_best_response(Vec{1, 2}, Request{0, {0.5, 0.1}}), 0.0);
  EXPECT_EQ(robustpd::virtual_best_response(Vec{1, 2}, Request{3, {1, 1}}), 0.0);
  EXPECT_EQ(robustpd::kPlayScale, 0.015625);
}

TEST(RequestTest, Validation) {
  EXPECT_THROW((Request{1, {1.5}}).validate(), robustpd::Error);
  EXPECT_THROW((Request{1, {}}).validate(), robustpd::Error);
  EXPECT_NO_THROW((Request{-3, {0.0, 1.0}}).validate());
}

TEST(RunWelfare, NonPositiveRewardsGiveZeroProfit) {
  const auto f = CostFunction::sum_of_powers({1, 1}, 2);
  std::vector<Request> reqs;
  for (int t = 0; t < 8; ++t) reqs.push_back(Request{-0.5 * t, {0.3, 0.9}});
  const auto tr = robustpd::run_welfare(reqs, f);
  for (const auto& s : tr.steps) EXPECT_EQ(s.virtual_play, 0.0);
  EXPECT_EQ(tr.profit, 0.0);
}

TEST(RunWelfare, SingleRequestTypeProfit) {
  const auto f = CostFunction::sum_of_powers({1}, 2);
  const std::vector<Request> reqs(8, Request{100, {1}});
  const auto tr = robustpd::run_welfare(reqs, f);
  for (const auto& s : tr.steps) {
    EXPECT_EQ(s.virtual_play, 1.0);
    EXPECT_EQ(s.played, 0.015625);
    EXPECT_LT(s.dual[0], 100.0);
  }
  EXPECT_NEAR(tr.steps[0].dual[0], 32.0 / 9.0, 1e-14);
  EXPECT_EQ(tr.played_load, (Vec{0.125}));
  EXPECT_EQ(tr.profit, 12.484375);

  const std::vector<bool> all(8, true);
  const std::vector<double> xstar(8, 1.0);
  EXPECT_TRUE(robustpd::check_welfare_realization(tr, reqs, all, xstar).passed());
  // OPT_Stoch = 100*8 - 8^2 with beta = 1
  const auto bound = robustpd::check_expected_profit_bound(tr.profit, 0.0, 736.0, 8, 8, f.shift_value());
  EXPECT_TRUE(bound.passed());
}

TEST(RunWelfare, LinearPartIsReducedOut) {
  const auto f = CostFunction::linear_plus_power({1}, {2}, 2);
  // reward 1.5 < slope 2: the reduced reward is negative, never accepted
  const std::vector<Request> reqs(8, Request{1.5, {1}});
  const auto tr = robustpd::run_welfare(reqs, f);
  EXPECT_EQ(tr.linear_slopes, (Vec{2}));
  EXPECT_DOUBLE_EQ(tr.steps[0].reduced_reward, -0.5);
  EXPECT_EQ(tr.profit, 0.0);
}

TEST(Decomposition, QuadraticGrowth) {
  const auto q = CostFunction::sum_of_powers({1}, 2);
  EXPECT_DOUBLE_EQ(q.eval(Vec{2}), 4 * q.eval(Vec{1}));
  EXPECT_NO_THROW(robustpd::decompose_for_welfare(q));
  const auto lp = robustpd::decompose_for_welfare(CostFunction::linear_plus_power({1, 2}, {0.5, 0}, 3));
  EXPECT_EQ(lp.linear_slopes, (Vec{0.5, 0}));
  EXPECT_EQ(lp.high.family(), robustpd::Family::SumOfPowers);
  try {
    robustpd::decompose_for_welfare(CostFunction::sum_of_powers({1}, 1.5));
    FAIL();
  } catch (const robustpd::Error& e) {
    EXPECT_EQ(e.kind(), robustpd::ErrorKind::Configuration);
  }
}

TEST(Realization, RandomRunsSatisfyChain) {
  const auto f = CostFunction::sum_of_powers({1, 0.7}, 2);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < 30; ++r) {
    const auto reqs = random_requests(gen, 10, 2);
    const auto tr = robustpd::run_welfare(reqs, f);
    std::vector<bool> mask(10);
    std::vector<double> xs(10);
    for (std::size_t t = 0; t < 10; ++t) {
      mask[t] = unit(gen) < 0.5;
      xs[t] = unit(gen);
    }
    const auto rep = robustpd::check_welfare_realization(tr, reqs, mask, xs);
    EXPECT_TRUE(rep.passed()) << r;
    EXPECT_GE(tr.profit, -1e-12);
  }
}

TEST(ExpectedProfit, NoStochasticStepsDropsOpt) {
  const auto rep = robustpd::check_expected_profit_bound(0.0, 0.0, 123.0, 8, 0, 8.0);
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(rep.worst_slack, 8.0 / 64.0, 1e-12);
}

TEST(Mixture, ArmsAndCoin) {
  const auto f = CostFunction::sum_of_powers({1}, 2);
  const std::vector<Request> reqs(8, Request{100, {1}});
  robustpd::GreedyMarginalPolicy greedy;
  const auto a = robustpd::mixture_wrapper(reqs, f, greedy, 1, robustpd::MixtureArm::PrimalDual);
  ASSERT_TRUE(a.trace.has_value());
  EXPECT_EQ(a.profit, robustpd::run_welfare(reqs, f).profit);

  std::vector<Request> bad;
  for (int t = 0; t < 8; ++t) bad.push_back(Request{-1.0, {0.5}});
  const auto b = robustpd::mixture_wrapper(bad, f, greedy, 1, robustpd::MixtureArm::Adversarial);
  EXPECT_FALSE(b.trace.has_value());
  for (double x : b.played) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(b.profit, 0.0);

  // the coin is fair over many seeds and each arm's profit averages in
  int heads = 0;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    heads += robustpd::mixture_coin(s) == robustpd::MixtureArm::PrimalDual;
  }
  EXPECT_NEAR(heads / 4000.0, 0.5, 0.03);
  const auto g = robustpd::mixture_wrapper(reqs, f, greedy, 0, robustpd::MixtureArm::Adversarial);
  double avg = 0;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    avg += robustpd::mixture_wrapper(reqs, f, greedy, s).profit;
  }
  avg /= 4000.0;
  EXPECT_NEAR(avg, 0.5 * (a.profit + g.profit), 0.03 * std::abs(g.profit - a.profit) + 1e-9);
}

TEST(WelfareProfit, Evaluates) {
  const auto f = CostFunction::sum_of_powers({1}, 2);
  const std::vector<Request> reqs{Request{4, {1}}, Request{1, {0.5}}};
  EXPECT_DOUBLE_EQ(robustpd::welfare_profit(reqs, Vec{1, 0}, f), 3.0);
  EXPECT_DOUBLE_EQ(robustpd::welfare_profit(reqs, Vec{1, 1}, f), 5.0 - 2.25);
}
