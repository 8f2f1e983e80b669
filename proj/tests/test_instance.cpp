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

#include <filesystem>
#include "json.hpp"

#include "robustpd/error.hpp"
#include "robustpd/instance.hpp"

using namespace robustpd;

namespace {

GeneratorParams ocp_params(std::size_t adv, Placement placement) {
  GeneratorParams g;
  g.n = 8;
  g.adv_count = adv;
  g.placement = placement;
  return g;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::Structural;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Generator, PrefixPlacement) {
  const auto inst = generate(ocp_params(3, Placement::Prefix), 1);
  ASSERT_EQ(inst.timeline.size(), 8u);
  for (std::size_t t = 0; t < 8; ++t) EXPECT_EQ(inst.timeline[t].stochastic, t >= 3) << t;
  EXPECT_EQ(inst.adv_times(), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(inst.stoch_times().size(), 5u);
}

TEST(Generator, PureStochasticAndPureAdversarial) {
  const auto s = generate(ocp_params(0, Placement::Prefix), 2);
  EXPECT_TRUE(s.adv_times().empty());
  const auto a = generate(ocp_params(8, Placement::Random), 2);
  EXPECT_TRUE(a.stoch_times().empty());
  EXPECT_TRUE(a.distribution.support.empty());
  const auto r0 = sample_realization(a, 0);
  const auto r1 = sample_realization(a, 17);
  EXPECT_EQ(r0.sets(), r1.sets());
  for (std::size_t t = 0; t < 8; ++t) {
    EXPECT_EQ(r0.steps[t], *a.timeline[t].data);
    EXPECT_EQ(r0.origins[t], Origin::Adversarial);
    EXPECT_EQ(r0.drawn[t], kNotDrawn);
  }
}

TEST(Generator, PlacementsAreDistinctAndSized) {
  EXPECT_EQ(adversarial_positions(8, 3, Placement::Suffix, 0), (std::vector<std::size_t>{5, 6, 7}));
  const auto inter = adversarial_positions(8, 4, Placement::Interleaved, 0);
  EXPECT_EQ(inter.size(), 4u);
  const auto rnd = adversarial_positions(20, 7, Placement::Random, 3);
  EXPECT_EQ(rnd.size(), 7u);
  EXPECT_TRUE(std::is_sorted(rnd.begin(), rnd.end()));
  EXPECT_EQ(std::adjacent_find(rnd.begin(), rnd.end()), rnd.end());
  EXPECT_EQ(parse_placement("interleaved"), Placement::Interleaved);
  EXPECT_THROW(parse_placement("sideways"), Error);
}

TEST(Generator, DeterministicInSeed) {
  GeneratorParams g = ocp_params(3, Placement::Random);
  g.family = Family::LinearPlusPower;
  EXPECT_EQ(generate(g, 77), generate(g, 77));
  EXPECT_FALSE(generate(g, 77) == generate(g, 78));
  g.problem = ProblemKind::Welfare;
  EXPECT_EQ(generate(g, 5), generate(g, 5));
  EXPECT_NO_THROW(generate(g, 5).validate());
}

TEST(Sampling, SinglePointDistributionIsDeterministic) {
  auto inst = generate(ocp_params(2, Placement::Prefix), 4);
  inst.distribution.support.erase(inst.distribution.support.begin() + 1, inst.distribution.support.end());
  inst.distribution.probs = {1.0};
  const auto a = sample_realization(inst, 0);
  const auto b = sample_realization(inst, 99);
  EXPECT_EQ(a.sets(), b.sets());
}

TEST(Sampling, FairCoinFrequency) {
  GeneratorParams g = ocp_params(0, Placement::Prefix);
  g.n = 100;
  g.support_size = 2;
  auto inst = generate(g, 8);
  inst.distribution.probs = {0.5, 0.5};
  std::size_t zeros = 0;
  std::size_t total = 0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    const auto real = sample_realization(inst, r);
    for (std::size_t d : real.drawn) {
      zeros += d == 0;
      ++total;
    }
  }
  EXPECT_EQ(total, 100000u);
  EXPECT_NEAR(static_cast<double>(zeros) / total, 0.5, 0.01);
}

TEST(Sampling, KeyedBySeedReplicationAndTime) {
  const auto inst = generate(ocp_params(2, Placement::Interleaved), 12);
  EXPECT_EQ(sample_realization(inst, 3).drawn, sample_realization(inst, 3).drawn);
  EXPECT_EQ(sample_realization(inst, 3, 555).drawn, sample_realization(inst, 3, 555).drawn);
}

TEST(PickIndex, Boundaries) {
  const std::vector<double> probs{0.25, 0.5, 0.25};
  EXPECT_EQ(pick_index(probs, 0.0), 0u);
  EXPECT_EQ(pick_index(probs, 0.2499), 0u);
  EXPECT_EQ(pick_index(probs, 0.25), 1u);
  EXPECT_EQ(pick_index(probs, 0.9999999), 2u);
}

TEST(Json, RoundTripGeneratedInstances) {
  for (auto fam : {Family::SumOfPowers, Family::LinearPlusPower}) {
    for (auto prob : {ProblemKind::Ocp, ProblemKind::Welfare}) {
      GeneratorParams g = ocp_params(3, Placement::Random);
      g.family = fam;
      g.problem = prob;
      const auto inst = generate(g, 2026);
      EXPECT_EQ(instance_from_json(instance_to_json(inst)), inst);
    }
  }
}

TEST(Json, FileRoundTrip) {
  const auto inst = generate(ocp_params(3, Placement::Prefix), 3);
  const auto path = std::filesystem::temp_directory_path() / "robustpd_roundtrip.json";
  save_instance(inst, path);
  EXPECT_EQ(load_instance(path), inst);
  std::filesystem::remove(path);
  EXPECT_EQ(kind_of([] { load_instance("/nonexistent/dir/x.json"); }), ErrorKind::Io);
}

TEST(Json, MissingProbsNamesTheField) {
  auto j = nlohmann::json::parse(instance_to_json(generate(ocp_params(3, Placement::Prefix), 3)));
  j["distribution"].erase("probs");
  const std::string text = j.dump();
  EXPECT_EQ(kind_of([&] { instance_from_json(text); }), ErrorKind::Schema);
  EXPECT_NE(message_of([&] { instance_from_json(text); }).find("probs"), std::string::npos);
}

TEST(Json, OldVersionIsRejected) {
  auto j = nlohmann::json::parse(instance_to_json(generate(ocp_params(3, Placement::Prefix), 3)));
  j["version"] = "v0";
  const std::string text = j.dump();
  EXPECT_EQ(kind_of([&] { instance_from_json(text); }), ErrorKind::UnsupportedVersion);
}

TEST(Json, BrokenInputsAreSchemaErrors) {
  EXPECT_EQ(kind_of([] { instance_from_json("{not json"); }), ErrorKind::Schema);
  auto j = nlohmann::json::parse(instance_to_json(generate(ocp_params(3, Placement::Prefix), 3)));
  j["distribution"]["probs"] = {0.9, 0.9};
  const std::string text = j.dump();
  EXPECT_NE(kind_of([&] { instance_from_json(text); }), ErrorKind::UnsupportedVersion);
}
