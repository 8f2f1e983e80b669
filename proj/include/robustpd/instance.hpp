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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "robustpd/convex.hpp"
#include "robustpd/ocp.hpp"
#include "robustpd/welfare.hpp"

namespace robustpd {

enum class ProblemKind { Ocp, Welfare };

const char* problem_name(ProblemKind k) noexcept;

using Payload = std::variant<FeasibleSet, Request>;

struct TimelineEntry {
  bool stochastic = false;
  std::optional<Payload> data;  // set iff !stochastic

  friend bool operator==(const TimelineEntry&, const TimelineEntry&) = default;
};

struct Distribution {
  std::vector<Payload> support;
  std::vector<double> probs;

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

// A mixed-model instance: the adversarial entries are fixed in advance and
// every stochastic entry is an independent draw from `distribution`.
struct MixedInstance {
  ProblemKind problem = ProblemKind::Ocp;
  std::size_t n = 0;
  std::size_t m = 0;
  CostFunction cost;
  std::vector<TimelineEntry> timeline;
  Distribution distribution;
  std::uint64_t seed = 0;

  // Throws Error(Schema|Dimension|Domain) on any broken invariant.
  void validate() const;

  std::vector<std::size_t> adv_times() const;    // 0-based
  std::vector<std::size_t> stoch_times() const;  // 0-based
  std::vector<bool> stoch_mask() const;

  friend bool operator==(const MixedInstance&, const MixedInstance&) = default;
};

inline constexpr std::size_t kNotDrawn = static_cast<std::size_t>(-1);

struct Realization {
  std::vector<Payload> steps;
  std::vector<Origin> origins;
  std::vector<std::size_t> drawn;  // support index per step, kNotDrawn on adv steps

  std::vector<FeasibleSet> sets() const;
  std::vector<Request> requests() const;
};

// Draw for step t of replication r is keyed by (seed, r, t) only.
Realization sample_realization(const MixedInstance& inst, std::uint64_t replication,
                               std::optional<std::uint64_t> seed_override = std::nullopt);

// Index into probs selected by a uniform u in [0, 1).
std::size_t pick_index(std::span<const double> probs, double u);

// On-disk format, schema version "v1".
std::string instance_to_json(const MixedInstance& inst, int indent = 2);
MixedInstance instance_from_json(std::string_view text);
MixedInstance load_instance(const std::filesystem::path& path);
void save_instance(const MixedInstance& inst, const std::filesystem::path& path);

enum class Placement { Prefix, Suffix, Random, Interleaved };

const char* placement_name(Placement p) noexcept;
Placement parse_placement(std::string_view s);

struct GeneratorParams {
  ProblemKind problem = ProblemKind::Ocp;
  std::size_t n = 8;
  std::size_t m = 2;
  double p = 2.0;
  Family family = Family::SumOfPowers;
  std::size_t adv_count = 0;
  Placement placement = Placement::Prefix;
  std::size_t support_size = 2;
  std::size_t min_options = 1;
  std::size_t max_options = 3;
  double reward_lo = -1.0;
  double reward_hi = 4.0;
};

// Deterministic in (params, seed).
MixedInstance generate(const GeneratorParams& params, std::uint64_t seed);

// Adversarial positions chosen by the placement rule (0-based, increasing).
std::vector<std::size_t> adversarial_positions(std::size_t n, std::size_t adv_count,
                                               Placement placement, std::uint64_t seed);

}  // namespace robustpd
