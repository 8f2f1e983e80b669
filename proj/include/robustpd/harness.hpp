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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "robustpd/check.hpp"
#include "robustpd/instance.hpp"
#include "robustpd/oco.hpp"

namespace robustpd {

enum class CheckScope { All, Core, Oco, Ocp, Welfare };

const char* scope_name(CheckScope s) noexcept;
CheckScope parse_scope(std::string_view s);
Mutation parse_mutation(std::string_view s);

struct RunOptions {
  std::size_t replications = 1;
  std::optional<std::uint64_t> seed;  // overrides the instance seed for sampling
  Mutation mutation = Mutation::None;
  unsigned threads = 0;               // 0: ROBUSTPD_THREADS, else hardware
};

// Outcome of one check column in one row.
enum class Outcome { Pass, Fail, NotApplicable };

struct ReplicationRow {
  std::size_t replication = 0;
  double value = 0;  // cost for ocp/loadbalance, profit for welfare
  std::vector<Outcome> outcomes;
};

struct ExperimentReport {
  std::string experiment;  // "ocp", "welfare" or "loadbalance"
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  double p = 0;
  std::string family;
  std::size_t adv_count = 0;
  std::size_t stoch_count = 0;
  double beta = 0;  // n / |Stoch|, 0 without stochastic steps

  double opt_adv = 0;
  double opt_stoch = 0;            // E psi(vOPT_Stoch), or the welfare optimum
  double psi_of_mean_stoch = 0;    // psi(E vOPT_Stoch)
  bool oracle_exact = true;
  double bound_rhs = 0;

  double mean_value = 0;
  double standard_error = 0;

  std::vector<std::string> columns;
  std::vector<ReplicationRow> rows;
  std::vector<CheckReport> checks;  // aligned with columns, merged over rows
  std::vector<Outcome> summary;     // aligned with columns
  std::vector<std::pair<std::string, double>> extras;
  std::string trace_json;           // replication 0

  bool passed() const noexcept;
};

ExperimentReport run_ocp_experiment(const MixedInstance& inst, const RunOptions& opts);
ExperimentReport run_welfare_experiment(const MixedInstance& inst, const RunOptions& opts);
// Runs with psi(u) = sum_i u_i^p' for the instance order p (see
// effective_load_balance_order); the instance cost only supplies p.
ExperimentReport run_loadbalance_experiment(const MixedInstance& inst, const RunOptions& opts);

// Shortest round-trip decimal form.
std::string format_number(double x);

std::string csv_header(const ExperimentReport& r);
std::string report_csv(const ExperimentReport& r);
std::string report_json(const ExperimentReport& r);

struct VerifyResult {
  std::size_t configurations = 0;
  std::vector<CheckReport> checks;
  bool passed() const noexcept;
};

// Randomized property suite over `count` configurations derived from seed.
VerifyResult verify_suite(std::uint64_t seed, std::size_t count, CheckScope scope,
                          Mutation mutation = Mutation::None);
std::string verify_matrix(const VerifyResult& r);

// Mean and standard error of the mean (0 for fewer than two samples).
std::pair<double, double> mean_and_se(std::span<const double> xs);

unsigned worker_count(unsigned requested, std::size_t jobs);

}  // namespace robustpd
