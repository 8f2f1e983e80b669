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

// Command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "robustpd/robustpd.h"

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitError = 2;

struct RunArgs {
  std::string instance;
  std::size_t replications = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string mutation = "none";
};

struct VerifyArgs {
  std::uint64_t seed = 42;
  std::size_t count = 200;
  std::string check = "all";
  std::string mutation = "none";
};

struct GenerateArgs {
  std::string problem = "ocp";
  std::size_t n = 8;
  std::size_t m = 2;
  double p = 2.0;
  std::string family = "sum_of_powers";
  std::size_t adv = 0;
  std::string placement = "prefix";
  std::size_t support = 2;
  std::size_t min_options = 1;
  std::size_t max_options = 3;
  double reward_lo = -1.0;
  double reward_hi = 4.0;
  std::uint64_t seed = 1;
  std::string out;
};

int report_error(rpd_status s) {
  std::cerr << "error: " << rpd_status_string(s);
  const char* msg = rpd_last_error();
  if (msg != nullptr && *msg != '\0') std::cerr << ": " << msg;
  std::cerr << "\n";
  return kExitError;
}

int run_command(const char* name, const RunArgs& a,
                rpd_status (*runner)(const rpd_instance*, const rpd_run_options*, rpd_report**)) {
  rpd_run_options opts;
  rpd_run_options_defaults(&opts);
  opts.replications = a.replications;
  if (a.seed) {
    opts.has_seed = 1;
    opts.seed = *a.seed;
  }
  if (rpd_status s = rpd_parse_mutation(a.mutation.c_str(), &opts.mutation); s != RPD_OK) {
    return report_error(s);
  }

  rpd_instance* inst = nullptr;
  if (rpd_status s = rpd_instance_load(a.instance.c_str(), &inst); s != RPD_OK) {
    return report_error(s);
  }
  rpd_report* report = nullptr;
  const rpd_status s = runner(inst, &opts, &report);
  rpd_instance_free(inst);
  if (s != RPD_OK) return report_error(s);

  std::error_code ec;
  std::filesystem::create_directories(a.out_dir, ec);
  const std::string stem = std::filesystem::path(a.instance).stem().string();
  const std::filesystem::path out =
      std::filesystem::path(a.out_dir) / (stem + "-" + name + "." + a.format);
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) {
    std::cerr << "error: cannot write " << out.string() << "\n";
    rpd_report_free(report);
    return kExitError;
  }
  file << (a.format == "json" ? rpd_report_json(report) : rpd_report_csv(report));
  file.close();

  std::cout << rpd_report_text(report) << "wrote " << out.string() << "\n";
  const bool passed = rpd_report_passed(report) != 0;
  rpd_report_free(report);
  return passed ? 0 : kExitViolation;
}

int verify_command(const VerifyArgs& a) {
  int scope = 0;
  int mutation = 0;
  if (rpd_status s = rpd_parse_scope(a.check.c_str(), &scope); s != RPD_OK) return report_error(s);
  if (rpd_status s = rpd_parse_mutation(a.mutation.c_str(), &mutation); s != RPD_OK) {
    return report_error(s);
  }
  rpd_report* report = nullptr;
  if (rpd_status s = rpd_verify(a.seed, a.count, scope, mutation, &report); s != RPD_OK) {
    return report_error(s);
  }
  std::cout << rpd_report_text(report);
  const bool passed = rpd_report_passed(report) != 0;
  rpd_report_free(report);
  return passed ? 0 : kExitViolation;
}

int generate_command(const GenerateArgs& a) {
  rpd_generator_params g;
  rpd_generator_defaults(&g);
  if (rpd_status s = rpd_parse_problem(a.problem.c_str(), &g.problem); s != RPD_OK) {
    return report_error(s);
  }
  if (rpd_status s = rpd_parse_family(a.family.c_str(), &g.family); s != RPD_OK) {
    return report_error(s);
  }
  if (rpd_status s = rpd_parse_placement(a.placement.c_str(), &g.placement); s != RPD_OK) {
    return report_error(s);
  }
  g.n = a.n;
  g.m = a.m;
  g.p = a.p;
  g.adv_count = a.adv;
  g.support_size = a.support;
  g.min_options = a.min_options;
  g.max_options = a.max_options;
  g.reward_lo = a.reward_lo;
  g.reward_hi = a.reward_hi;
  rpd_instance* inst = nullptr;
  if (rpd_status s = rpd_instance_generate(&g, a.seed, &inst); s != RPD_OK) return report_error(s);
  rpd_status s = RPD_OK;
  if (a.out.empty()) {
    char* text = nullptr;
    s = rpd_instance_to_json(inst, &text);
    if (s == RPD_OK) std::cout << text;
    rpd_string_free(text);
  } else {
    s = rpd_instance_save(inst, a.out.c_str());
  }
  rpd_instance_free(inst);
  return s == RPD_OK ? 0 : report_error(s);
}

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--instance", a.instance, "Instance file (JSON, schema v1)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--replications,-K", a.replications, "Monte-Carlo replications")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "Override the instance sampling seed");
  cmd->add_option("--out-dir", a.out_dir, "Directory for the report file");
  cmd->add_option("--format", a.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--mutation", a.mutation, "Test-only iterate perturbation")
      ->check(CLI::IsMember({"none", "no-shift", "no-regularizer"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust primal-dual online algorithms: experiments and property checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rpd_version());

  RunArgs ocp_args;
  RunArgs welfare_args;
  RunArgs lb_args;
  auto* run_ocp = app.add_subcommand("run-ocp", "Run the online convex programming experiment");
  add_run_options(run_ocp, ocp_args);
  auto* run_welfare = app.add_subcommand("run-welfare", "Run the welfare maximization experiment");
  add_run_options(run_welfare, welfare_args);
  auto* run_lb = app.add_subcommand("run-loadbalance", "Run the lp-norm load balancing experiment");
  add_run_options(run_lb, lb_args);

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Run the randomized inequality suite");
  verify->add_option("--seed", verify_args.seed, "Suite seed");
  verify->add_option("--count", verify_args.count, "Number of random configurations");
  verify->add_option("--check", verify_args.check, "Checks to run")
      ->check(CLI::IsMember({"all", "core", "oco", "ocp", "welfare"}));
  verify->add_option("--mutation", verify_args.mutation, "Test-only iterate perturbation")
      ->check(CLI::IsMember({"none", "no-shift", "no-regularizer"}));

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a random mixed instance");
  generate->add_option("--problem", gen.problem)->check(CLI::IsMember({"ocp", "welfare"}));
  generate->add_option("--n", gen.n, "Number of time steps");
  generate->add_option("--m", gen.m, "Number of resources");
  generate->add_option("--p", gen.p, "Growth order");
  generate->add_option("--family", gen.family)
      ->check(CLI::IsMember({"sum_of_powers", "linear_plus_power"}));
  generate->add_option("--adv", gen.adv, "Number of adversarial steps");
  generate->add_option("--placement", gen.placement)
      ->check(CLI::IsMember({"prefix", "suffix", "random", "interleaved"}));
  generate->add_option("--support", gen.support, "Support size of the distribution");
  generate->add_option("--min-options", gen.min_options);
  generate->add_option("--max-options", gen.max_options);
  generate->add_option("--reward-lo", gen.reward_lo);
  generate->add_option("--reward-hi", gen.reward_hi);
  generate->add_option("--seed", gen.seed);
  generate->add_option("--out", gen.out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  if (*run_ocp) return run_command("ocp", ocp_args, rpd_run_ocp);
  if (*run_welfare) return run_command("welfare", welfare_args, rpd_run_welfare);
  if (*run_lb) return run_command("loadbalance", lb_args, rpd_run_loadbalance);
  if (*verify) return verify_command(verify_args);
  if (*generate) return generate_command(gen);
  return kExitError;
}
