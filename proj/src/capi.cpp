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

#include "robustpd/robustpd.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "robustpd/error.hpp"
#include "robustpd/harness.hpp"
#include "robustpd/instance.hpp"
#include "robustpd/oco.hpp"

struct rpd_cost {
  robustpd::CostFunction f;
};

struct rpd_oco {
  robustpd::OcoState state;
};

struct rpd_instance {
  robustpd::MixedInstance inst;
};

struct rpd_report {
  bool passed = false;
  double mean = 0;
  double standard_error = 0;
  std::string csv;
  std::string json;
  std::string text;
};

namespace {

thread_local std::string g_last_error;

rpd_status status_of(robustpd::ErrorKind k) {
  using robustpd::ErrorKind;
  switch (k) {
    case ErrorKind::InvalidArgument: return RPD_ERR_INVALID_ARGUMENT;
    case ErrorKind::Dimension: return RPD_ERR_DIMENSION;
    case ErrorKind::Domain: return RPD_ERR_DOMAIN;
    case ErrorKind::Configuration: return RPD_ERR_CONFIGURATION;
    case ErrorKind::Schema: return RPD_ERR_SCHEMA;
    case ErrorKind::UnsupportedVersion: return RPD_ERR_UNSUPPORTED_VERSION;
    case ErrorKind::OracleSize: return RPD_ERR_ORACLE_SIZE;
    case ErrorKind::Io: return RPD_ERR_IO;
    case ErrorKind::Structural: return RPD_ERR_STRUCTURAL;
  }
  return RPD_ERR_INTERNAL;
}

template <class Fn>
rpd_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return RPD_OK;
  } catch (const robustpd::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RPD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RPD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RPD_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) robustpd::fail(robustpd::ErrorKind::InvalidArgument, std::string(what) + " is null");
}

robustpd::Vec copy_vec(const double* p, std::size_t n) {
  if (n > 0) require(p, "vector argument");
  return robustpd::Vec(p, p + n);
}

robustpd::Mutation to_mutation(int m) {
  switch (m) {
    case RPD_MUTATION_NONE: return robustpd::Mutation::None;
    case RPD_MUTATION_NO_SHIFT: return robustpd::Mutation::NoShift;
    case RPD_MUTATION_NO_REGULARIZER: return robustpd::Mutation::NoRegularizer;
    default: robustpd::fail(robustpd::ErrorKind::InvalidArgument, "unknown mutation code");
  }
}

robustpd::CheckScope to_scope(int s) {
  switch (s) {
    case RPD_SCOPE_ALL: return robustpd::CheckScope::All;
    case RPD_SCOPE_CORE: return robustpd::CheckScope::Core;
    case RPD_SCOPE_OCO: return robustpd::CheckScope::Oco;
    case RPD_SCOPE_OCP: return robustpd::CheckScope::Ocp;
    case RPD_SCOPE_WELFARE: return robustpd::CheckScope::Welfare;
    default: robustpd::fail(robustpd::ErrorKind::InvalidArgument, "unknown scope code");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Table>
rpd_status lookup(const char* name, int* out, const Table& table, const char* what) {
  return guarded([&] {
    require(name, "name");
    require(out, "output");
    for (const auto& [key, code] : table) {
      if (std::strcmp(name, key) == 0) {
        *out = code;
        return;
      }
    }
    robustpd::fail(robustpd::ErrorKind::InvalidArgument,
                   std::string("unknown ") + what + " '" + name + "'");
  });
}

robustpd::RunOptions to_options(const rpd_run_options* o) {
  robustpd::RunOptions opts;
  if (o == nullptr) return opts;
  opts.replications = o->replications;
  if (o->has_seed) opts.seed = o->seed;
  opts.mutation = to_mutation(o->mutation);
  opts.threads = o->threads;
  return opts;
}

rpd_report* make_report(const robustpd::ExperimentReport& r) {
  auto* out = new rpd_report;
  out->passed = r.passed();
  out->mean = r.mean_value;
  out->standard_error = r.standard_error;
  out->csv = robustpd::report_csv(r);
  out->json = robustpd::report_json(r);
  std::ostringstream os;
  os << r.experiment << ": n=" << r.n << " m=" << r.m << " p=" << robustpd::format_number(r.p)
     << " replications=" << r.rows.size() << " mean=" << robustpd::format_number(r.mean_value)
     << " se=" << robustpd::format_number(r.standard_error) << "\n";
  for (const auto& c : r.checks) {
    os << "  " << c.name << ": " << (c.passed() ? "pass" : "FAIL") << " (" << c.evaluated
       << " evaluated, " << c.violations << " violations)";
    if (!c.first_violation.empty()) os << " first: " << c.first_violation;
    os << "\n";
  }
  out->text = os.str();
  return out;
}

template <class Runner>
rpd_status run_experiment(const rpd_instance* inst, const rpd_run_options* o, rpd_report** out,
                          Runner runner) {
  return guarded([&] {
    require(inst, "instance");
    require(out, "output");
    *out = make_report(runner(inst->inst, to_options(o)));
  });
}

}  // namespace

extern "C" {

const char* rpd_version(void) { return "0.1.0"; }

const char* rpd_status_string(rpd_status status) {
  switch (status) {
    case RPD_OK: return "ok";
    case RPD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RPD_ERR_DIMENSION: return "dimension mismatch";
    case RPD_ERR_DOMAIN: return "value outside domain";
    case RPD_ERR_CONFIGURATION: return "configuration error";
    case RPD_ERR_SCHEMA: return "schema error";
    case RPD_ERR_UNSUPPORTED_VERSION: return "unsupported version";
    case RPD_ERR_ORACLE_SIZE: return "oracle size guard exceeded";
    case RPD_ERR_IO: return "i/o error";
    case RPD_ERR_STRUCTURAL: return "structural error";
    case RPD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rpd_last_error(void) { return g_last_error.c_str(); }

void rpd_string_free(char* s) { std::free(s); }

rpd_status rpd_parse_mutation(const char* name, int* out) {
  static const std::pair<const char*, int> table[] = {
      {"none", RPD_MUTATION_NONE},
      {"no-shift", RPD_MUTATION_NO_SHIFT},
      {"no-regularizer", RPD_MUTATION_NO_REGULARIZER}};
  return lookup(name, out, table, "mutation");
}

rpd_status rpd_parse_scope(const char* name, int* out) {
  static const std::pair<const char*, int> table[] = {{"all", RPD_SCOPE_ALL},
                                                      {"core", RPD_SCOPE_CORE},
                                                      {"oco", RPD_SCOPE_OCO},
                                                      {"ocp", RPD_SCOPE_OCP},
                                                      {"welfare", RPD_SCOPE_WELFARE}};
  return lookup(name, out, table, "scope");
}

rpd_status rpd_parse_placement(const char* name, int* out) {
  static const std::pair<const char*, int> table[] = {{"prefix", RPD_PLACEMENT_PREFIX},
                                                      {"suffix", RPD_PLACEMENT_SUFFIX},
                                                      {"random", RPD_PLACEMENT_RANDOM},
                                                      {"interleaved", RPD_PLACEMENT_INTERLEAVED}};
  return lookup(name, out, table, "placement");
}

rpd_status rpd_parse_family(const char* name, int* out) {
  static const std::pair<const char*, int> table[] = {
      {"sum_of_powers", RPD_FAMILY_SUM_OF_POWERS},
      {"linear_plus_power", RPD_FAMILY_LINEAR_PLUS_POWER}};
  return lookup(name, out, table, "family");
}

rpd_status rpd_parse_problem(const char* name, int* out) {
  static const std::pair<const char*, int> table[] = {{"ocp", RPD_PROBLEM_OCP},
                                                      {"welfare", RPD_PROBLEM_WELFARE}};
  return lookup(name, out, table, "problem");
}

rpd_status rpd_cost_sum_of_powers(const double* weights, size_t m, double p, rpd_cost** out) {
  return guarded([&] {
    require(out, "output");
    *out = new rpd_cost{robustpd::CostFunction::sum_of_powers(copy_vec(weights, m), p)};
  });
}

rpd_status rpd_cost_linear_plus_power(const double* scales, const double* slopes, size_t m,
                                      double p, rpd_cost** out) {
  return guarded([&] {
    require(out, "output");
    *out = new rpd_cost{robustpd::CostFunction::linear_plus_power(copy_vec(scales, m),
                                                                  copy_vec(slopes, m), p)};
  });
}

rpd_status rpd_cost_separable(size_t m, double p, rpd_scalar_fn value, rpd_scalar_fn derivative,
                              void* user, int homogeneous, rpd_cost** out) {
  return guarded([&] {
    require(out, "output");
    require(reinterpret_cast<const void*>(value), "value callback");
    require(reinterpret_cast<const void*>(derivative), "derivative callback");
    std::vector<robustpd::ScalarPiece> pieces;
    for (std::size_t i = 0; i < m; ++i) {
      pieces.push_back({[value, user, i](double x) { return value(user, i, x); },
                        [derivative, user, i](double x) { return derivative(user, i, x); }});
    }
    *out = new rpd_cost{
        robustpd::CostFunction::separable_generic(std::move(pieces), p, homogeneous != 0)};
  });
}

void rpd_cost_free(rpd_cost* cost) { delete cost; }

size_t rpd_cost_dim(const rpd_cost* cost) { return cost ? cost->f.dim() : 0; }

double rpd_cost_order(const rpd_cost* cost) { return cost ? cost->f.order() : 0.0; }

rpd_status rpd_cost_eval(const rpd_cost* cost, const double* u, double* out) {
  return guarded([&] {
    require(cost, "cost");
    require(out, "output");
    *out = cost->f.eval(copy_vec(u, cost->f.dim()));
  });
}

rpd_status rpd_cost_grad(const rpd_cost* cost, const double* u, double* out) {
  return guarded([&] {
    require(cost, "cost");
    require(out, "output");
    const robustpd::Vec g = cost->f.grad(copy_vec(u, cost->f.dim()));
    std::copy(g.begin(), g.end(), out);
  });
}

rpd_status rpd_cost_conjugate(const rpd_cost* cost, const double* y, double* out) {
  return guarded([&] {
    require(cost, "cost");
    require(out, "output");
    *out = cost->f.conj(copy_vec(y, cost->f.dim()));
  });
}

rpd_status rpd_oco_new(const rpd_cost* cost, double gamma_bar, int mutation, rpd_oco** out) {
  return guarded([&] {
    require(cost, "cost");
    require(out, "output");
    *out = new rpd_oco{robustpd::OcoState(cost->f, gamma_bar, to_mutation(mutation))};
  });
}

void rpd_oco_free(rpd_oco* oco) { delete oco; }

rpd_status rpd_oco_next_iterate(const rpd_oco* oco, double* out) {
  return guarded([&] {
    require(oco, "oco");
    require(out, "output");
    const robustpd::Vec y = oco->state.next_iterate();
    std::copy(y.begin(), y.end(), out);
  });
}

rpd_status rpd_oco_observe(rpd_oco* oco, const double* load, double gamma) {
  return guarded([&] {
    require(oco, "oco");
    oco->state.observe(copy_vec(load, oco->state.cost().dim()), gamma);
  });
}

rpd_status rpd_oco_check(const rpd_oco* oco, int* passed) {
  return guarded([&] {
    require(oco, "oco");
    require(passed, "output");
    const auto& s = oco->state;
    bool ok = robustpd::check_btl(s).passed() && robustpd::check_stability(s).passed() &&
              robustpd::check_regret_bounds(s).passed();
    const double g = s.cumulative_gamma();
    if (std::abs(g - 1.0) <= 1e-9) ok = ok && robustpd::dominating_set(s).check.passed();
    *passed = ok ? 1 : 0;
  });
}

void rpd_generator_defaults(rpd_generator_params* params) {
  if (params == nullptr) return;
  const robustpd::GeneratorParams g;
  params->problem = RPD_PROBLEM_OCP;
  params->n = g.n;
  params->m = g.m;
  params->p = g.p;
  params->family = RPD_FAMILY_SUM_OF_POWERS;
  params->adv_count = g.adv_count;
  params->placement = RPD_PLACEMENT_PREFIX;
  params->support_size = g.support_size;
  params->min_options = g.min_options;
  params->max_options = g.max_options;
  params->reward_lo = g.reward_lo;
  params->reward_hi = g.reward_hi;
}

rpd_status rpd_instance_generate(const rpd_generator_params* params, uint64_t seed,
                                 rpd_instance** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "output");
    robustpd::GeneratorParams g;
    if (params->problem != RPD_PROBLEM_OCP && params->problem != RPD_PROBLEM_WELFARE) {
      robustpd::fail(robustpd::ErrorKind::InvalidArgument, "unknown problem code");
    }
    if (params->family != RPD_FAMILY_SUM_OF_POWERS && params->family != RPD_FAMILY_LINEAR_PLUS_POWER) {
      robustpd::fail(robustpd::ErrorKind::InvalidArgument, "unknown family code");
    }
    if (params->placement < RPD_PLACEMENT_PREFIX || params->placement > RPD_PLACEMENT_INTERLEAVED) {
      robustpd::fail(robustpd::ErrorKind::InvalidArgument, "unknown placement code");
    }
    g.problem = params->problem == RPD_PROBLEM_OCP ? robustpd::ProblemKind::Ocp
                                                   : robustpd::ProblemKind::Welfare;
    g.n = params->n;
    g.m = params->m;
    g.p = params->p;
    g.family = params->family == RPD_FAMILY_SUM_OF_POWERS ? robustpd::Family::SumOfPowers
                                                          : robustpd::Family::LinearPlusPower;
    g.adv_count = params->adv_count;
    g.placement = static_cast<robustpd::Placement>(params->placement);
    g.support_size = params->support_size;
    g.min_options = params->min_options;
    g.max_options = params->max_options;
    g.reward_lo = params->reward_lo;
    g.reward_hi = params->reward_hi;
    *out = new rpd_instance{robustpd::generate(g, seed)};
  });
}

rpd_status rpd_instance_load(const char* path, rpd_instance** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output");
    *out = new rpd_instance{robustpd::load_instance(path)};
  });
}

rpd_status rpd_instance_parse(const char* json_text, rpd_instance** out) {
  return guarded([&] {
    require(json_text, "json text");
    require(out, "output");
    *out = new rpd_instance{robustpd::instance_from_json(json_text)};
  });
}

rpd_status rpd_instance_save(const rpd_instance* inst, const char* path) {
  return guarded([&] {
    require(inst, "instance");
    require(path, "path");
    robustpd::save_instance(inst->inst, path);
  });
}

rpd_status rpd_instance_to_json(const rpd_instance* inst, char** out) {
  return guarded([&] {
    require(inst, "instance");
    require(out, "output");
    *out = dup_string(robustpd::instance_to_json(inst->inst));
  });
}

int rpd_instance_problem(const rpd_instance* inst) {
  if (inst == nullptr) return -1;
  return inst->inst.problem == robustpd::ProblemKind::Ocp ? RPD_PROBLEM_OCP : RPD_PROBLEM_WELFARE;
}

void rpd_instance_free(rpd_instance* inst) { delete inst; }

void rpd_run_options_defaults(rpd_run_options* opts) {
  if (opts == nullptr) return;
  opts->replications = 1;
  opts->has_seed = 0;
  opts->seed = 0;
  opts->mutation = RPD_MUTATION_NONE;
  opts->threads = 0;
}

rpd_status rpd_run_ocp(const rpd_instance* inst, const rpd_run_options* opts, rpd_report** out) {
  return run_experiment(inst, opts, out, robustpd::run_ocp_experiment);
}

rpd_status rpd_run_welfare(const rpd_instance* inst, const rpd_run_options* opts,
                           rpd_report** out) {
  return run_experiment(inst, opts, out, robustpd::run_welfare_experiment);
}

rpd_status rpd_run_loadbalance(const rpd_instance* inst, const rpd_run_options* opts,
                               rpd_report** out) {
  return run_experiment(inst, opts, out, robustpd::run_loadbalance_experiment);
}

rpd_status rpd_verify(uint64_t seed, size_t count, int scope, int mutation, rpd_report** out) {
  return guarded([&] {
    require(out, "output");
    const robustpd::VerifyResult r =
        robustpd::verify_suite(seed, count, to_scope(scope), to_mutation(mutation));
    auto* rep = new rpd_report;
    rep->passed = r.passed();
    rep->text = robustpd::verify_matrix(r);
    *out = rep;
  });
}

int rpd_report_passed(const rpd_report* report) { return report && report->passed ? 1 : 0; }

double rpd_report_mean(const rpd_report* report) { return report ? report->mean : 0.0; }

double rpd_report_standard_error(const rpd_report* report) {
  return report ? report->standard_error : 0.0;
}

const char* rpd_report_csv(const rpd_report* report) { return report ? report->csv.c_str() : ""; }

const char* rpd_report_json(const rpd_report* report) {
  return report ? report->json.c_str() : "";
}

const char* rpd_report_text(const rpd_report* report) {
  return report ? report->text.c_str() : "";
}

void rpd_report_free(rpd_report* report) { delete report; }

}  // extern "C"
