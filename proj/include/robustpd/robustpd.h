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

#ifndef ROBUSTPD_ROBUSTPD_H_
#define ROBUSTPD_ROBUSTPD_H_

/* C interface to the robustpd library. Every function returns an rpd_status;
 * on failure rpd_last_error() describes the problem (per calling thread).
 * Objects are opaque handles released with the matching *_free function.
 * Strings returned through char** are owned by the caller and released with
 * rpd_string_free. Strings returned as const char* are owned by the handle. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RPD_API __declspec(dllexport)
#else
#define RPD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rpd_status {
  RPD_OK = 0,
  RPD_ERR_INVALID_ARGUMENT = 1,
  RPD_ERR_DIMENSION = 2,
  RPD_ERR_DOMAIN = 3,
  RPD_ERR_CONFIGURATION = 4,
  RPD_ERR_SCHEMA = 5,
  RPD_ERR_UNSUPPORTED_VERSION = 6,
  RPD_ERR_ORACLE_SIZE = 7,
  RPD_ERR_IO = 8,
  RPD_ERR_STRUCTURAL = 9,
  RPD_ERR_INTERNAL = 10
} rpd_status;

enum { RPD_MUTATION_NONE = 0, RPD_MUTATION_NO_SHIFT = 1, RPD_MUTATION_NO_REGULARIZER = 2 };
enum { RPD_SCOPE_ALL = 0, RPD_SCOPE_CORE = 1, RPD_SCOPE_OCO = 2, RPD_SCOPE_OCP = 3,
       RPD_SCOPE_WELFARE = 4 };
enum { RPD_PROBLEM_OCP = 0, RPD_PROBLEM_WELFARE = 1 };
enum { RPD_FAMILY_SUM_OF_POWERS = 0, RPD_FAMILY_LINEAR_PLUS_POWER = 1 };
enum { RPD_PLACEMENT_PREFIX = 0, RPD_PLACEMENT_SUFFIX = 1, RPD_PLACEMENT_RANDOM = 2,
       RPD_PLACEMENT_INTERLEAVED = 3 };

RPD_API const char* rpd_version(void);
RPD_API const char* rpd_status_string(rpd_status status);
RPD_API const char* rpd_last_error(void);
RPD_API void rpd_string_free(char* s);

/* Name lookups used by command-line front ends. */
RPD_API rpd_status rpd_parse_mutation(const char* name, int* out);
RPD_API rpd_status rpd_parse_scope(const char* name, int* out);
RPD_API rpd_status rpd_parse_placement(const char* name, int* out);
RPD_API rpd_status rpd_parse_family(const char* name, int* out);
RPD_API rpd_status rpd_parse_problem(const char* name, int* out);

/* ---- cost functions ---- */

typedef struct rpd_cost rpd_cost;

/* psi(u) = sum_i w_i u_i^p */
RPD_API rpd_status rpd_cost_sum_of_powers(const double* weights, size_t m, double p,
                                          rpd_cost** out);
/* psi(u) = sum_i (l_i u_i)^p + sum_i c_i u_i */
RPD_API rpd_status rpd_cost_linear_plus_power(const double* scales, const double* slopes,
                                              size_t m, double p, rpd_cost** out);
/* psi(u) = sum_i value(user, i, u_i). The conjugate is computed numerically.
 * Callbacks must stay valid for the lifetime of the handle. */
typedef double (*rpd_scalar_fn)(void* user, size_t coord, double x);
RPD_API rpd_status rpd_cost_separable(size_t m, double p, rpd_scalar_fn value,
                                      rpd_scalar_fn derivative, void* user, int homogeneous,
                                      rpd_cost** out);
RPD_API void rpd_cost_free(rpd_cost* cost);
RPD_API size_t rpd_cost_dim(const rpd_cost* cost);
RPD_API double rpd_cost_order(const rpd_cost* cost);
RPD_API rpd_status rpd_cost_eval(const rpd_cost* cost, const double* u, double* out);
RPD_API rpd_status rpd_cost_grad(const rpd_cost* cost, const double* u, double* out);
RPD_API rpd_status rpd_cost_conjugate(const rpd_cost* cost, const double* y, double* out);

/* ---- shifted and scaled FTRL ---- */

typedef struct rpd_oco rpd_oco;

RPD_API rpd_status rpd_oco_new(const rpd_cost* cost, double gamma_bar, int mutation,
                               rpd_oco** out);
RPD_API void rpd_oco_free(rpd_oco* oco);
/* Writes the next iterate (dim entries). */
RPD_API rpd_status rpd_oco_next_iterate(const rpd_oco* oco, double* out);
/* gamma must be 0 or gamma_bar. */
RPD_API rpd_status rpd_oco_observe(rpd_oco* oco, const double* load, double gamma);
/* Runs every regret, stability and domination check on the steps so far;
 * *passed is 1 when all hold. */
RPD_API rpd_status rpd_oco_check(const rpd_oco* oco, int* passed);

/* ---- instances ---- */

typedef struct rpd_instance rpd_instance;

typedef struct rpd_generator_params {
  int problem;
  size_t n;
  size_t m;
  double p;
  int family;
  size_t adv_count;
  int placement;
  size_t support_size;
  size_t min_options;
  size_t max_options;
  double reward_lo;
  double reward_hi;
} rpd_generator_params;

RPD_API void rpd_generator_defaults(rpd_generator_params* params);
RPD_API rpd_status rpd_instance_generate(const rpd_generator_params* params, uint64_t seed,
                                         rpd_instance** out);
RPD_API rpd_status rpd_instance_load(const char* path, rpd_instance** out);
RPD_API rpd_status rpd_instance_parse(const char* json_text, rpd_instance** out);
RPD_API rpd_status rpd_instance_save(const rpd_instance* inst, const char* path);
RPD_API rpd_status rpd_instance_to_json(const rpd_instance* inst, char** out);
RPD_API int rpd_instance_problem(const rpd_instance* inst);
RPD_API void rpd_instance_free(rpd_instance* inst);

/* ---- experiments and reports ---- */

typedef struct rpd_report rpd_report;

typedef struct rpd_run_options {
  size_t replications;
  int has_seed;      /* when nonzero, seed overrides the instance seed */
  uint64_t seed;
  int mutation;
  unsigned threads;  /* 0: ROBUSTPD_THREADS or all cores */
} rpd_run_options;

RPD_API void rpd_run_options_defaults(rpd_run_options* opts);
RPD_API rpd_status rpd_run_ocp(const rpd_instance* inst, const rpd_run_options* opts,
                               rpd_report** out);
RPD_API rpd_status rpd_run_welfare(const rpd_instance* inst, const rpd_run_options* opts,
                                   rpd_report** out);
RPD_API rpd_status rpd_run_loadbalance(const rpd_instance* inst, const rpd_run_options* opts,
                                       rpd_report** out);
/* Randomized property suite; the report's text is the check matrix. */
RPD_API rpd_status rpd_verify(uint64_t seed, size_t count, int scope, int mutation,
                              rpd_report** out);

RPD_API int rpd_report_passed(const rpd_report* report);
RPD_API double rpd_report_mean(const rpd_report* report);
RPD_API double rpd_report_standard_error(const rpd_report* report);
/* Empty strings for verify reports. */
RPD_API const char* rpd_report_csv(const rpd_report* report);
RPD_API const char* rpd_report_json(const rpd_report* report);
/* Human-readable summary. */
RPD_API const char* rpd_report_text(const rpd_report* report);
RPD_API void rpd_report_free(rpd_report* report);

#ifdef __cplusplus
}
#endif

#endif /* ROBUSTPD_ROBUSTPD_H_ */
