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

#include "robustpd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "robustpd/error.hpp"
#include "robustpd/oracles.hpp"
#include "robustpd/rng.hpp"

namespace robustpd {

using nlohmann::json;

namespace {

constexpr double kE = std::numbers::e;
constexpr double kSigmas = 3.0;

template <class Fn>
void parallel_for(std::size_t jobs, unsigned threads, Fn&& fn) {
  const unsigned workers = worker_count(threads, jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          next.store(jobs);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

CheckReport merged(std::string name, std::initializer_list<const CheckReport*> parts) {
  CheckReport out(std::move(name));
  for (const auto* p : parts) out.merge(*p);
  return out;
}

Outcome outcome_of(const CheckReport& c, bool applicable) {
  if (!applicable) return Outcome::NotApplicable;
  return c.passed() ? Outcome::Pass : Outcome::Fail;
}

const char* outcome_text(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::NotApplicable: return "na";
  }
  return "na";
}

Vec scaled(std::span<const double> v, double s) {
  Vec out(v.begin(), v.end());
  for (auto& x : out) x *= s;
  return out;
}

// One replication's contribution: per-row checks plus scalars that feed
// the expectation-level checks.
struct RowResult {
  double value = 0;
  std::vector<CheckReport> checks;
  std::vector<bool> applicable;
  double scaled_cost = 0;   // psi(sum v / 8)
  double stoch_fake = 0;    // sum_{Stoch} L(y_t, v*_t)
  double scaled_norm = 0;   // ||sum v / 8||_p
  double norm = 0;          // ||sum v||_p
  double requested_norm = 0;
  std::string trace_json;
};

const std::vector<std::string> kOcpRowColumns = {
    "trace_consistency", "best_response", "oco_bounds",      "be_the_leader",
    "stability",         "domination",    "cost_certificate",    "adversarial_2p",
    "adversarial_2ep2",  "homogeneous_equivalence"};

const std::vector<std::string> kOcpSummaryColumns = {
    "stoch_part", "end_to_end_general", "end_to_end_separable", "end_to_end_tight",
    "end_to_end_homogeneous"};

const std::vector<std::string> kWelfareRowColumns = {
    "trace_consistency", "best_response", "adversarial_candidate", "w2", "w3", "oco_bounds"};

const std::vector<std::string> kWelfareSummaryColumns = {"expected_profit"};

json vec_json(std::span<const double> v) { return json(Vec(v.begin(), v.end())); }

std::string ocp_trace_json(const OcpRunTrace& tr) {
  json steps = json::array();
  for (std::size_t t = 0; t < tr.n(); ++t) {
    const auto& s = tr.steps[t];
    steps.push_back({{"t", t + 1},
                     {"origin", origin_name(s.origin)},
                     {"dual", vec_json(s.dual)},
                     {"choice_index", s.choice_index},
                     {"choice", vec_json(s.choice)},
                     {"fake_cost", s.fake_cost},
                     {"dual_conjugate", s.dual_conjugate},
                     {"running_load", vec_json(s.running_load)}});
  }
  return json{{"gamma", tr.gamma}, {"steps", std::move(steps)},
              {"total_load", vec_json(tr.total_load)}, {"cost", tr.cost}}
      .dump();
}

std::string welfare_trace_json(const WelfareTrace& tr, std::span<const Origin> origins) {
  json steps = json::array();
  for (std::size_t t = 0; t < tr.n(); ++t) {
    const auto& s = tr.steps[t];
    steps.push_back({{"t", t + 1},
                     {"origin", origin_name(origins[t])},
                     {"dual", vec_json(s.dual)},
                     {"reduced_reward", s.reduced_reward},
                     {"virtual_play", s.virtual_play},
                     {"played", s.played},
                     {"fake_cost", s.fake_cost},
                     {"dual_conjugate", s.dual_conjugate}});
  }
  return json{{"gamma", tr.gamma},
              {"steps", std::move(steps)},
              {"linear_slopes", vec_json(tr.linear_slopes)},
              {"played_load", vec_json(tr.played_load)},
              {"reward", tr.reward},
              {"cost", tr.cost},
              {"profit", tr.profit},
              {"virtual_fake_profit", tr.virtual_fake_profit}}
      .dump();
}

// Checks shared by the OCP and load-balancing experiments on one run.
void ocp_row_checks(RowResult& row, const OcpRunTrace& tr, std::span<const FeasibleSet> sets,
                    const std::vector<std::size_t>& adv_times, const OptReport& adv,
                    const std::vector<bool>& mask, std::size_t stoch_count) {
  const CostFunction& f = tr.oco.cost();
  const double p = f.order();

  CheckReport consistency("trace_consistency");
  CheckReport dominance("best_response");
  for (std::size_t t = 0; t < tr.n(); ++t) {
    const auto& s = tr.steps[t];
    const std::string where = "t=" + std::to_string(t + 1);
    consistency.expect_eq(s.fake_cost, dot(s.dual, s.choice) - tr.gamma * f.conj(s.dual), 1e-10,
                          where);
    for (const auto& v : sets[t].options()) {
      dominance.expect_le(s.fake_cost, dot(s.dual, v) - tr.gamma * s.dual_conjugate, 1e-10, where);
    }
  }
  consistency.expect_eq(tr.cost, f.eval(tr.total_load), 1e-12, "final cost");

  const RegretBoundsReport th = check_regret_bounds(tr.oco);
  const BtlReport btl = check_btl(tr.oco);
  const StabilityReport st = check_stability(tr.oco);
  const DominationCertificate dom = dominating_set(tr.oco);
  const CostCertificateReport c1 = check_cost_certificate(tr);
  const AdversarialReport a1 = check_adversarial_part(tr, 2.0 * p, adv_times, adv.chosen);
  const AdversarialReport a2 = check_adversarial_part(tr, 2.0 * kE * p * p, adv_times, adv.chosen);

  row.checks = {
      consistency,
      dominance,
      merged("oco_bounds", {&th.regret, &th.regret_prefix, &th.size_control,
                          &th.size_control_prefix, &th.separable_size}),
      merged("be_the_leader", {&btl.prefix, &btl.initial}),
      merged("stability", {&st.lower, &st.upper, &st.argument_ratio}),
      dom.check,
      merged("cost_certificate", {&c1.general, &c1.separable}),
      merged("adversarial_2p", {&a1.max_form, &a1.join_form}),
      merged("adversarial_2ep2", {&a2.max_form, &a2.join_form}),
      CheckReport("homogeneous_equivalence"),
  };
  row.applicable.assign(row.checks.size(), true);
  if (f.homogeneous() && stoch_count > 0) {
    const HomogeneousReport h = check_homogeneous_equivalence(tr, sets, mask);
    row.checks.back() = merged("homogeneous_equivalence", {&h.scaling, &h.same_choice});
  } else {
    row.applicable.back() = false;
  }
  row.scaled_cost = c1.lhs;
}

struct OcpOracles {
  std::vector<std::size_t> adv_times;
  std::vector<std::size_t> stoch_times;
  std::vector<bool> mask;
  OptReport adv;
  OptReport stoch;
};

OcpOracles ocp_oracles(const MixedInstance& inst, const CostFunction& f) {
  OcpOracles o;
  o.adv_times = inst.adv_times();
  o.stoch_times = inst.stoch_times();
  o.mask = inst.stoch_mask();
  std::vector<FeasibleSet> adv_sets;
  for (std::size_t t : o.adv_times) adv_sets.push_back(std::get<FeasibleSet>(*inst.timeline[t].data));
  std::vector<FeasibleSet> support;
  for (const auto& s : inst.distribution.support) support.push_back(std::get<FeasibleSet>(s));
  o.adv = opt_adv_ocp(adv_sets, f);
  o.stoch = opt_stoch_ocp(support, inst.distribution.probs, o.stoch_times.size(), f, inst.seed);
  return o;
}

double stoch_fake_cost(const OcpRunTrace& tr, const Realization& real, const OcpOracles& o) {
  std::vector<Vec> choices;
  choices.reserve(o.stoch_times.size());
  for (std::size_t t : o.stoch_times) choices.push_back(o.stoch.chosen[real.drawn[t]]);
  return fake_cost_of(tr, o.stoch_times, choices);
}

void fill_header(ExperimentReport& r, const char* name, const MixedInstance& inst,
                 const RunOptions& opts, double p, const char* family) {
  r.experiment = name;
  r.seed = opts.seed.value_or(inst.seed);
  r.n = inst.n;
  r.m = inst.m;
  r.p = p;
  r.family = family;
  r.adv_count = inst.adv_times().size();
  r.stoch_count = inst.n - r.adv_count;
  r.beta = r.stoch_count > 0 ? static_cast<double>(r.n) / static_cast<double>(r.stoch_count) : 0.0;
}

// Gathers per-row checks and appends the expectation-level columns.
void assemble(ExperimentReport& r, std::vector<RowResult>& rows,
              const std::vector<std::string>& row_columns,
              std::vector<CheckReport> summary_checks, std::vector<bool> summary_applicable) {
  r.columns = row_columns;
  for (const auto& c : summary_checks) r.columns.push_back(c.name);
  r.checks.clear();
  for (const auto& name : row_columns) r.checks.emplace_back(name);
  std::vector<bool> any_applicable(row_columns.size(), false);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ReplicationRow out;
    out.replication = k;
    out.value = rows[k].value;
    for (std::size_t c = 0; c < row_columns.size(); ++c) {
      out.outcomes.push_back(outcome_of(rows[k].checks[c], rows[k].applicable[c]));
      if (rows[k].applicable[c]) {
        r.checks[c].merge(rows[k].checks[c]);
        any_applicable[c] = true;
      }
    }
    for (std::size_t c = 0; c < summary_checks.size(); ++c) out.outcomes.push_back(Outcome::NotApplicable);
    r.rows.push_back(std::move(out));
  }
  r.summary.clear();
  for (std::size_t c = 0; c < row_columns.size(); ++c) {
    r.summary.push_back(outcome_of(r.checks[c], any_applicable[c]));
  }
  for (std::size_t c = 0; c < summary_checks.size(); ++c) {
    r.summary.push_back(outcome_of(summary_checks[c], summary_applicable[c]));
    r.checks.push_back(std::move(summary_checks[c]));
  }
  if (!rows.empty()) r.trace_json = rows.front().trace_json;
}

void require_problem(const MixedInstance& inst, ProblemKind kind, const char* what) {
  inst.validate();
  if (inst.problem != kind) {
    fail(ErrorKind::InvalidArgument,
         std::string(what) + " needs a '" + problem_name(kind) + "' instance");
  }
}

std::vector<double> column(const std::vector<RowResult>& rows, double RowResult::*field) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.*field);
  return out;
}

// Shared expectation-level checks of the OCP and load-balancing runs.
void ocp_summary(ExperimentReport& r, const std::vector<RowResult>& rows, const OcpOracles& o,
                 const CostFunction& f, std::vector<CheckReport>& checks,
                 std::vector<bool>& applicable) {
  const double p = f.order();
  const double beta = r.beta;
  const double shift = f.shift_value();
  const double psi_adv = f.eval(o.adv.v_opt_adv);
  const double psi_mean_stoch = f.eval(o.stoch.e_v_opt_stoch);
  const double psi_beta_stoch = f.eval(scaled(o.stoch.e_v_opt_stoch, beta));
  const double beta_p = beta > 0 ? std::pow(beta, p) : 0.0;

  CheckReport stoch("stoch_part");
  if (r.stoch_count > 0) {
    const auto [mean, se] = mean_and_se(column(rows, &RowResult::stoch_fake));
    stoch.expect_le(mean - kSigmas * se, psi_beta_stoch / beta, kCheckTolerance, "mean");
    r.extras.emplace_back("stoch_part_mean", mean);
    r.extras.emplace_back("stoch_part_se", se);
    r.extras.emplace_back("stoch_part_rhs", psi_beta_stoch / beta);
  }
  const auto [lhs, lhs_se] = mean_and_se(column(rows, &RowResult::scaled_cost));
  const double lhs_low = lhs - kSigmas * lhs_se;
  const double rhs_general =
      kE * std::pow(2.0 * kE * p * p, p) * psi_adv + beta_p * psi_mean_stoch + 1.5 * shift;
  const double rhs_separable = std::pow(2.0 * p, p) * psi_adv + beta_p * psi_mean_stoch + 1.5 * shift;
  const double rhs_tight = f.eval(scaled(o.adv.v_opt_adv, 2.0 * p)) + psi_beta_stoch + 1.5 * shift;
  const double rhs_homo = std::pow(2.0 * p, p) * psi_adv + psi_mean_stoch + 1.5 * shift;
  CheckReport general("end_to_end_general");
  general.expect_le(lhs_low, rhs_general);
  CheckReport separable("end_to_end_separable");
  separable.expect_le(lhs_low, rhs_separable);
  CheckReport tight("end_to_end_tight");
  tight.expect_le(lhs_low, rhs_tight);
  CheckReport homo("end_to_end_homogeneous");
  const bool homo_applies =
      f.homogeneous() && static_cast<double>(r.stoch_count) >= 4.0 * p * (1.0 - 1e-12);
  if (homo_applies) homo.expect_le(lhs_low, rhs_homo);

  r.bound_rhs = rhs_separable;
  r.extras.emplace_back("scaled_cost_mean", lhs);
  r.extras.emplace_back("scaled_cost_se", lhs_se);
  r.extras.emplace_back("rhs_general", rhs_general);
  r.extras.emplace_back("rhs_separable", rhs_separable);
  r.extras.emplace_back("rhs_tight", rhs_tight);
  r.extras.emplace_back("rhs_homogeneous", rhs_homo);
  checks = {stoch, general, separable, tight, homo};
  applicable = {r.stoch_count > 0, true, true, true, homo_applies};
}

}  // namespace

const char* scope_name(CheckScope s) noexcept {
  switch (s) {
    case CheckScope::All: return "all";
    case CheckScope::Core: return "core";
    case CheckScope::Oco: return "oco";
    case CheckScope::Ocp: return "ocp";
    case CheckScope::Welfare: return "welfare";
  }
  return "all";
}

CheckScope parse_scope(std::string_view s) {
  for (CheckScope c : {CheckScope::All, CheckScope::Core, CheckScope::Oco, CheckScope::Ocp,
                       CheckScope::Welfare}) {
    if (s == scope_name(c)) return c;
  }
  fail(ErrorKind::InvalidArgument, "unknown check scope '" + std::string(s) + "'");
}

Mutation parse_mutation(std::string_view s) {
  for (Mutation m : {Mutation::None, Mutation::NoShift, Mutation::NoRegularizer}) {
    if (s == mutation_name(m)) return m;
  }
  fail(ErrorKind::InvalidArgument, "unknown mutation '" + std::string(s) + "'");
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("ROBUSTPD_THREADS")) {
      unsigned v = 0;
      const std::string_view sv(env);
      auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
      if (ec == std::errc() && ptr == sv.data() + sv.size() && v > 0) n = v;
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

std::pair<double, double> mean_and_se(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

bool ExperimentReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.passed(); });
}

bool VerifyResult::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.passed(); });
}

ExperimentReport run_ocp_experiment(const MixedInstance& inst, const RunOptions& opts) {
  require_problem(inst, ProblemKind::Ocp, "run-ocp");
  if (opts.replications == 0) fail(ErrorKind::InvalidArgument, "replications must be >= 1");
  const CostFunction& f = inst.cost;
  ExperimentReport r;
  fill_header(r, "ocp", inst, opts, f.order(), family_name(f.family()));
  const OcpOracles o = ocp_oracles(inst, f);
  r.opt_adv = o.adv.opt_value;
  r.opt_stoch = o.stoch.opt_value;
  r.psi_of_mean_stoch = f.eval(o.stoch.e_v_opt_stoch);
  r.oracle_exact = o.adv.exact && o.stoch.exact;

  std::vector<RowResult> rows(opts.replications);
  parallel_for(opts.replications, opts.threads, [&](std::size_t k) {
    const Realization real = sample_realization(inst, k, opts.seed);
    const std::vector<FeasibleSet> sets = real.sets();
    OcpRunTrace tr = run_ocp(sets, f, opts.mutation);
    attach_origins(tr, real.origins);
    RowResult& row = rows[k];
    row.value = tr.cost;
    ocp_row_checks(row, tr, sets, o.adv_times, o.adv, o.mask, o.stoch_times.size());
    if (!o.stoch_times.empty()) row.stoch_fake = stoch_fake_cost(tr, real, o);
    if (k == 0) row.trace_json = ocp_trace_json(tr);
  });

  const auto [mean, se] = mean_and_se(column(rows, &RowResult::value));
  r.mean_value = mean;
  r.standard_error = se;
  std::vector<CheckReport> summary;
  std::vector<bool> applicable;
  ocp_summary(r, rows, o, f, summary, applicable);
  assemble(r, rows, kOcpRowColumns, std::move(summary), std::move(applicable));
  return r;
}

ExperimentReport run_loadbalance_experiment(const MixedInstance& inst, const RunOptions& opts) {
  require_problem(inst, ProblemKind::Ocp, "run-loadbalance");
  if (opts.replications == 0) fail(ErrorKind::InvalidArgument, "replications must be >= 1");
  const double p_req = inst.cost.order();
  const double p = effective_load_balance_order(p_req, inst.m);
  const CostFunction f = load_balance_cost(p, inst.m);
  ExperimentReport r;
  fill_header(r, "loadbalance", inst, opts, p, "lp_norm");
  const OcpOracles o = ocp_oracles(inst, f);
  r.opt_adv = o.adv.opt_value;
  r.opt_stoch = o.stoch.opt_value;
  r.psi_of_mean_stoch = f.eval(o.stoch.e_v_opt_stoch);
  r.oracle_exact = o.adv.exact && o.stoch.exact;

  std::vector<RowResult> rows(opts.replications);
  parallel_for(opts.replications, opts.threads, [&](std::size_t k) {
    const Realization real = sample_realization(inst, k, opts.seed);
    const std::vector<FeasibleSet> sets = real.sets();
    LoadBalanceResult lb = run_loadbalance(sets, p_req, inst.m, opts.mutation);
    attach_origins(lb.trace, real.origins);
    RowResult& row = rows[k];
    row.value = lb.norm_effective;
    row.norm = lb.norm_effective;
    row.requested_norm = lb.norm_requested;
    row.scaled_norm = lb.norm_effective / 8.0;
    ocp_row_checks(row, lb.trace, sets, o.adv_times, o.adv, o.mask, o.stoch_times.size());
    if (!o.stoch_times.empty()) row.stoch_fake = stoch_fake_cost(lb.trace, real, o);
    if (k == 0) row.trace_json = ocp_trace_json(lb.trace);
  });

  const auto [mean, se] = mean_and_se(column(rows, &RowResult::value));
  r.mean_value = mean;
  r.standard_error = se;
  std::vector<CheckReport> summary;
  std::vector<bool> applicable;
  ocp_summary(r, rows, o, f, summary, applicable);

  // p-th roots of the end-to-end bound with every term relaxed to a factor
  // e, checked on the unscaled norm.
  const double m = static_cast<double>(inst.m);
  const double norm_rhs = kE * (2.0 * kE * p * p) * lp_norm(o.adv.v_opt_adv, p) +
                          kE * r.beta * lp_norm(o.stoch.e_v_opt_stoch, p) +
                          kE * p * std::pow(m, 1.0 / p);
  const auto [scaled_mean, scaled_se] = mean_and_se(column(rows, &RowResult::scaled_norm));
  CheckReport norm("norm_bound");
  norm.expect_le(mean - kSigmas * se, norm_rhs);
  summary.push_back(norm);
  applicable.push_back(true);
  r.extras.emplace_back("requested_p", p_req);
  r.extras.emplace_back("effective_p", p);
  r.extras.emplace_back("norm_rhs", norm_rhs);
  r.extras.emplace_back("scaled_norm_mean", scaled_mean);
  r.extras.emplace_back("norm_mean", mean);
  r.extras.emplace_back("norm_se", se);
  r.extras.emplace_back("scaled_norm_slack", norm_rhs - (scaled_mean - kSigmas * scaled_se));
  const auto [req_mean, req_se] = mean_and_se(column(rows, &RowResult::requested_norm));
  r.extras.emplace_back("requested_norm_mean", req_mean);
  r.extras.emplace_back("requested_norm_se", req_se);

  std::vector<std::string> row_columns = kOcpRowColumns;
  assemble(r, rows, row_columns, std::move(summary), std::move(applicable));
  return r;
}

ExperimentReport run_welfare_experiment(const MixedInstance& inst, const RunOptions& opts) {
  require_problem(inst, ProblemKind::Welfare, "run-welfare");
  if (opts.replications == 0) fail(ErrorKind::InvalidArgument, "replications must be >= 1");
  const CostFunction& f = inst.cost;
  ExperimentReport r;
  fill_header(r, "welfare", inst, opts, f.order(), family_name(f.family()));

  const auto adv_times = inst.adv_times();
  const auto mask = inst.stoch_mask();
  std::vector<Request> adv_requests;
  for (std::size_t t : adv_times) adv_requests.push_back(std::get<Request>(*inst.timeline[t].data));
  std::vector<Request> support;
  for (const auto& s : inst.distribution.support) support.push_back(std::get<Request>(s));
  const OptReport adv = opt_welfare(adv_requests, f);
  const OptReport stoch = opt_stoch_welfare(support, inst.distribution.probs, r.stoch_count, f);
  r.opt_adv = adv.opt_value;
  r.opt_stoch = stoch.opt_value;
  r.psi_of_mean_stoch = f.eval(stoch.e_v_opt_stoch);
  r.oracle_exact = adv.converged;
  const double shift = decompose_for_welfare(f).high.shift_value();

  std::vector<RowResult> rows(opts.replications);
  parallel_for(opts.replications, opts.threads, [&](std::size_t k) {
    const Realization real = sample_realization(inst, k, opts.seed);
    const std::vector<Request> requests = real.requests();
    const WelfareTrace tr = run_welfare(requests, f, opts.mutation);
    std::vector<double> x_opt(tr.n(), 0.0);
    for (std::size_t t = 0; t < tr.n(); ++t) {
      if (mask[t]) x_opt[t] = stoch.fractions[real.drawn[t]];
    }
    const WelfareRealizationReport w = check_welfare_realization(tr, requests, mask, x_opt);

    CheckReport consistency("trace_consistency");
    std::vector<double> played;
    for (std::size_t t = 0; t < tr.n(); ++t) {
      const auto& s = tr.steps[t];
      const std::string where = "t=" + std::to_string(t + 1);
      consistency.expect_true(s.virtual_play == 0.0 || s.virtual_play == 1.0, where + " binary");
      consistency.expect_true(s.played == s.virtual_play * kPlayScale, where + " scaled play");
      played.push_back(s.played);
    }
    consistency.expect_eq(tr.profit, tr.reward - tr.cost, 1e-10, "profit");
    consistency.expect_eq(tr.profit, welfare_profit(requests, played, f), 1e-9, "recomputed");
    const RegretBoundsReport th = check_regret_bounds(tr.oco);

    RowResult& row = rows[k];
    row.value = tr.profit;
    row.checks = {consistency,
                  w.best_response,
                  w.adversarial_candidate,
                  w.fake_profit_comparison,
                  w.regret_chain,
                  merged("oco_bounds", {&th.regret, &th.regret_prefix, &th.size_control,
                                      &th.size_control_prefix, &th.separable_size})};
    row.applicable.assign(row.checks.size(), true);
    if (k == 0) row.trace_json = welfare_trace_json(tr, real.origins);
  });

  const auto [mean, se] = mean_and_se(column(rows, &RowResult::value));
  r.mean_value = mean;
  r.standard_error = se;
  CheckReport bound = check_expected_profit_bound(mean, se, stoch.opt_value, r.n, r.stoch_count, shift);
  bound.name = "expected_profit";
  r.bound_rhs = (r.stoch_count > 0 ? kPlayScale * stoch.opt_value / r.beta : 0.0) -
                kPlayScale * shift;
  r.extras.emplace_back("shift_value", shift);
  assemble(r, rows, kWelfareRowColumns, {bound}, {true});
  return r;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string csv_header(const ExperimentReport& r) {
  std::string h = "experiment,seed,n,m,p,family,replication,cost,se,opt_adv,opt_stoch,bound_rhs";
  for (const auto& c : r.columns) h += "," + c;
  return h;
}

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << csv_header(r) << "\n";
  const std::string prefix = r.experiment + "," + std::to_string(r.seed) + "," +
                             std::to_string(r.n) + "," + std::to_string(r.m) + "," +
                             format_number(r.p) + "," + r.family + ",";
  const std::string oracles = format_number(r.opt_adv) + "," + format_number(r.opt_stoch) + "," +
                              format_number(r.bound_rhs);
  for (const auto& row : r.rows) {
    os << prefix << row.replication << "," << format_number(row.value) << ",," << oracles;
    for (Outcome o : row.outcomes) os << "," << outcome_text(o);
    os << "\n";
  }
  os << prefix << "summary," << format_number(r.mean_value) << ","
     << format_number(r.standard_error) << "," << oracles;
  for (Outcome o : r.summary) os << "," << outcome_text(o);
  os << "\n";
  return os.str();
}

std::string report_json(const ExperimentReport& r) {
  json checks = json::array();
  for (std::size_t c = 0; c < r.checks.size(); ++c) {
    const auto& k = r.checks[c];
    checks.push_back({{"name", k.name},
                      {"status", outcome_text(r.summary[c])},
                      {"evaluated", k.evaluated},
                      {"violations", k.violations},
                      {"worst_slack", std::isfinite(k.worst_slack) ? json(k.worst_slack) : json()},
                      {"first_violation", k.first_violation}});
  }
  json rows = json::array();
  for (const auto& row : r.rows) {
    json outcomes = json::object();
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
      outcomes[r.columns[c]] = outcome_text(row.outcomes[c]);
    }
    rows.push_back({{"replication", row.replication}, {"value", row.value}, {"checks", outcomes}});
  }
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = std::isfinite(v) ? json(v) : json();
  json doc = {
      {"experiment", r.experiment},
      {"seed", r.seed},
      {"n", r.n},
      {"m", r.m},
      {"p", r.p},
      {"family", r.family},
      {"adv_count", r.adv_count},
      {"stoch_count", r.stoch_count},
      {"beta", r.beta},
      {"opt_adv", r.opt_adv},
      {"opt_stoch", r.opt_stoch},
      {"psi_of_mean_stoch_load", r.psi_of_mean_stoch},
      {"oracle_exact", r.oracle_exact},
      {"bound_rhs", r.bound_rhs},
      {"mean", r.mean_value},
      {"standard_error", r.standard_error},
      {"passed", r.passed()},
      {"checks", std::move(checks)},
      {"extras", std::move(extras)},
      {"rows", std::move(rows)},
      {"trace", r.trace_json.empty() ? json() : json::parse(r.trace_json)},
  };
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Randomized property suite.

namespace {

enum VerifyCheck : std::size_t {
  kFenchelYoung,
  kFenchelEquality,
  kClosedForm,
  kGrowthValue,
  kGrowthGradient,
  kConjugateScaling,
  kConjugateAtGradient,
  kEuler,
  kSuperadditivity,
  kBeTheLeader,
  kStability,
  kDomination,
  kRegret,
  kSizeControl,
  kOcpBestResponse,
  kCostCertificate,
  kAdversarial2p,
  kAdversarial2ep2,
  kHomogeneous,
  kWelfareBestResponse,
  kWelfareCandidate,
  kWelfareW2,
  kWelfareW3,
  kVerifyCheckCount
};

const char* const kVerifyNames[kVerifyCheckCount] = {
    "core.fenchel_young",        "core.fenchel_equality",     "core.conjugate_closed_form",
    "core.growth_value",         "core.growth_gradient",      "core.conjugate_scaling",
    "core.conjugate_at_gradient", "core.euler",               "core.superadditivity",
    "oco.be_the_leader",         "oco.stability",             "oco.domination",
    "oco.regret",                "oco.size_control",          "ocp.best_response",
    "ocp.cost_certificate",            "ocp.adversarial_2p",        "ocp.adversarial_2ep2",
    "ocp.homogeneous_equivalence", "welfare.best_response",   "welfare.adversarial_candidate",
    "welfare.w2",                "welfare.w3"};

constexpr std::uint64_t kVerifyStream = 0x76657269ULL;

bool in_scope(CheckScope want, CheckScope part) { return want == CheckScope::All || want == part; }

CostFunction random_cost(StreamRng& rng, std::size_t m, double p, int family) {
  Vec a(m);
  switch (family) {
    case 0:
      for (auto& w : a) w = rng.uniform(0.2, 3.0);
      return CostFunction::sum_of_powers(std::move(a), p);
    case 1: {
      Vec slopes(m);
      for (std::size_t i = 0; i < m; ++i) {
        a[i] = rng.uniform(0.3, 2.0);
        slopes[i] = rng.coin(0.3) ? 0.0 : rng.uniform(0.0, 2.0);
      }
      return CostFunction::linear_plus_power(std::move(a), std::move(slopes), p);
    }
    default: {
      std::vector<ScalarPiece> pieces;
      for (std::size_t i = 0; i < m; ++i) {
        const double w = rng.uniform(0.2, 2.0);
        const double q = p >= 2.0 ? rng.uniform(0.0, 1.0) : 0.0;
        pieces.push_back({[w, q, p](double x) { return w * std::pow(x, p) + q * x * x; },
                          [w, q, p](double x) { return w * p * std::pow(x, p - 1.0) + 2.0 * q * x; }});
      }
      return CostFunction::separable_generic(std::move(pieces), p);
    }
  }
}

// Same function, conjugate computed by numeric search.
CostFunction numeric_twin(const CostFunction& f) {
  std::vector<ScalarPiece> pieces;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    pieces.push_back({[f, i](double x) { return f.coord_value(i, x); },
                      [f, i](double x) { return f.coord_derivative(i, x); }});
  }
  return CostFunction::separable_generic(std::move(pieces), f.order(), f.homogeneous());
}

Vec random_point(StreamRng& rng, std::size_t m, double hi) {
  Vec u(m);
  for (auto& x : u) x = rng.coin(0.15) ? 0.0 : rng.uniform(0.0, hi);
  return u;
}

void verify_core(StreamRng& rng, std::vector<CheckReport>& out, std::size_t cfg) {
  const std::size_t m = 1 + rng.below(5);
  const double orders[] = {1.5, 2.0, 2.5, 3.0, 4.0};
  const double p = orders[rng.below(5)];
  const CostFunction f = random_cost(rng, m, p, static_cast<int>(rng.below(3)));
  const std::string where = "config " + std::to_string(cfg);
  std::vector<GrowthSample> samples;
  for (int k = 0; k < 5; ++k) {
    const Vec u = random_point(rng, m, 3.0);
    const Vec y = random_point(rng, m, 3.0 * f.order());
    samples.push_back({u, y, rng.uniform(1.0, 4.0), rng.uniform(0.05, 1.0)});

    out[kFenchelYoung].expect_le(dot(u, y), f.eval(u) + f.conj(y), 1e-9, where);
    const Vec g = f.grad(u);
    out[kFenchelEquality].expect_eq(f.fenchel_gap(u, g), 0.0, 1e-9, where);
    if (f.family() != Family::SeparableGeneric) {
      const CostFunction twin = numeric_twin(f);
      const double closed = f.conj(y);
      const double numeric = twin.conj(y);
      if (std::isfinite(closed) || std::isfinite(numeric)) {
        out[kClosedForm].expect_eq(numeric, closed, 1e-6, where);
      }
    }
    const Vec v = random_point(rng, m, 3.0);
    const SuperadditivityReport s = check_superadditivity(f, u, v);
    out[kSuperadditivity].expect_true(s.passed, where);
  }
  const GrowthReport gr = check_growth(f, samples);
  out[kGrowthValue].merge(gr.value_growth);
  out[kGrowthGradient].merge(gr.gradient_growth);
  out[kConjugateScaling].merge(gr.conjugate_scaling);
  out[kConjugateAtGradient].merge(gr.conjugate_at_gradient);
  out[kEuler].merge(gr.euler);
}

void verify_oco(StreamRng& rng, std::vector<CheckReport>& out, Mutation mutation) {
  const std::size_t dims[] = {1, 2, 3, 5};
  const std::size_t m = dims[rng.below(4)];
  const double p = static_cast<double>(2 + rng.below(3));
  const auto min_n = static_cast<std::size_t>(4.0 * p);
  const std::size_t n = rng.between(min_n, 64);
  const std::size_t k = rng.between(min_n, n);
  const auto placement = static_cast<Placement>(rng.below(4));
  const CostFunction f = random_cost(rng, m, p, static_cast<int>(rng.below(2)));
  const double gbar = 1.0 / static_cast<double>(k);
  std::vector<bool> active(n, false);
  for (std::size_t t : adversarial_positions(n, k, placement, rng.next())) active[t] = true;

  OcoState state(f, gbar, mutation);
  const bool zero_run = rng.coin(0.05);
  for (std::size_t t = 0; t < n; ++t) {
    Vec v = zero_run ? Vec(m, 0.0) : random_point(rng, m, 1.0);
    if (rng.coin(0.1)) std::fill(v.begin(), v.end(), 0.0);
    state.observe(v, active[t] ? gbar : 0.0);
  }
  const BtlReport btl = check_btl(state);
  out[kBeTheLeader].merge(btl.prefix);
  out[kBeTheLeader].merge(btl.initial);
  const StabilityReport st = check_stability(state);
  out[kStability].merge(st.lower);
  out[kStability].merge(st.upper);
  out[kStability].merge(st.argument_ratio);
  out[kDomination].merge(dominating_set(state).check);
  const RegretBoundsReport th = check_regret_bounds(state);
  out[kRegret].merge(th.regret);
  out[kRegret].merge(th.regret_prefix);
  out[kSizeControl].merge(th.size_control);
  out[kSizeControl].merge(th.size_control_prefix);
  out[kSizeControl].merge(th.separable_size);
}

void verify_ocp(StreamRng& rng, std::vector<CheckReport>& out, Mutation mutation) {
  GeneratorParams g;
  g.problem = ProblemKind::Ocp;
  g.p = static_cast<double>(2 + rng.below(2));
  g.m = 1 + rng.below(3);
  g.n = rng.between(static_cast<std::size_t>(4.0 * g.p), 12);
  g.family = rng.coin() ? Family::SumOfPowers : Family::LinearPlusPower;
  g.adv_count = rng.between(0, g.n);
  g.placement = static_cast<Placement>(rng.below(4));
  g.support_size = 1 + rng.below(3);
  g.max_options = g.n > 10 ? 2 : 3;
  const MixedInstance inst = generate(g, rng.next());
  const Realization real = sample_realization(inst, 0);
  const auto sets = real.sets();
  OcpRunTrace tr = run_ocp(sets, inst.cost, mutation);
  attach_origins(tr, real.origins);

  const auto adv_times = inst.adv_times();
  std::vector<FeasibleSet> adv_sets;
  for (std::size_t t : adv_times) adv_sets.push_back(sets[t]);
  const OptReport adv = opt_adv_ocp(adv_sets, inst.cost);

  for (std::size_t t = 0; t < tr.n(); ++t) {
    for (const auto& v : sets[t].options()) {
      out[kOcpBestResponse].expect_le(tr.steps[t].fake_cost,
                                      dot(tr.steps[t].dual, v) - tr.gamma * tr.steps[t].dual_conjugate,
                                      1e-10);
    }
  }
  const CostCertificateReport c1 = check_cost_certificate(tr);
  out[kCostCertificate].merge(c1.general);
  out[kCostCertificate].merge(c1.separable);
  const double p = inst.cost.order();
  const AdversarialReport a1 = check_adversarial_part(tr, 2.0 * p, adv_times, adv.chosen);
  out[kAdversarial2p].merge(a1.max_form);
  out[kAdversarial2p].merge(a1.join_form);
  const AdversarialReport a2 = check_adversarial_part(tr, 2.0 * kE * p * p, adv_times, adv.chosen);
  out[kAdversarial2ep2].merge(a2.max_form);
  out[kAdversarial2ep2].merge(a2.join_form);
  const auto mask = inst.stoch_mask();
  if (inst.cost.homogeneous() && std::count(mask.begin(), mask.end(), true) > 0) {
    const HomogeneousReport h = check_homogeneous_equivalence(tr, sets, mask);
    out[kHomogeneous].merge(h.scaling);
    out[kHomogeneous].merge(h.same_choice);
  }
}

void verify_welfare(StreamRng& rng, std::vector<CheckReport>& out, Mutation mutation) {
  GeneratorParams g;
  g.problem = ProblemKind::Welfare;
  g.p = static_cast<double>(2 + rng.below(2));
  g.m = 1 + rng.below(3);
  g.n = rng.between(static_cast<std::size_t>(4.0 * g.p), 16);
  g.family = rng.coin() ? Family::SumOfPowers : Family::LinearPlusPower;
  g.adv_count = rng.between(0, g.n);
  g.placement = static_cast<Placement>(rng.below(4));
  g.support_size = 1 + rng.below(3);
  const MixedInstance inst = generate(g, rng.next());
  const Realization real = sample_realization(inst, 0);
  const auto requests = real.requests();
  const WelfareTrace tr = run_welfare(requests, inst.cost, mutation);

  std::vector<Request> support;
  for (const auto& s : inst.distribution.support) support.push_back(std::get<Request>(s));
  const auto mask = inst.stoch_mask();
  const auto stoch = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  const OptReport opt = opt_stoch_welfare(support, inst.distribution.probs, stoch, inst.cost);
  std::vector<double> x(tr.n(), 0.0);
  for (std::size_t t = 0; t < tr.n(); ++t) {
    if (mask[t]) x[t] = opt.fractions[real.drawn[t]];
  }
  const WelfareRealizationReport w =
      check_welfare_realization(tr, requests, mask, x);
  out[kWelfareBestResponse].merge(w.best_response);
  out[kWelfareCandidate].merge(w.adversarial_candidate);
  out[kWelfareW2].merge(w.fake_profit_comparison);
  out[kWelfareW3].merge(w.regret_chain);
}

}  // namespace

VerifyResult verify_suite(std::uint64_t seed, std::size_t count, CheckScope scope,
                          Mutation mutation) {
  std::vector<std::vector<CheckReport>> per(count);
  parallel_for(count, 0, [&](std::size_t i) {
    std::vector<CheckReport> local;
    for (const char* name : kVerifyNames) local.emplace_back(name);
    if (in_scope(scope, CheckScope::Core)) {
      StreamRng rng(seed, kVerifyStream + 4 * i);
      verify_core(rng, local, i);
    }
    if (in_scope(scope, CheckScope::Oco)) {
      StreamRng rng(seed, kVerifyStream + 4 * i + 1);
      verify_oco(rng, local, mutation);
    }
    if (in_scope(scope, CheckScope::Ocp)) {
      StreamRng rng(seed, kVerifyStream + 4 * i + 2);
      verify_ocp(rng, local, mutation);
    }
    if (in_scope(scope, CheckScope::Welfare)) {
      StreamRng rng(seed, kVerifyStream + 4 * i + 3);
      verify_welfare(rng, local, mutation);
    }
    per[i] = std::move(local);
  });

  VerifyResult result;
  result.configurations = count;
  if (count == 0) return result;
  for (const char* name : kVerifyNames) result.checks.emplace_back(name);
  for (const auto& local : per) {
    for (std::size_t c = 0; c < kVerifyCheckCount; ++c) result.checks[c].merge(local[c]);
  }
  // Drop rows outside the requested scope.
  std::erase_if(result.checks, [](const CheckReport& c) { return c.evaluated == 0; });
  return result;
}

std::string verify_matrix(const VerifyResult& r) {
  std::ostringstream os;
  os << "configurations: " << r.configurations << "\n";
  std::size_t width = 5;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  os << std::string(width - 5, ' ') << "check  evaluated  violations  worst_slack  status\n";
  for (const auto& c : r.checks) {
    os << std::string(width - c.name.size(), ' ') << c.name << "  ";
    std::string ev = std::to_string(c.evaluated);
    std::string vi = std::to_string(c.violations);
    os << std::string(9 - std::min<std::size_t>(9, ev.size()), ' ') << ev << "  "
       << std::string(10 - std::min<std::size_t>(10, vi.size()), ' ') << vi << "  ";
    std::ostringstream slack;
    slack.precision(3);
    slack << std::scientific << c.worst_slack;
    const std::string s = std::isfinite(c.worst_slack) ? slack.str() : "-";
    os << std::string(11 - std::min<std::size_t>(11, s.size()), ' ') << s << "  "
       << (c.passed() ? "PASS" : "FAIL") << "\n";
  }
  os << (r.passed() ? "all checks passed" : "violations found") << "\n";
  return os.str();
}

}  // namespace robustpd
