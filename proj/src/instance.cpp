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

#include "robustpd/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "robustpd/error.hpp"
#include "robustpd/rng.hpp"

namespace robustpd {

using nlohmann::json;

namespace {

constexpr const char* kSchemaVersion = "v1";
constexpr std::uint64_t kGeneratorStream = 0x6E6E7261ULL;
constexpr std::uint64_t kPlacementStream = 0x706C6163ULL;

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  fail(ErrorKind::Schema, path + ": " + msg);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing required field");
  return *it;
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

std::size_t read_count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    schema_error(path, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

const json& read_array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

Vec read_vector(const json& j, const std::string& path) {
  read_array(j, path);
  Vec out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(read_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

FeasibleSet read_options(const json& j, const std::string& path) {
  const json& arr = read_array(j, path);
  std::vector<Vec> options;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    options.push_back(read_vector(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  try {
    return FeasibleSet(std::move(options));
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
}

Request read_request(const json& j, const std::string& path) {
  Request r{read_number(field(j, "c", path), path + ".c"),
            read_vector(field(j, "a", path), path + ".a")};
  try {
    r.validate();
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
  return r;
}

Payload read_payload(const json& j, ProblemKind kind, const std::string& path) {
  if (kind == ProblemKind::Ocp) return read_options(field(j, "options", path), path + ".options");
  return read_request(field(j, "request", path), path + ".request");
}

json write_vector(std::span<const double> v) { return json(Vec(v.begin(), v.end())); }

json write_payload(const Payload& p) {
  json out = json::object();
  if (const auto* set = std::get_if<FeasibleSet>(&p)) {
    json opts = json::array();
    for (const auto& o : set->options()) opts.push_back(write_vector(o));
    out["options"] = std::move(opts);
  } else {
    const auto& r = std::get<Request>(p);
    out["request"] = json{{"c", r.reward}, {"a", write_vector(r.consumption)}};
  }
  return out;
}

const char* family_key(Family f) {
  switch (f) {
    case Family::SumOfPowers: return "sum_of_powers";
    case Family::LinearPlusPower: return "linear_plus_power";
    case Family::SeparableGeneric: return "separable_generic";
  }
  return "unknown";
}

json write_cost(const CostFunction& f) {
  json coeffs = json::array();
  switch (f.family()) {
    case Family::SumOfPowers:
      coeffs = write_vector(f.weights());
      break;
    case Family::LinearPlusPower:
      for (std::size_t i = 0; i < f.dim(); ++i) {
        coeffs.push_back(json::array({f.scales()[i], f.slopes()[i]}));
      }
      break;
    case Family::SeparableGeneric:
      fail(ErrorKind::Schema, "cost: callback-defined costs cannot be serialized");
  }
  return json{{"family", family_key(f.family())}, {"m", f.dim()}, {"p", f.order()},
              {"coeffs", std::move(coeffs)}};
}

CostFunction read_cost(const json& j, const std::string& path) {
  const json& fam = field(j, "family", path);
  if (!fam.is_string()) schema_error(path + ".family", "expected a string");
  const std::size_t m = read_count(field(j, "m", path), path + ".m");
  const double p = read_number(field(j, "p", path), path + ".p");
  const json& coeffs = read_array(field(j, "coeffs", path), path + ".coeffs");
  if (coeffs.size() != m) schema_error(path + ".coeffs", "expected m entries");
  const std::string name = fam.get<std::string>();
  try {
    if (name == "sum_of_powers") {
      return CostFunction::sum_of_powers(read_vector(coeffs, path + ".coeffs"), p);
    }
    if (name == "linear_plus_power") {
      Vec scales;
      Vec slopes;
      for (std::size_t i = 0; i < m; ++i) {
        const std::string at = path + ".coeffs[" + std::to_string(i) + "]";
        Vec pair = read_vector(coeffs[i], at);
        if (pair.size() != 2) schema_error(at, "expected [scale, slope]");
        scales.push_back(pair[0]);
        slopes.push_back(pair[1]);
      }
      return CostFunction::linear_plus_power(std::move(scales), std::move(slopes), p);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Schema) throw;
    schema_error(path, e.what());
  }
  schema_error(path + ".family", "unknown family '" + name + "'");
}

std::size_t payload_dim(const Payload& p) {
  if (const auto* set = std::get_if<FeasibleSet>(&p)) return set->dim();
  return std::get<Request>(p).consumption.size();
}

void check_payload(const Payload& p, ProblemKind kind, std::size_t m, const std::string& path) {
  const bool is_set = std::holds_alternative<FeasibleSet>(p);
  if (is_set != (kind == ProblemKind::Ocp)) {
    schema_error(path, std::string("payload does not match problem '") + problem_name(kind) + "'");
  }
  if (payload_dim(p) != m) schema_error(path, "dimension differs from m");
  if (!is_set) std::get<Request>(p).validate();
}

}  // namespace

const char* problem_name(ProblemKind k) noexcept {
  return k == ProblemKind::Ocp ? "ocp" : "welfare";
}

void MixedInstance::validate() const {
  if (n != timeline.size()) schema_error("$.n", "differs from the timeline length");
  if (m == 0) schema_error("$.m", "must be positive");
  if (cost.dim() != m) schema_error("$.cost.m", "differs from m");
  bool any_stoch = false;
  for (std::size_t t = 0; t < timeline.size(); ++t) {
    const auto& e = timeline[t];
    const std::string path = "$.timeline[" + std::to_string(t) + "]";
    if (e.stochastic) {
      any_stoch = true;
      if (e.data) schema_error(path, "stochastic entries carry no data");
    } else {
      if (!e.data) schema_error(path, "adversarial entry without data");
      check_payload(*e.data, problem, m, path);
    }
  }
  const auto& d = distribution;
  if (d.support.size() != d.probs.size()) {
    schema_error("$.distribution.probs", "length differs from support");
  }
  if (any_stoch && d.support.empty()) {
    schema_error("$.distribution.support", "must be nonempty when stochastic entries exist");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < d.probs.size(); ++j) {
    if (!(d.probs[j] >= 0.0) || !std::isfinite(d.probs[j])) {
      schema_error("$.distribution.probs[" + std::to_string(j) + "]", "must be >= 0");
    }
    total += d.probs[j];
    check_payload(d.support[j], problem, m, "$.distribution.support[" + std::to_string(j) + "]");
  }
  if (!d.probs.empty() && std::abs(total - 1.0) > 1e-12) {
    schema_error("$.distribution.probs", "must sum to 1");
  }
}

std::vector<std::size_t> MixedInstance::adv_times() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < timeline.size(); ++t) {
    if (!timeline[t].stochastic) out.push_back(t);
  }
  return out;
}

std::vector<std::size_t> MixedInstance::stoch_times() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < timeline.size(); ++t) {
    if (timeline[t].stochastic) out.push_back(t);
  }
  return out;
}

std::vector<bool> MixedInstance::stoch_mask() const {
  std::vector<bool> out;
  out.reserve(timeline.size());
  for (const auto& e : timeline) out.push_back(e.stochastic);
  return out;
}

std::vector<FeasibleSet> Realization::sets() const {
  std::vector<FeasibleSet> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(std::get<FeasibleSet>(s));
  return out;
}

std::vector<Request> Realization::requests() const {
  std::vector<Request> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(std::get<Request>(s));
  return out;
}

std::size_t pick_index(std::span<const double> probs, double u) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    last = j;
    acc += probs[j];
    if (u < acc) return j;
  }
  return last;
}

Realization sample_realization(const MixedInstance& inst, std::uint64_t replication,
                               std::optional<std::uint64_t> seed_override) {
  const std::uint64_t seed = seed_override.value_or(inst.seed);
  Realization r;
  r.steps.reserve(inst.n);
  for (std::size_t t = 0; t < inst.timeline.size(); ++t) {
    const auto& e = inst.timeline[t];
    if (!e.stochastic) {
      r.steps.push_back(*e.data);
      r.origins.push_back(Origin::Adversarial);
      r.drawn.push_back(kNotDrawn);
      continue;
    }
    if (inst.distribution.support.empty()) {
      fail(ErrorKind::Schema, "$.distribution.support: empty with stochastic entries");
    }
    const std::size_t j = pick_index(inst.distribution.probs, CounterRng::unit(seed, replication, t));
    r.steps.push_back(inst.distribution.support[j]);
    r.origins.push_back(Origin::Stochastic);
    r.drawn.push_back(j);
  }
  return r;
}

std::string instance_to_json(const MixedInstance& inst, int indent) {
  json timeline = json::array();
  for (const auto& e : inst.timeline) {
    if (e.stochastic) {
      timeline.push_back(json{{"kind", "stoch"}});
    } else {
      json entry = write_payload(*e.data);
      entry["kind"] = "adv";
      timeline.push_back(std::move(entry));
    }
  }
  json support = json::array();
  for (const auto& s : inst.distribution.support) support.push_back(write_payload(s));
  json doc = {
      {"version", kSchemaVersion},
      {"problem", problem_name(inst.problem)},
      {"n", inst.n},
      {"m", inst.m},
      {"cost", write_cost(inst.cost)},
      {"seed", inst.seed},
      {"timeline", std::move(timeline)},
      {"distribution", {{"support", std::move(support)}, {"probs", inst.distribution.probs}}},
  };
  return doc.dump(indent) + "\n";
}

MixedInstance instance_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error("$", std::string("invalid JSON: ") + e.what());
  }
  const json& version = field(doc, "version", "$");
  if (!version.is_string()) schema_error("$.version", "expected a string");
  if (version.get<std::string>() != kSchemaVersion) {
    fail(ErrorKind::UnsupportedVersion,
         "$.version: unsupported schema version '" + version.get<std::string>() +
             "' (expected '" + kSchemaVersion + "')");
  }
  const json& problem = field(doc, "problem", "$");
  ProblemKind kind;
  if (problem == "ocp") {
    kind = ProblemKind::Ocp;
  } else if (problem == "welfare") {
    kind = ProblemKind::Welfare;
  } else {
    schema_error("$.problem", "expected 'ocp' or 'welfare'");
  }
  const std::size_t n = read_count(field(doc, "n", "$"), "$.n");
  const std::size_t m = read_count(field(doc, "m", "$"), "$.m");
  CostFunction cost = read_cost(field(doc, "cost", "$"), "$.cost");
  const json& seed = field(doc, "seed", "$");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    schema_error("$.seed", "expected an unsigned 64-bit integer");
  }

  std::vector<TimelineEntry> timeline;
  const json& tl = read_array(field(doc, "timeline", "$"), "$.timeline");
  bool any_stoch = false;
  for (std::size_t t = 0; t < tl.size(); ++t) {
    const std::string path = "$.timeline[" + std::to_string(t) + "]";
    const json& k = field(tl[t], "kind", path);
    if (k == "stoch") {
      timeline.push_back(TimelineEntry{true, std::nullopt});
      any_stoch = true;
    } else if (k == "adv") {
      timeline.push_back(TimelineEntry{false, read_payload(tl[t], kind, path)});
    } else {
      schema_error(path + ".kind", "expected 'adv' or 'stoch'");
    }
  }

  Distribution dist;
  auto dit = doc.find("distribution");
  if (dit != doc.end() || any_stoch) {
    if (dit == doc.end()) schema_error("$.distribution", "missing required field");
    const json& sup = read_array(field(*dit, "support", "$.distribution"), "$.distribution.support");
    for (std::size_t j = 0; j < sup.size(); ++j) {
      dist.support.push_back(
          read_payload(sup[j], kind, "$.distribution.support[" + std::to_string(j) + "]"));
    }
    dist.probs = read_vector(field(*dit, "probs", "$.distribution"), "$.distribution.probs");
  }

  MixedInstance inst{kind, n, m, std::move(cost), std::move(timeline), std::move(dist),
                     seed.get<std::uint64_t>()};
  inst.validate();
  return inst;
}

MixedInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open instance file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void save_instance(const MixedInstance& inst, const std::filesystem::path& path) {
  inst.validate();
  const std::string text = instance_to_json(inst);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write instance file '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

const char* placement_name(Placement p) noexcept {
  switch (p) {
    case Placement::Prefix: return "prefix";
    case Placement::Suffix: return "suffix";
    case Placement::Random: return "random";
    case Placement::Interleaved: return "interleaved";
  }
  return "unknown";
}

Placement parse_placement(std::string_view s) {
  for (Placement p : {Placement::Prefix, Placement::Suffix, Placement::Random,
                      Placement::Interleaved}) {
    if (s == placement_name(p)) return p;
  }
  fail(ErrorKind::InvalidArgument, "unknown placement '" + std::string(s) + "'");
}

std::vector<std::size_t> adversarial_positions(std::size_t n, std::size_t adv_count,
                                               Placement placement, std::uint64_t seed) {
  if (adv_count > n) fail(ErrorKind::InvalidArgument, "adversarial count exceeds n");
  std::vector<std::size_t> out;
  switch (placement) {
    case Placement::Prefix:
      for (std::size_t t = 0; t < adv_count; ++t) out.push_back(t);
      break;
    case Placement::Suffix:
      for (std::size_t t = n - adv_count; t < n; ++t) out.push_back(t);
      break;
    case Placement::Interleaved:
      // Step t is adversarial when floor((t+1)k/n) advances.
      for (std::size_t t = 0; t < n; ++t) {
        if ((t + 1) * adv_count / n > t * adv_count / n) out.push_back(t);
      }
      break;
    case Placement::Random: {
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      StreamRng rng(seed, kPlacementStream);
      for (std::size_t k = 0; k < adv_count; ++k) {
        std::swap(idx[k], idx[k + rng.below(n - k)]);
      }
      out.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(adv_count));
      std::sort(out.begin(), out.end());
      break;
    }
  }
  return out;
}

MixedInstance generate(const GeneratorParams& g, std::uint64_t seed) {
  if (g.n == 0 || g.m == 0) fail(ErrorKind::InvalidArgument, "n and m must be positive");
  if (g.adv_count > g.n) fail(ErrorKind::InvalidArgument, "adversarial count exceeds n");
  if (g.min_options == 0 || g.min_options > g.max_options) {
    fail(ErrorKind::InvalidArgument, "option-count range must satisfy 1 <= min <= max");
  }
  if (g.adv_count < g.n && g.support_size == 0) {
    fail(ErrorKind::InvalidArgument, "stochastic steps need a nonempty support");
  }
  if (g.reward_lo > g.reward_hi) fail(ErrorKind::InvalidArgument, "reward range is empty");
  if (g.family == Family::SeparableGeneric) {
    fail(ErrorKind::InvalidArgument, "the generator only produces serializable families");
  }
  StreamRng rng(seed, kGeneratorStream);

  auto cost = [&] {
    Vec a(g.m);
    if (g.family == Family::SumOfPowers) {
      for (auto& w : a) w = rng.uniform(0.5, 2.0);
      return CostFunction::sum_of_powers(std::move(a), g.p);
    }
    Vec slopes(g.m);
    for (std::size_t i = 0; i < g.m; ++i) {
      a[i] = rng.uniform(0.5, 1.5);
      slopes[i] = rng.uniform(0.0, 1.0);
    }
    return CostFunction::linear_plus_power(std::move(a), std::move(slopes), g.p);
  }();

  auto coordinate = [&] { return rng.coin(0.3) ? 0.0 : rng.uniform(); };
  auto payload = [&]() -> Payload {
    if (g.problem == ProblemKind::Ocp) {
      std::vector<Vec> options(rng.between(g.min_options, g.max_options), Vec(g.m));
      for (auto& o : options) {
        for (auto& x : o) x = coordinate();
      }
      return FeasibleSet(std::move(options));
    }
    Vec a(g.m);
    for (auto& x : a) x = coordinate();
    return Request{rng.uniform(g.reward_lo, g.reward_hi), std::move(a)};
  };

  std::vector<TimelineEntry> timeline(g.n, TimelineEntry{true, std::nullopt});
  for (std::size_t t : adversarial_positions(g.n, g.adv_count, g.placement, seed)) {
    timeline[t].stochastic = false;
  }
  for (auto& e : timeline) {
    if (!e.stochastic) e.data = payload();
  }

  Distribution dist;
  if (g.adv_count < g.n) {
    for (std::size_t j = 0; j < g.support_size; ++j) dist.support.push_back(payload());
    Vec w(g.support_size);
    for (auto& x : w) x = rng.uniform(0.2, 1.0);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double partial = 0.0;
    for (std::size_t j = 0; j + 1 < w.size(); ++j) {
      dist.probs.push_back(w[j] / total);
      partial += dist.probs.back();
    }
    dist.probs.push_back(std::max(0.0, 1.0 - partial));
  }

  MixedInstance inst{g.problem, g.n, g.m, std::move(cost), std::move(timeline),
                     std::move(dist), seed};
  inst.validate();
  return inst;
}

}  // namespace robustpd
