// Copyright 2026 The aggsched Authors.
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

#include "aggsched/experiment.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "aggsched/baselines.h"
#include "aggsched/error.h"
#include "aggsched/grasp.h"
#include "aggsched/sketch.h"

namespace aggsched {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Planner names

std::string PlannerSpec::name() const {
  switch (kind) {
    case Kind::kGrasp: return "grasp";
    case Kind::kGraspExact: return "grasp_exact";
    case Kind::kRepart: return "repart";
    case Kind::kPreaggRepart: return "preagg_repart";
    case Kind::kLoom:
      return loom_fanin ? "loom_" + std::to_string(*loom_fanin) : "loom_auto";
    case Kind::kOracle: return "oracle";
  }
  return "unknown";
}

PlannerSpec PlannerSpec::parse(std::string_view text) {
  std::string s(text);
  if (s == "grasp") return {Kind::kGrasp, {}};
  if (s == "grasp_exact") return {Kind::kGraspExact, {}};
  if (s == "repart") return {Kind::kRepart, {}};
  if (s == "preagg_repart") return {Kind::kPreaggRepart, {}};
  if (s == "oracle") return {Kind::kOracle, {}};
  if (s.rfind("loom", 0) == 0) {
    std::string arg = s.substr(4);
    if (!arg.empty() && (arg.front() == ':' || arg.front() == '_' ||
                         arg.front() == '(')) {
      arg = arg.substr(1);
      if (!arg.empty() && arg.back() == ')') arg.pop_back();
    } else if (!arg.empty()) {
      throw std::invalid_argument("unknown planner '" + s + "'");
    }
    if (arg.empty() || arg == "auto") return {Kind::kLoom, std::nullopt};
    std::size_t pos = 0;
    unsigned long f = 0;
    try {
      f = std::stoul(arg, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != arg.size() || f < 2) {
      throw std::invalid_argument("LOOM fan-in must be an integer >= 2 in '" +
                                  s + "'");
    }
    return {Kind::kLoom, static_cast<std::size_t>(f)};
  }
  throw std::invalid_argument("unknown planner '" + s + "'");
}

// ---------------------------------------------------------------------------
// Seeds

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

// Walks one JSON object, recording which keys were consumed so unknown keys
// can be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) {
    seen_.insert(std::string(key));
    return j_.contains(std::string(key));
  }

  const json& raw(std::string_view key) {
    seen_.insert(std::string(key));
    return j_.at(std::string(key));
  }

  template <typename T>
  void read(std::string_view key, T& out) {
    if (!has(key)) return;
    try {
      out = raw(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type: ") + e.what());
    }
  }

  double number(std::string_view key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }

  std::size_t count(std::string_view key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(field(key), "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(field(it.key()), "unknown field");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_workload(const json& j, ExperimentConfig& cfg,
                    const std::filesystem::path& base_dir) {
  Section s(j, "workload");
  WorkloadSpec& w = cfg.workload;
  if (s.has("kind")) {
    try {
      w.kind = workload_kind_from_string(s.raw("kind").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(s.field("kind"), e.what());
    }
  }
  w.node_count = s.count("node_count", w.node_count);
  w.tuples_per_node = s.count("tuples_per_node", w.tuples_per_node);
  if (s.has("mapping")) {
    const json& m = s.raw("mapping");
    if (m == "all_to_one") {
      w.mapping = MappingKind::kAllToOne;
    } else if (m == "all_to_all") {
      w.mapping = MappingKind::kAllToAll;
    } else {
      throw ConfigError(s.field("mapping"),
                        "expected \"all_to_one\" or \"all_to_all\"");
    }
  }
  w.partition_count = s.count("partition_count", w.partition_count);
  w.jaccard = s.number("jaccard", w.jaccard);
  w.dup_factor = s.count("dup_factor", w.dup_factor);
  w.total_keys = s.count("total_keys", w.total_keys);
  w.fragment0_share = s.count("fragment0_share", w.fragment0_share);
  if (s.has("imbalance_level")) {
    if (j.contains("fragment0_share")) {
      throw ConfigError(s.field("imbalance_level"),
                        "give either imbalance_level or fragment0_share");
    }
    const double level = s.number("imbalance_level", 1.0);
    try {
      w.fragment0_share =
          imbalance_share_for_level(w.total_keys, w.node_count, level);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s.field("imbalance_level"), e.what());
    }
  }
  w.zipf_theta = s.number("zipf_theta", w.zipf_theta);
  w.domain = s.count("domain", w.domain);
  if (s.has("files")) {
    std::vector<std::string> files;
    s.read("files", files);
    for (const auto& f : files) {
      std::filesystem::path p(f);
      w.files.push_back(p.is_relative() && !base_dir.empty() ? base_dir / p : p);
    }
  }
  if (s.has("keys")) {
    const json& k = s.raw("keys");
    if (!k.is_array()) throw ConfigError(s.field("keys"), "expected an array");
    for (const json& frag : k) {
      if (!frag.is_array()) {
        throw ConfigError(s.field("keys"), "expected one array per fragment");
      }
      std::vector<std::string> tokens;
      for (const json& t : frag) {
        if (t.is_string()) {
          tokens.push_back(t.get<std::string>());
        } else if (t.is_number_unsigned()) {
          tokens.push_back(std::to_string(t.get<std::uint64_t>()));
        } else {
          throw ConfigError(s.field("keys"), "keys must be strings or integers");
        }
      }
      w.inline_keys.push_back(std::move(tokens));
    }
  }
  s.finish();
}

void parse_topology(const json& j, ExperimentConfig& cfg) {
  Section s(j, "topology");
  TopologySpec& t = cfg.topology;
  t.link_bandwidth = s.number("link_bandwidth", t.link_bandwidth);
  s.read("groups", t.groups);
  t.group_size = s.count("group_size", t.group_size);
  t.intra_factor = s.number("intra_factor", t.intra_factor);
  s.finish();
}

void parse_noise(const json& j, ExperimentConfig& cfg) {
  Section s(j, "noise");
  BenchmarkNoise& n = cfg.noise;
  if (s.has("kind")) {
    const json& k = s.raw("kind");
    if (k == "none") {
      n.kind = BenchmarkNoise::Kind::kNone;
    } else if (k == "underestimate") {
      n.kind = BenchmarkNoise::Kind::kUnderestimate;
    } else if (k == "per_entry") {
      n.kind = BenchmarkNoise::Kind::kPerEntry;
    } else {
      throw ConfigError(s.field("kind"),
                        "expected \"none\", \"underestimate\" or \"per_entry\"");
    }
  }
  n.percent = s.number("percent", n.percent);
  s.read("symmetric", n.symmetric);
  s.finish();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir) {
  const json doc = parse_json(json_text);
  Section s(doc, "");
  ExperimentConfig cfg;

  if (s.has("seed")) {
    const json& v = s.raw("seed");
    if (!v.is_number_unsigned()) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    cfg.seed = v.get<std::uint64_t>();
  } else if (const char* env = std::getenv("AGGSCHED_SEED")) {
    try {
      std::size_t pos = 0;
      cfg.seed = std::stoull(env, &pos);
      if (env[pos] != '\0') throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw ConfigError("AGGSCHED_SEED", "expected a non-negative integer");
    }
  }
  cfg.tuple_width = s.number("tuple_width", cfg.tuple_width);
  cfg.hash_functions = s.count("hash_functions", cfg.hash_functions);
  if (s.has("output_dir")) {
    cfg.output_dir = s.raw("output_dir").get<std::string>();
  }
  s.read("record_timing", cfg.record_timing);
  cfg.oracle_node_limit = s.count("oracle_node_limit", cfg.oracle_node_limit);
  s.read("baseline", cfg.baseline);
  if (s.has("planners")) {
    const json& p = s.raw("planners");
    if (!p.is_array()) throw ConfigError("planners", "expected an array");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string where = "planners[" + std::to_string(i) + "]";
      if (!p[i].is_string()) throw ConfigError(where, "expected a string");
      try {
        cfg.planners.push_back(PlannerSpec::parse(p[i].get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where, e.what());
      }
    }
  }
  if (s.has("workload")) parse_workload(s.raw("workload"), cfg, base_dir);
  if (s.has("topology")) parse_topology(s.raw("topology"), cfg);
  if (s.has("noise")) parse_noise(s.raw("noise"), cfg);
  s.finish();

  cfg.workload.tuple_width = cfg.tuple_width;
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", path.string() + ": cannot read config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

void validate_config(const ExperimentConfig& cfg) {
  const WorkloadSpec& w = cfg.workload;
  if (cfg.planners.empty()) {
    throw ConfigError("planners", "at least one planner is required");
  }
  std::set<std::string> names;
  for (const PlannerSpec& p : cfg.planners) {
    if (!names.insert(p.name()).second) {
      throw ConfigError("planners", "planner '" + p.name() + "' listed twice");
    }
  }
  if (w.node_count < 2) {
    throw ConfigError("workload.node_count", "at least 2 nodes are required");
  }
  if (w.tuples_per_node == 0) {
    throw ConfigError("workload.tuples_per_node", "must be positive");
  }
  if (!(cfg.tuple_width > 0.0)) {
    throw ConfigError("tuple_width", "must be positive");
  }
  if (cfg.hash_functions == 0) {
    throw ConfigError("hash_functions", "must be positive");
  }
  if (w.jaccard < 0.0 || w.jaccard > 1.0) {
    throw ConfigError("workload.jaccard", "must be in [0, 1]");
  }
  if (w.kind == WorkloadKind::kDuplicates &&
      (w.dup_factor == 0 || w.tuples_per_node % w.dup_factor != 0)) {
    throw ConfigError("workload.dup_factor",
                      "must be positive and divide tuples_per_node");
  }
  if (w.kind == WorkloadKind::kImbalance) {
    try {
      imbalance_split(w.total_keys, w.node_count, w.fragment0_share);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("workload.fragment0_share", e.what());
    }
  }
  if (w.zipf_theta < 0.0) {
    throw ConfigError("workload.zipf_theta", "must be >= 0");
  }
  if (w.kind == WorkloadKind::kFile && w.files.empty()) {
    throw ConfigError("workload.files", "file workloads need at least one file");
  }
  const TopologySpec& t = cfg.topology;
  if (!(t.link_bandwidth > 0.0)) {
    throw ConfigError("topology.link_bandwidth", "must be positive");
  }
  if (!t.groups.empty() && t.groups.size() != w.node_count) {
    throw ConfigError("topology.groups", "one group per node is required");
  }
  if (!(t.intra_factor >= 1.0)) {
    throw ConfigError("topology.intra_factor", "must be >= 1");
  }
  if (!(cfg.noise.percent >= 0.0 && cfg.noise.percent < 100.0)) {
    throw ConfigError("noise.percent", "must be in [0, 100)");
  }

  const bool range_partitioned = w.kind == WorkloadKind::kImbalance ||
                                 w.kind == WorkloadKind::kZipfSkew;
  const bool all_to_one = !range_partitioned &&
                          w.mapping == MappingKind::kAllToOne;
  for (const PlannerSpec& p : cfg.planners) {
    if (p.kind == PlannerSpec::Kind::kLoom && !all_to_one) {
      throw ConfigError("planners", "LOOM needs an all-to-one mapping");
    }
    if (p.kind == PlannerSpec::Kind::kOracle) {
      if (!all_to_one) {
        throw ConfigError("planners", "the oracle needs an all-to-one mapping");
      }
      if (w.node_count > cfg.oracle_node_limit) {
        throw ConfigError("planners",
                          "the oracle is limited to " +
                              std::to_string(cfg.oracle_node_limit) + " nodes");
      }
    }
  }
}

std::string set_config_value(std::string_view json_text, std::string_view path,
                             std::string_view value) {
  json doc = parse_json(json_text);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = std::string(value);
  }
  json* node = &doc;
  std::string_view rest = path;
  while (true) {
    const auto dot = rest.find('.');
    const std::string key(rest.substr(0, dot));
    if (key.empty()) throw ConfigError(std::string(path), "empty path segment");
    if (!node->is_object()) {
      throw ConfigError(std::string(path), "path does not lead to an object");
    }
    if (dot == std::string_view::npos) {
      (*node)[key] = parsed;
      break;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    rest = rest.substr(dot + 1);
  }
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Running

const PlannerReport* SimReport::find(std::string_view planner) const {
  for (const PlannerReport& p : planners) {
    if (p.planner == planner) return &p;
  }
  return nullptr;
}

std::vector<LinkInterval> link_timeline(const PlanCost& cost,
                                        const AggregationPlan& plan) {
  std::vector<LinkInterval> out;
  double start = 0.0;
  for (std::size_t i = 0; i < plan.phases.size(); ++i) {
    for (std::size_t j = 0; j < plan.phases[i].size(); ++j) {
      const Transfer& x = plan.phases[i][j];
      const double end = start + cost.transfer_costs[i][j];
      const std::uint64_t tuples = cost.transfer_tuples[i][j];
      out.push_back({x.source, LinkInterval::Direction::kUp, start, end,
                     tuples, i});
      out.push_back({x.destination, LinkInterval::Direction::kDown, start, end,
                     tuples, i});
    }
    start += cost.phase_costs[i];
  }
  return out;
}

namespace {

std::vector<std::uint32_t> locality_groups(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.workload.node_count;
  std::vector<std::uint32_t> groups(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!cfg.topology.groups.empty()) {
      groups[v] = cfg.topology.groups[v];
    } else if (cfg.topology.group_size > 0) {
      groups[v] = static_cast<std::uint32_t>(v / cfg.topology.group_size);
    } else {
      groups[v] = static_cast<std::uint32_t>(v);
    }
  }
  return groups;
}

void check_plan(const std::string& planner, const AggregationState& input,
                const AggregationPlan& plan) {
  const auto violations = validate_plan(input, plan);
  if (violations.empty()) return;
  std::string msg = "planner '" + planner + "' produced an illegal plan:";
  for (const auto& v : violations) {
    msg += "\n  phase " + std::to_string(v.phase) + ": " + v.message;
  }
  throw InvariantViolation(msg);
}

}  // namespace

AggregationState experiment_state(const ExperimentConfig& cfg) {
  WorkloadSpec spec = cfg.workload;
  spec.tuple_width = cfg.tuple_width;
  spec.seed = derive_seed(cfg.seed, "workload");
  return generate_workload(spec);
}

BandwidthMatrix true_bandwidth(const ExperimentConfig& cfg) {
  const Topology top = make_uniform_star(cfg.workload.node_count,
                                         cfg.topology.link_bandwidth);
  return pairwise_bandwidth(top, locality_groups(cfg),
                            cfg.topology.intra_factor);
}

SimReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const AggregationState raw = experiment_state(cfg);
  const AggregationState pre = preaggregate(raw);
  const BandwidthMatrix true_bw = true_bandwidth(cfg);
  const BandwidthMatrix measured =
      simulate_benchmark(true_bw, cfg.noise, derive_seed(cfg.seed, "noise"));
  const HashFamily family(cfg.hash_functions, derive_seed(cfg.seed, "minhash"));

  SimReport report;
  report.node_count = raw.node_count();
  report.partition_count = raw.partition_count();
  report.seed = cfg.seed;
  report.input_tuples = raw.total_tuples();

  for (const PlannerSpec& p : cfg.planners) {
    const AggregationState& input =
        p.kind == PlannerSpec::Kind::kRepart ? raw : pre;
    const auto t0 = std::chrono::steady_clock::now();
    AggregationPlan plan;
    switch (p.kind) {
      case PlannerSpec::Kind::kGrasp:
        plan = plan_grasp(input, measured, GraspMode::kEstimates, family);
        break;
      case PlannerSpec::Kind::kGraspExact:
        plan = plan_grasp(input, measured, GraspMode::kExact);
        break;
      case PlannerSpec::Kind::kRepart:
      case PlannerSpec::Kind::kPreaggRepart:
        plan = plan_repartition(input);
        break;
      case PlannerSpec::Kind::kLoom:
        plan = plan_loom(input, p.loom_fanin
                                    ? LoomConfig::fixed(*p.loom_fanin)
                                    : loom_config_from_state(input));
        break;
      case PlannerSpec::Kind::kOracle:
        plan = optimal_tree_plan(input, measured, cfg.oracle_node_limit)
                   .tree.schedule;
        break;
    }
    const auto t1 = std::chrono::steady_clock::now();

    check_plan(p.name(), input, plan);
    const PlanCost realized =
        plan_cost(input, plan, true_bw, {.check_conservation = true});
    const PlanCost planned = plan_cost(input, plan, measured);

    PlannerReport r;
    r.planner = p.name();
    r.planned_cost = planned.total;
    r.realized_cost = realized.total;
    r.phase_costs = realized.phase_costs;
    r.destination_tuples = realized.destination_tuples;
    r.dest_tuples = realized.total_destination_tuples();
    r.planning_seconds =
        cfg.record_timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
    r.timeline = link_timeline(realized, plan);
    r.plan = std::move(plan);
    report.planners.push_back(std::move(r));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepAxis SweepAxis::parse(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("axis", "expected <path>=<v1,v2,...>");
  }
  SweepAxis axis;
  axis.path = std::string(text.substr(0, eq));
  std::string_view rest = text.substr(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    axis.values.emplace_back(rest.substr(0, comma));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (axis.values.empty() ||
      std::any_of(axis.values.begin(), axis.values.end(),
                  [](const std::string& v) { return v.empty(); })) {
    throw ConfigError("axis", "axis needs at least one non-empty value");
  }
  return axis;
}

SweepResult run_sweep(std::string_view config_json, const SweepAxis& axis,
                      const std::filesystem::path& base_dir) {
  SweepResult out;
  out.axis = axis.path;
  for (const std::string& value : axis.values) {
    const std::string doc = set_config_value(config_json, axis.path, value);
    const ExperimentConfig cfg = parse_config(doc, base_dir);
    if (out.baseline.empty()) out.baseline = cfg.baseline;
    SimReport report = run_experiment(cfg);
    const PlannerReport* base = report.find(cfg.baseline);
    for (const PlannerReport& p : report.planners) {
      SweepRow row{value, p, std::nullopt};
      if (base != nullptr && p.realized_cost > 0.0) {
        row.speedup = base->realized_cost / p.realized_cost;
      }
      out.rows.push_back(std::move(row));
    }
    out.reports.push_back(std::move(report));
  }
  return out;
}

}  // namespace aggsched
