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

#ifndef AGGSCHED_EXPERIMENT_H_
#define AGGSCHED_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aggsched/model.h"
#include "aggsched/oracle.h"
#include "aggsched/topology.h"
#include "aggsched/types.h"
#include "aggsched/workloads.h"

namespace aggsched {

struct PlannerSpec {
  enum class Kind { kGrasp, kGraspExact, kRepart, kPreaggRepart, kLoom, kOracle };

  Kind kind = Kind::kGrasp;
  // LOOM only; unset means automatic fan-in.
  std::optional<std::size_t> loom_fanin;

  // "grasp", "grasp_exact", "repart", "preagg_repart", "loom_5",
  // "loom_auto", "oracle".
  std::string name() const;
  // Accepts the names above plus "loom:5" / "loom:auto" / "loom(5)".
  static PlannerSpec parse(std::string_view text);

  bool operator==(const PlannerSpec&) const = default;
};

struct TopologySpec {
  double link_bandwidth = 1.0;
  // Locality group per node; empty means every node alone. `group_size`
  // (when non-zero) fills groups as consecutive blocks instead.
  std::vector<std::uint32_t> groups;
  std::size_t group_size = 0;
  double intra_factor = 1.0;
};

struct ExperimentConfig {
  WorkloadSpec workload;
  TopologySpec topology;
  BenchmarkNoise noise;
  std::vector<PlannerSpec> planners;
  double tuple_width = 1.0;
  std::size_t hash_functions = 100;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  // Measure planning wall-clock time. Timings are the only output that
  // differs between identical runs.
  bool record_timing = true;
  std::size_t oracle_node_limit = kDefaultOracleNodeLimit;
  // Sweeps report speedups relative to this planner.
  std::string baseline = "preagg_repart";
};

// Parses the JSON config document. Missing fields keep their defaults; the
// seed falls back to $AGGSCHED_SEED, then 1. Throws ConfigError naming the
// offending field.
// Relative key-file paths are resolved against `base_dir`.
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});
// Relative key-file paths are resolved against the config's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

// Returns the JSON document with the dotted `path` set to `value`. The value
// is taken as JSON when it parses as such ("0.5", "[1,2]", "true") and as a
// string otherwise. Throws ConfigError for malformed documents.
std::string set_config_value(std::string_view json_text, std::string_view path,
                             std::string_view value);
// Throws ConfigError for configs that cannot run.
void validate_config(const ExperimentConfig& cfg);

// Seeds for the independent random streams of one experiment.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

struct LinkInterval {
  enum class Direction { kUp, kDown };

  NodeId link = 0;
  Direction direction = Direction::kUp;
  double start = 0.0;
  double end = 0.0;
  std::uint64_t tuples = 0;
  std::size_t phase = 0;
};

struct PlannerReport {
  std::string planner;
  AggregationPlan plan;
  // Cost of the plan under the measured bandwidth the planner saw.
  double planned_cost = 0.0;
  // Cost under the true bandwidth.
  double realized_cost = 0.0;
  std::vector<double> phase_costs;
  std::vector<std::uint64_t> destination_tuples;
  std::uint64_t dest_tuples = 0;
  double planning_seconds = 0.0;
  std::vector<LinkInterval> timeline;
};

struct SimReport {
  std::size_t node_count = 0;
  std::size_t partition_count = 0;
  std::uint64_t seed = 0;
  std::uint64_t input_tuples = 0;
  std::vector<PlannerReport> planners;

  const PlannerReport* find(std::string_view planner) const;
};

// The raw (not pre-aggregated) initial state of an experiment.
AggregationState experiment_state(const ExperimentConfig& cfg);
// The true bandwidth matrix of an experiment; planners see a noisy copy.
BandwidthMatrix true_bandwidth(const ExperimentConfig& cfg);

// Each planner starts from the same generated state. repart ships raw
// tuples; every other planner works on the pre-aggregated state. Planning
// uses the benchmarked (noisy) bandwidth, realization the true one. Plans
// are validated and key conservation is checked after every phase; a
// failure throws InvariantViolation.
SimReport run_experiment(const ExperimentConfig& cfg);

// Per-link busy intervals: each transfer occupies its sender's uplink and
// its receiver's downlink from the start of its phase for its own duration.
std::vector<LinkInterval> link_timeline(const PlanCost& cost,
                                        const AggregationPlan& plan);

struct SweepAxis {
  // Dotted config path, e.g. "workload.jaccard".
  std::string path;
  std::vector<std::string> values;

  // "workload.jaccard=0,0.25,0.5".
  static SweepAxis parse(std::string_view text);
};

struct SweepRow {
  std::string axis_value;
  PlannerReport report;
  // baseline realized cost / planner realized cost; unset without baseline.
  std::optional<double> speedup;
};

struct SweepResult {
  std::string axis;
  std::string baseline;
  std::vector<SweepRow> rows;
  std::vector<SimReport> reports;
};

// Runs the config template once per axis value, setting the axis path in
// the JSON document before parsing it.
SweepResult run_sweep(std::string_view config_json, const SweepAxis& axis,
                      const std::filesystem::path& base_dir = {});

}  // namespace aggsched

#endif  // AGGSCHED_EXPERIMENT_H_
