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

#ifndef AGGSCHED_MODEL_H_
#define AGGSCHED_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aggsched/topology.h"
#include "aggsched/types.h"

namespace aggsched {

// Multiset of group-by keys held by one node for one partition. Entries are
// kept sorted by key; a count above one means the data has not been
// pre-aggregated yet.
class KeyMultiset {
 public:
  struct Entry {
    Key key;
    std::uint64_t count;
    bool operator==(const Entry&) const = default;
  };

  KeyMultiset() = default;
  static KeyMultiset from_keys(std::vector<Key> keys);

  bool empty() const { return entries_.empty(); }
  std::size_t distinct() const { return entries_.size(); }
  // Tuple count, with multiplicity.
  std::uint64_t tuples() const { return tuples_; }
  std::uint64_t count(Key k) const;
  bool contains(Key k) const { return count(k) != 0; }

  std::span<const Entry> entries() const { return entries_; }
  std::vector<Key> keys() const;

  // Distinct keys of both sides, each with multiplicity one: the holding of
  // a node after it aggregates what it received with what it had.
  KeyMultiset aggregated_union(const KeyMultiset& other) const;
  // Same keys, multiplicity one.
  KeyMultiset collapsed() const;

  bool operator==(const KeyMultiset&) const = default;

 private:
  std::vector<Entry> entries_;
  std::uint64_t tuples_ = 0;
};

// Ground-truth data per (node, partition) together with the partition ->
// destination mapping and the tuple width in bytes.
class AggregationState {
 public:
  AggregationState(std::size_t node_count, std::vector<NodeId> destinations,
                   double tuple_width = 1.0);

  // Single partition aggregated to `destination`.
  static AggregationState all_to_one(std::size_t node_count,
                                     NodeId destination,
                                     double tuple_width = 1.0);

  std::size_t node_count() const { return node_count_; }
  std::size_t partition_count() const { return destinations_.size(); }
  NodeId destination(PartitionId l) const { return destinations_.at(l); }
  std::span<const NodeId> destinations() const { return destinations_; }
  double tuple_width() const { return tuple_width_; }

  // True when every partition has the same destination.
  bool is_all_to_one() const;

  const KeyMultiset& at(NodeId v, PartitionId l) const;
  KeyMultiset& at(NodeId v, PartitionId l);

  std::uint64_t total_tuples() const;

  bool operator==(const AggregationState&) const = default;

 private:
  std::size_t index(NodeId v, PartitionId l) const;

  std::size_t node_count_;
  std::vector<NodeId> destinations_;
  double tuple_width_;
  std::vector<KeyMultiset> data_;
};

// Constraint checks for one phase against the state it starts from. Returns
// one human-readable message per violation; empty means the phase is legal.
std::vector<std::string> validate_phase(const AggregationState& state,
                                        std::span<const Transfer> phase);

// Applies a phase: every receiver aggregates what it is sent, every sender
// ends up empty for the sent partition. Throws InvariantViolation if the
// phase is not legal.
AggregationState apply_phase(const AggregationState& state,
                             std::span<const Transfer> phase);

// True iff every partition's data sits only at its destination.
bool is_complete(const AggregationState& state);

// tuples * w / bw. Throws std::invalid_argument for bw <= 0.
double transfer_cost(std::uint64_t tuples, double tuple_width, double bw);

// Cost of the transfer that completes last.
double phase_cost(const AggregationState& state,
                  std::span<const Transfer> phase, const BandwidthMatrix& bw);

struct PlanCost {
  double total = 0.0;
  std::vector<double> phase_costs;
  // transfer_costs[i][j] / transfer_tuples[i][j] describe phase i, transfer j.
  std::vector<std::vector<double>> transfer_costs;
  std::vector<std::vector<std::uint64_t>> transfer_tuples;
  // Tuples each node received for partitions it is the destination of.
  std::vector<std::uint64_t> destination_tuples;
  AggregationState final_state;

  std::uint64_t total_destination_tuples() const;
};

struct PlanCostOptions {
  // Verify after every phase that no key was lost or invented.
  bool check_conservation = false;
};

// Applies the phases in order and sums their costs. Throws
// InvariantViolation, naming the phase, on the first illegal phase.
PlanCost plan_cost(const AggregationState& initial, const AggregationPlan& plan,
                   const BandwidthMatrix& bw, PlanCostOptions options = {});

struct PlanViolation {
  // Index of the offending phase; equals the phase count for a plan that
  // ends before the aggregation is complete.
  std::size_t phase;
  std::string message;
};

std::vector<PlanViolation> validate_plan(const AggregationState& initial,
                                         const AggregationPlan& plan);

// Distinct keys of partition `l` summed over all nodes' holdings, as a set.
KeyMultiset partition_keys(const AggregationState& state, PartitionId l);

inline constexpr NodeId kNoParent = std::numeric_limits<NodeId>::max();

// As-soon-as-possible schedule for per-partition aggregation trees.
// parents[l][v] is v's parent in partition l's tree or kNoParent when v does
// not send. A node sends once all of its children have delivered; a parent
// takes one child per phase, lowest node id first.
AggregationPlan schedule_trees(
    const std::vector<std::vector<NodeId>>& parents);

}  // namespace aggsched

#endif  // AGGSCHED_MODEL_H_
