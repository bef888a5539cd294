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

#ifndef AGGSCHED_GRASP_H_
#define AGGSCHED_GRASP_H_

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "aggsched/model.h"
#include "aggsched/sketch.h"
#include "aggsched/topology.h"
#include "aggsched/types.h"

namespace aggsched {

inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

// Exact cardinalities kept from the real key sets. Planning with this in
// place of a SketchState isolates the planner from estimation error.
class ExactSizes final : public SizeEstimator {
 public:
  // Holdings are collapsed to distinct keys.
  explicit ExactSizes(const AggregationState& state);

  std::size_t node_count() const override { return nodes_; }
  std::size_t partition_count() const override { return partitions_; }
  double card(NodeId v, PartitionId l) const override;
  double est_card(NodeId s, NodeId t, PartitionId l) const override;
  void update(NodeId s, NodeId t, PartitionId l) override;

 private:
  std::size_t nodes_;
  std::size_t partitions_;
  std::vector<KeyMultiset> sets_;
};

// One-phase-lookahead cost of shipping partition l from s to t:
//   forbidden            if s == t, s is l's destination, or either side
//                        holds nothing for l (an empty t is allowed when it
//                        is the destination);
//   COST(s->t)           if t is l's destination;
//   COST(s->t) + E(s,t)  otherwise, E being the cost of forwarding the
//                        estimated union at the same bandwidth.
// `destinations[l]` is the destination of partition l.
double cost_entry(const SizeEstimator& sizes, const BandwidthMatrix& bw,
                  std::span<const NodeId> destinations, NodeId s, NodeId t,
                  PartitionId l, double tuple_width);

// Greedy phase selection. Repeatedly takes the cheapest finite entry whose
// sender is still free to send and whose receiver is still free to receive,
// with neither touching that partition yet in this phase, and applies the
// size update. Ties go to the lowest (partition, receiver, sender).
// Returns an empty phase only when nothing is left to deliver.
Phase select_phase(SizeEstimator& sizes, const BandwidthMatrix& bw,
                   std::span<const NodeId> destinations, double tuple_width);

// True when some node other than a partition's destination still holds
// (estimated) data for it.
bool has_pending_data(const SizeEstimator& sizes,
                      std::span<const NodeId> destinations);

// Runs select_phase until every partition is at its destination. Each call
// costs O(n^2 |L| log(n^2 |L|)) for n nodes and |L| partitions, and at least
// one (node, partition) holding is retired per phase.
AggregationPlan plan_grasp(SizeEstimator& sizes, const BandwidthMatrix& bw,
                           std::span<const NodeId> destinations,
                           double tuple_width);

enum class GraspMode { kEstimates, kExact };

// Convenience wrapper: pre-aggregated state in, plan out. kEstimates builds
// minhash signatures with `family`; kExact uses ExactSizes.
AggregationPlan plan_grasp(const AggregationState& state,
                           const BandwidthMatrix& bw, GraspMode mode,
                           const HashFamily& family = HashFamily());

}  // namespace aggsched

#endif  // AGGSCHED_GRASP_H_
