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

#ifndef AGGSCHED_ORACLE_H_
#define AGGSCHED_ORACLE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aggsched/model.h"
#include "aggsched/topology.h"
#include "aggsched/types.h"

namespace aggsched {

// |distinct(a) u distinct(b)|, computed exactly.
std::uint64_t exact_union_card(const KeyMultiset& a, const KeyMultiset& b);

// An aggregation tree rooted at the destination together with the phase
// schedule it was evaluated with.
struct TreePlan {
  // parent[v], or kNoParent for the root and for nodes without data.
  std::vector<NodeId> parent;
  AggregationPlan schedule;
};

struct OptimalTreeResult {
  TreePlan tree;
  double cost = 0.0;
  std::size_t trees_examined = 0;
  std::size_t schedules_examined = 0;
};

inline constexpr std::size_t kDefaultOracleNodeLimit = 6;

// Exhaustive search for the cheapest tree-shaped plan of a single-partition
// all-to-one aggregation. Every spanning tree over the destination and the
// nodes holding data is enumerated, and for each tree every legal phase
// schedule (children before parents, one send and one receive per node and
// phase) is costed exactly. Since every legal all-to-one plan has this
// shape, the result is a lower bound on any planner's cost for the same
// bandwidth matrix. Ties keep the lexicographically smallest parent map.
//
// Throws std::invalid_argument for more than one partition or for more than
// `node_limit` nodes.
OptimalTreeResult optimal_tree_plan(const AggregationState& state,
                                    const BandwidthMatrix& bw,
                                    std::size_t node_limit =
                                        kDefaultOracleNodeLimit);

}  // namespace aggsched

#endif  // AGGSCHED_ORACLE_H_
