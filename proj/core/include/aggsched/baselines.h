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

#ifndef AGGSCHED_BASELINES_H_
#define AGGSCHED_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <optional>

#include "aggsched/model.h"
#include "aggsched/types.h"

namespace aggsched {

// Collapses every holding to distinct keys.
AggregationState preaggregate(const AggregationState& state);

// Direct shipping of every (node, partition) holding to its destination.
// In phase k, node s ships the pending partition whose destination comes
// first in the rotation (s + 1 + k), (s + 2 + k), ... mod n among those not
// yet taken this phase. A destination takes one transfer per phase and a
// sender makes one.
AggregationPlan plan_repartition(const AggregationState& state);

struct LoomConfig {
  // Explicit fan-in (>= 2). When unset, the fan-in is derived from the leaf
  // and root result sizes.
  std::optional<std::size_t> fanin;
  std::uint64_t leaf_cardinality = 0;
  std::uint64_t root_cardinality = 0;

  static LoomConfig fixed(std::size_t f) { return {f, 0, 0}; }
  static LoomConfig automatic(std::uint64_t leaf, std::uint64_t root) {
    return {std::nullopt, leaf, root};
  }
};

// Fan-in used by plan_loom for `participants` nodes (root included):
// round(root / leaf) clamped to [2, participants - 1] in automatic mode.
std::size_t loom_fanin(const LoomConfig& cfg, std::size_t participants);

// Fixed-fan-in aggregation tree rooted at the destination. The root is
// followed by the nodes holding data in id order, laid out like an implicit
// heap: the i-th node's parent is the ((i - 1) / fanin)-th. Scheduled with
// schedule_trees. Throws std::invalid_argument for all-to-all mappings.
AggregationPlan plan_loom(const AggregationState& state, const LoomConfig& cfg);

// Result sizes LOOM is told about: the mean distinct count over the nodes
// holding data, and the distinct count of the final result.
LoomConfig loom_config_from_state(const AggregationState& state);

}  // namespace aggsched

#endif  // AGGSCHED_BASELINES_H_
