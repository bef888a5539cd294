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

#include "aggsched/baselines.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aggsched {

AggregationState preaggregate(const AggregationState& state) {
  AggregationState out = state;
  for (NodeId v = 0; v < out.node_count(); ++v) {
    for (PartitionId l = 0; l < out.partition_count(); ++l) {
      out.at(v, l) = out.at(v, l).collapsed();
    }
  }
  return out;
}

AggregationPlan plan_repartition(const AggregationState& state) {
  const std::size_t n = state.node_count();
  const std::size_t partitions = state.partition_count();

  // pending[s]: partitions s still has to ship.
  std::vector<std::vector<PartitionId>> pending(n);
  std::size_t remaining = 0;
  for (NodeId s = 0; s < n; ++s) {
    for (PartitionId l = 0; l < partitions; ++l) {
      if (s != state.destination(l) && !state.at(s, l).empty()) {
        pending[s].push_back(l);
        ++remaining;
      }
    }
  }

  AggregationPlan plan;
  for (std::size_t k = 0; remaining > 0; ++k) {
    std::vector<bool> receiving(n, false);
    Phase phase;
    for (NodeId s = 0; s < n; ++s) {
      if (pending[s].empty()) continue;
      // Rotation order: the partition headed to (s + 1 + k) mod n first, so
      // a balanced all-to-all drains as a sequence of permutations.
      auto distance = [&](PartitionId l) {
        return (state.destination(l) + 2 * n - s - 1 - k % n) % n;
      };
      auto best = pending[s].end();
      for (auto it = pending[s].begin(); it != pending[s].end(); ++it) {
        if (receiving[state.destination(*it)]) continue;
        if (best == pending[s].end() || distance(*it) < distance(*best)) {
          best = it;
        }
      }
      if (best == pending[s].end()) continue;
      receiving[state.destination(*best)] = true;
      phase.push_back({s, state.destination(*best), *best});
      pending[s].erase(best);
      --remaining;
    }
    plan.phases.push_back(std::move(phase));
  }
  return plan;
}

std::size_t loom_fanin(const LoomConfig& cfg, std::size_t participants) {
  const std::size_t max_fanin = std::max<std::size_t>(2, participants - 1);
  if (cfg.fanin) {
    if (*cfg.fanin < 2) throw std::invalid_argument("LOOM fan-in must be >= 2");
    return *cfg.fanin;
  }
  if (cfg.leaf_cardinality == 0) {
    throw std::invalid_argument("automatic LOOM fan-in needs |R_leaf| > 0");
  }
  const double ratio = static_cast<double>(cfg.root_cardinality) /
                       static_cast<double>(cfg.leaf_cardinality);
  const auto f = static_cast<std::size_t>(std::llround(std::max(ratio, 0.0)));
  return std::clamp<std::size_t>(f, 2, max_fanin);
}

AggregationPlan plan_loom(const AggregationState& state,
                          const LoomConfig& cfg) {
  if (!state.is_all_to_one()) {
    throw std::invalid_argument("LOOM only plans all-to-one aggregations");
  }
  const std::size_t n = state.node_count();
  const NodeId root = state.destination(0);
  std::vector<std::vector<NodeId>> parents;
  for (PartitionId l = 0; l < state.partition_count(); ++l) {
    std::vector<NodeId> order{root};
    for (NodeId v = 0; v < n; ++v) {
      if (v != root && !state.at(v, l).empty()) order.push_back(v);
    }
    std::vector<NodeId> parent(n, kNoParent);
    if (order.size() > 1) {
      const std::size_t fanin = loom_fanin(cfg, order.size());
      for (std::size_t i = 1; i < order.size(); ++i) {
        parent[order[i]] = order[(i - 1) / fanin];
      }
    }
    parents.push_back(std::move(parent));
  }
  return schedule_trees(parents);
}

LoomConfig loom_config_from_state(const AggregationState& state) {
  std::uint64_t leaf_total = 0;
  std::uint64_t holders = 0;
  std::uint64_t root = 0;
  for (PartitionId l = 0; l < state.partition_count(); ++l) {
    for (NodeId v = 0; v < state.node_count(); ++v) {
      if (state.at(v, l).empty()) continue;
      leaf_total += state.at(v, l).distinct();
      ++holders;
    }
    root += partition_keys(state, l).distinct();
  }
  const std::uint64_t leaf = holders == 0 ? 0 : leaf_total / holders;
  return LoomConfig::automatic(leaf, root);
}

}  // namespace aggsched
