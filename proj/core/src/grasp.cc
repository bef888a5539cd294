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

#include "aggsched/grasp.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "aggsched/error.h"

namespace aggsched {

// ---------------------------------------------------------------------------
// ExactSizes

ExactSizes::ExactSizes(const AggregationState& state)
    : nodes_(state.node_count()), partitions_(state.partition_count()) {
  sets_.reserve(nodes_ * partitions_);
  for (NodeId v = 0; v < nodes_; ++v) {
    for (PartitionId l = 0; l < partitions_; ++l) {
      sets_.push_back(state.at(v, l).collapsed());
    }
  }
}

double ExactSizes::card(NodeId v, PartitionId l) const {
  return static_cast<double>(sets_.at(v * partitions_ + l).distinct());
}

double ExactSizes::est_card(NodeId s, NodeId t, PartitionId l) const {
  const KeyMultiset& a = sets_.at(s * partitions_ + l);
  const KeyMultiset& b = sets_.at(t * partitions_ + l);
  if (a.empty() && b.empty()) {
    throw DegenerateInputError("union estimate of two empty holdings");
  }
  return static_cast<double>(a.aggregated_union(b).distinct());
}

void ExactSizes::update(NodeId s, NodeId t, PartitionId l) {
  KeyMultiset& from = sets_.at(s * partitions_ + l);
  KeyMultiset& to = sets_.at(t * partitions_ + l);
  if (from.empty() && to.empty()) {
    throw DegenerateInputError("update of two empty holdings");
  }
  to = to.aggregated_union(from);
  from = KeyMultiset();
}

// ---------------------------------------------------------------------------
// Planning

double cost_entry(const SizeEstimator& sizes, const BandwidthMatrix& bw,
                  std::span<const NodeId> destinations, NodeId s, NodeId t,
                  PartitionId l, double tuple_width) {
  const NodeId dest = destinations[l];
  if (s == t || s == dest) return kForbidden;
  const double sender_card = sizes.card(s, l);
  if (sender_card == 0.0) return kForbidden;
  const double b = bw(s, t);
  const double now = sender_card * tuple_width / b;
  if (t == dest) return now;
  if (sizes.card(t, l) == 0.0) return kForbidden;
  return now + sizes.est_card(s, t, l) * tuple_width / b;
}

bool has_pending_data(const SizeEstimator& sizes,
                      std::span<const NodeId> destinations) {
  for (PartitionId l = 0; l < sizes.partition_count(); ++l) {
    for (NodeId v = 0; v < sizes.node_count(); ++v) {
      if (v != destinations[l] && sizes.card(v, l) > 0.0) return true;
    }
  }
  return false;
}

namespace {

struct Candidate {
  double cost;
  PartitionId partition;
  NodeId receiver;
  NodeId sender;

  bool operator<(const Candidate& o) const {
    return std::tie(cost, partition, receiver, sender) <
           std::tie(o.cost, o.partition, o.receiver, o.sender);
  }
};

void check_inputs(const SizeEstimator& sizes, const BandwidthMatrix& bw,
                  std::span<const NodeId> destinations, double tuple_width) {
  if (destinations.size() != sizes.partition_count()) {
    throw std::invalid_argument("one destination per partition required");
  }
  if (bw.node_count() != sizes.node_count()) {
    throw std::invalid_argument("bandwidth matrix does not match node count");
  }
  for (NodeId d : destinations) {
    if (d >= sizes.node_count()) {
      throw std::invalid_argument("destination out of range");
    }
  }
  if (!(tuple_width > 0.0)) {
    throw std::invalid_argument("tuple width must be positive");
  }
}

}  // namespace

Phase select_phase(SizeEstimator& sizes, const BandwidthMatrix& bw,
                   std::span<const NodeId> destinations, double tuple_width) {
  check_inputs(sizes, bw, destinations, tuple_width);
  const std::size_t n = sizes.node_count();
  const std::size_t partitions = sizes.partition_count();

  // An update(s, t, l) only changes entries of partition l that involve s
  // or t, and both leave partition l's candidate set as soon as they are
  // picked. Every entry still eligible therefore keeps the value it had at
  // the start of the phase, and one sorted pass over the finite entries
  // makes the same picks as recomputing the minimum after every update.
  std::vector<Candidate> candidates;
  for (PartitionId l = 0; l < partitions; ++l) {
    for (NodeId s = 0; s < n; ++s) {
      for (NodeId t = 0; t < n; ++t) {
        const double c = cost_entry(sizes, bw, destinations, s, t, l,
                                    tuple_width);
        if (std::isfinite(c)) candidates.push_back({c, l, t, s});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<bool> can_send(n, true);
  std::vector<bool> can_receive(n, true);
  // in_partition[l * n + v]: v is still in V_l.
  std::vector<bool> in_partition(partitions * n, true);
  std::size_t senders_left = n;
  std::size_t receivers_left = n;

  Phase phase;
  for (const Candidate& c : candidates) {
    if (senders_left == 0 || receivers_left == 0) break;
    const NodeId s = c.sender;
    const NodeId t = c.receiver;
    const std::size_t base = static_cast<std::size_t>(c.partition) * n;
    if (!can_send[s] || !can_receive[t] || !in_partition[base + s] ||
        !in_partition[base + t]) {
      continue;
    }
    can_send[s] = false;
    can_receive[t] = false;
    in_partition[base + s] = false;
    in_partition[base + t] = false;
    --senders_left;
    --receivers_left;
    phase.push_back({s, t, c.partition});
    sizes.update(s, t, c.partition);
  }
  return phase;
}

AggregationPlan plan_grasp(SizeEstimator& sizes, const BandwidthMatrix& bw,
                           std::span<const NodeId> destinations,
                           double tuple_width) {
  check_inputs(sizes, bw, destinations, tuple_width);
  AggregationPlan plan;
  // Every phase retires at least one (node, partition) holding.
  const std::size_t max_phases = sizes.node_count() * sizes.partition_count();
  while (has_pending_data(sizes, destinations)) {
    Phase phase = select_phase(sizes, bw, destinations, tuple_width);
    if (phase.empty() || plan.phases.size() >= max_phases) {
      throw InvariantViolation("phase selection made no progress");
    }
    plan.phases.push_back(std::move(phase));
  }
  return plan;
}

AggregationPlan plan_grasp(const AggregationState& state,
                           const BandwidthMatrix& bw, GraspMode mode,
                           const HashFamily& family) {
  if (mode == GraspMode::kExact) {
    ExactSizes sizes(state);
    return plan_grasp(sizes, bw, state.destinations(), state.tuple_width());
  }
  SketchState sketch(state, family);
  return plan_grasp(sketch, bw, state.destinations(), state.tuple_width());
}

}  // namespace aggsched
