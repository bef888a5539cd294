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

#include "aggsched/model.h"

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <string>

#include "aggsched/error.h"

namespace aggsched {

// ---------------------------------------------------------------------------
// KeyMultiset

KeyMultiset KeyMultiset::from_keys(std::vector<Key> keys) {
  std::sort(keys.begin(), keys.end());
  KeyMultiset out;
  out.tuples_ = keys.size();
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    out.entries_.push_back({keys[i], static_cast<std::uint64_t>(j - i)});
    i = j;
  }
  return out;
}

std::uint64_t KeyMultiset::count(Key k) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), k,
      [](const Entry& e, Key key) { return e.key < key; });
  return (it != entries_.end() && it->key == k) ? it->count : 0;
}

std::vector<Key> KeyMultiset::keys() const {
  std::vector<Key> out;
  out.reserve(entries_.size());
  for (const Entry& e : entries_) out.push_back(e.key);
  return out;
}

KeyMultiset KeyMultiset::aggregated_union(const KeyMultiset& other) const {
  KeyMultiset out;
  out.entries_.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    Key k;
    if (b == other.entries_.end() || (a != entries_.end() && a->key < b->key)) {
      k = (a++)->key;
    } else if (a == entries_.end() || b->key < a->key) {
      k = (b++)->key;
    } else {
      k = a->key;
      ++a;
      ++b;
    }
    out.entries_.push_back({k, 1});
  }
  out.tuples_ = out.entries_.size();
  return out;
}

KeyMultiset KeyMultiset::collapsed() const {
  KeyMultiset out = *this;
  for (Entry& e : out.entries_) e.count = 1;
  out.tuples_ = out.entries_.size();
  return out;
}

// ---------------------------------------------------------------------------
// AggregationState

AggregationState::AggregationState(std::size_t node_count,
                                   std::vector<NodeId> destinations,
                                   double tuple_width)
    : node_count_(node_count),
      destinations_(std::move(destinations)),
      tuple_width_(tuple_width),
      data_(node_count * destinations_.size()) {
  if (node_count_ < 2) {
    throw std::invalid_argument("aggregation needs at least 2 nodes");
  }
  if (destinations_.empty()) {
    throw std::invalid_argument("aggregation needs at least one partition");
  }
  for (NodeId d : destinations_) {
    if (d >= node_count_) {
      throw std::invalid_argument("partition destination out of range");
    }
  }
  if (!(tuple_width_ > 0.0)) {
    throw std::invalid_argument("tuple width must be positive");
  }
}

AggregationState AggregationState::all_to_one(std::size_t node_count,
                                              NodeId destination,
                                              double tuple_width) {
  return AggregationState(node_count, {destination}, tuple_width);
}

bool AggregationState::is_all_to_one() const {
  return std::all_of(destinations_.begin(), destinations_.end(),
                     [&](NodeId d) { return d == destinations_.front(); });
}

std::size_t AggregationState::index(NodeId v, PartitionId l) const {
  if (v >= node_count_ || l >= destinations_.size()) {
    throw std::out_of_range("(node, partition) out of range");
  }
  return static_cast<std::size_t>(v) * destinations_.size() + l;
}

const KeyMultiset& AggregationState::at(NodeId v, PartitionId l) const {
  return data_[index(v, l)];
}

KeyMultiset& AggregationState::at(NodeId v, PartitionId l) {
  return data_[index(v, l)];
}

std::uint64_t AggregationState::total_tuples() const {
  std::uint64_t n = 0;
  for (const KeyMultiset& m : data_) n += m.tuples();
  return n;
}

// ---------------------------------------------------------------------------
// Phases

namespace {

std::string describe(const Transfer& x) {
  return "v" + std::to_string(x.source) + "->v" +
         std::to_string(x.destination) + " (partition " +
         std::to_string(x.partition) + ")";
}

}  // namespace

std::vector<std::string> validate_phase(const AggregationState& state,
                                        std::span<const Transfer> phase) {
  std::vector<std::string> out;
  const std::size_t n = state.node_count();
  std::vector<int> sends(n, 0);
  std::vector<int> receives(n, 0);
  for (const Transfer& x : phase) {
    if (x.source >= n || x.destination >= n ||
        x.partition >= state.partition_count()) {
      out.push_back(describe(x) + ": node or partition out of range");
      continue;
    }
    ++sends[x.source];
    ++receives[x.destination];
    if (x.source == x.destination) {
      out.push_back(describe(x) + ": node sends to itself");
      continue;
    }
    if (x.source == state.destination(x.partition)) {
      out.push_back(describe(x) + ": destination sends its own partition");
    }
    if (state.at(x.source, x.partition).empty()) {
      out.push_back(describe(x) + ": sender holds no data");
    }
    if (state.at(x.destination, x.partition).empty() &&
        x.destination != state.destination(x.partition)) {
      out.push_back(describe(x) +
                    ": receiver holds no data and is not the destination");
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (sends[v] > 1) {
      out.push_back("v" + std::to_string(v) + " sends " +
                    std::to_string(sends[v]) + " transfers in one phase");
    }
    if (receives[v] > 1) {
      out.push_back("v" + std::to_string(v) + " receives " +
                    std::to_string(receives[v]) + " transfers in one phase");
    }
  }
  for (const Transfer& x : phase) {
    for (const Transfer& y : phase) {
      if (x.partition == y.partition && x.source == y.destination) {
        out.push_back("v" + std::to_string(x.source) +
                      " both sends and receives partition " +
                      std::to_string(x.partition));
      }
    }
  }
  return out;
}

namespace {

// Caller has validated the phase. No node sends and receives the same
// partition, so applying transfers one at a time equals the simultaneous
// update.
void apply_in_place(AggregationState& state, std::span<const Transfer> phase) {
  for (const Transfer& x : phase) {
    KeyMultiset& from = state.at(x.source, x.partition);
    KeyMultiset& to = state.at(x.destination, x.partition);
    to = to.aggregated_union(from);
    from = KeyMultiset();
  }
}

[[noreturn]] void throw_violations(const std::string& prefix,
                                   const std::vector<std::string>& errors) {
  std::string msg = prefix;
  for (const std::string& e : errors) msg += "\n  " + e;
  throw InvariantViolation(msg);
}

}  // namespace

AggregationState apply_phase(const AggregationState& state,
                             std::span<const Transfer> phase) {
  auto errors = validate_phase(state, phase);
  if (!errors.empty()) throw_violations("illegal phase:", errors);
  AggregationState next = state;
  apply_in_place(next, phase);
  return next;
}

bool is_complete(const AggregationState& state) {
  for (PartitionId l = 0; l < state.partition_count(); ++l) {
    for (NodeId v = 0; v < state.node_count(); ++v) {
      if (v != state.destination(l) && !state.at(v, l).empty()) return false;
    }
  }
  return true;
}

double transfer_cost(std::uint64_t tuples, double tuple_width, double bw) {
  if (!(bw > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  return static_cast<double>(tuples) * tuple_width / bw;
}

double phase_cost(const AggregationState& state,
                  std::span<const Transfer> phase, const BandwidthMatrix& bw) {
  auto errors = validate_phase(state, phase);
  if (!errors.empty()) throw_violations("illegal phase:", errors);
  double cost = 0.0;
  for (const Transfer& x : phase) {
    cost = std::max(cost, transfer_cost(state.at(x.source, x.partition).tuples(),
                                        state.tuple_width(),
                                        bw(x.source, x.destination)));
  }
  return cost;
}

std::uint64_t PlanCost::total_destination_tuples() const {
  std::uint64_t n = 0;
  for (std::uint64_t d : destination_tuples) n += d;
  return n;
}

KeyMultiset partition_keys(const AggregationState& state, PartitionId l) {
  KeyMultiset all;
  for (NodeId v = 0; v < state.node_count(); ++v) {
    all = all.aggregated_union(state.at(v, l));
  }
  return all;
}

PlanCost plan_cost(const AggregationState& initial, const AggregationPlan& plan,
                   const BandwidthMatrix& bw, PlanCostOptions options) {
  if (bw.node_count() != initial.node_count()) {
    throw std::invalid_argument("bandwidth matrix does not match node count");
  }
  PlanCost out{0.0, {}, {}, {}, {}, initial};
  out.destination_tuples.assign(initial.node_count(), 0);
  AggregationState& state = out.final_state;

  std::vector<KeyMultiset> expected;
  if (options.check_conservation) {
    for (PartitionId l = 0; l < state.partition_count(); ++l) {
      expected.push_back(partition_keys(state, l));
    }
  }

  for (std::size_t i = 0; i < plan.phases.size(); ++i) {
    const Phase& phase = plan.phases[i];
    auto errors = validate_phase(state, phase);
    if (!errors.empty()) {
      throw_violations("phase " + std::to_string(i) + " is illegal:", errors);
    }
    std::vector<double> costs;
    std::vector<std::uint64_t> tuples;
    double worst = 0.0;
    for (const Transfer& x : phase) {
      const std::uint64_t n = state.at(x.source, x.partition).tuples();
      const double c =
          transfer_cost(n, state.tuple_width(), bw(x.source, x.destination));
      costs.push_back(c);
      tuples.push_back(n);
      worst = std::max(worst, c);
      if (x.destination == state.destination(x.partition)) {
        out.destination_tuples[x.destination] += n;
      }
    }
    apply_in_place(state, phase);
    if (options.check_conservation) {
      for (PartitionId l = 0; l < state.partition_count(); ++l) {
        if (!(partition_keys(state, l) == expected[l])) {
          throw InvariantViolation("keys of partition " + std::to_string(l) +
                                   " changed in phase " + std::to_string(i));
        }
      }
    }
    out.phase_costs.push_back(worst);
    out.transfer_costs.push_back(std::move(costs));
    out.transfer_tuples.push_back(std::move(tuples));
    out.total += worst;
  }
  return out;
}

std::vector<PlanViolation> validate_plan(const AggregationState& initial,
                                         const AggregationPlan& plan) {
  std::vector<PlanViolation> out;
  AggregationState state = initial;
  for (std::size_t i = 0; i < plan.phases.size(); ++i) {
    auto errors = validate_phase(state, plan.phases[i]);
    if (!errors.empty()) {
      for (auto& e : errors) out.push_back({i, std::move(e)});
      // Later phases would be judged against a state that never existed.
      return out;
    }
    apply_in_place(state, plan.phases[i]);
  }
  if (!is_complete(state)) {
    out.push_back({plan.phases.size(),
                   "plan ends before every partition reached its destination"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tree scheduling

AggregationPlan schedule_trees(
    const std::vector<std::vector<NodeId>>& parents) {
  AggregationPlan plan;
  if (parents.empty()) return plan;
  const std::size_t n = parents.front().size();

  // pending_children[l][v]: children of v in tree l that have not delivered.
  std::vector<std::vector<std::size_t>> pending_children(
      parents.size(), std::vector<std::size_t>(n, 0));
  std::vector<std::vector<bool>> sent(parents.size(), std::vector<bool>(n));
  std::size_t remaining = 0;
  for (std::size_t l = 0; l < parents.size(); ++l) {
    if (parents[l].size() != n) {
      throw std::invalid_argument("parent maps differ in node count");
    }
    for (NodeId v = 0; v < n; ++v) {
      const NodeId p = parents[l][v];
      if (p == kNoParent) continue;
      if (p >= n || p == v) throw std::invalid_argument("bad parent map");
      ++pending_children[l][p];
      ++remaining;
    }
  }

  while (remaining > 0) {
    std::vector<bool> sending(n, false);
    std::vector<bool> receiving(n, false);
    Phase phase;
    for (std::size_t l = 0; l < parents.size(); ++l) {
      for (NodeId v = 0; v < n; ++v) {
        const NodeId p = parents[l][v];
        if (p == kNoParent || sent[l][v] || pending_children[l][v] != 0) {
          continue;
        }
        if (sending[v] || receiving[p]) continue;
        sending[v] = true;
        receiving[p] = true;
        phase.push_back({v, p, static_cast<PartitionId>(l)});
      }
    }
    if (phase.empty()) {
      throw std::invalid_argument("parent map contains a cycle");
    }
    for (const Transfer& x : phase) {
      sent[x.partition][x.source] = true;
      --pending_children[x.partition][x.destination];
      --remaining;
    }
    plan.phases.push_back(std::move(phase));
  }
  return plan;
}

}  // namespace aggsched
