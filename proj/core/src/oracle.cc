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

#include "aggsched/oracle.h"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace aggsched {

std::uint64_t exact_union_card(const KeyMultiset& a, const KeyMultiset& b) {
  // Both entry lists are sorted by key.
  std::uint64_t n = 0;
  auto x = a.entries().begin();
  auto y = b.entries().begin();
  while (x != a.entries().end() && y != b.entries().end()) {
    if (x->key < y->key) {
      ++x;
    } else if (y->key < x->key) {
      ++y;
    } else {
      ++x;
      ++y;
    }
    ++n;
  }
  n += static_cast<std::uint64_t>(a.entries().end() - x);
  n += static_cast<std::uint64_t>(b.entries().end() - y);
  return n;
}

namespace {

// Depth-first search over the legal phase schedules of one tree.
class ScheduleSearch {
 public:
  ScheduleSearch(const AggregationState& state, const BandwidthMatrix& bw,
                 const std::vector<NodeId>& parent, double bound)
      : bw_(bw), parent_(parent), width_(state.tuple_width()), best_(bound) {
    const std::size_t n = state.node_count();
    holding_.resize(n);
    pending_children_.assign(n, 0);
    sent_.assign(n, false);
    for (NodeId v = 0; v < n; ++v) {
      holding_[v] = state.at(v, 0);
      if (parent_[v] != kNoParent) {
        ++pending_children_[parent_[v]];
        ++remaining_;
      }
    }
  }

  // Returns true if a schedule cheaper than the bound was found.
  bool run() {
    search(0.0);
    return found_;
  }

  double best_cost() const { return best_; }
  const AggregationPlan& best_schedule() const { return best_plan_; }
  std::size_t schedules() const { return schedules_; }

 private:
  void search(double cost_so_far) {
    if (cost_so_far >= best_) return;
    if (remaining_ == 0) {
      ++schedules_;
      best_ = cost_so_far;
      best_plan_ = current_;
      found_ = true;
      return;
    }
    std::vector<NodeId> ready;
    for (NodeId v = 0; v < parent_.size(); ++v) {
      if (parent_[v] != kNoParent && !sent_[v] && pending_children_[v] == 0) {
        ready.push_back(v);
      }
    }
    const std::size_t subsets = std::size_t{1} << ready.size();
    for (std::size_t mask = 1; mask < subsets; ++mask) {
      Phase phase;
      bool legal = true;
      std::vector<bool> receiving(parent_.size(), false);
      for (std::size_t i = 0; i < ready.size() && legal; ++i) {
        if (!(mask & (std::size_t{1} << i))) continue;
        const NodeId p = parent_[ready[i]];
        if (receiving[p]) legal = false;
        receiving[p] = true;
        phase.push_back({ready[i], p, 0});
      }
      if (!legal) continue;

      double phase_max = 0.0;
      for (const Transfer& x : phase) {
        phase_max = std::max(
            phase_max, static_cast<double>(holding_[x.source].tuples()) *
                           width_ / bw_(x.source, x.destination));
      }
      if (cost_so_far + phase_max >= best_) continue;

      // Apply, recurse, undo.
      std::vector<KeyMultiset> saved;
      for (const Transfer& x : phase) {
        saved.push_back(holding_[x.destination]);
        holding_[x.destination] =
            holding_[x.destination].aggregated_union(holding_[x.source]);
      }
      std::vector<KeyMultiset> sent_data;
      for (const Transfer& x : phase) {
        sent_data.push_back(std::move(holding_[x.source]));
        holding_[x.source] = KeyMultiset();
        sent_[x.source] = true;
        --pending_children_[x.destination];
        --remaining_;
      }
      current_.phases.push_back(phase);
      search(cost_so_far + phase_max);
      current_.phases.pop_back();
      for (std::size_t i = phase.size(); i-- > 0;) {
        const Transfer& x = phase[i];
        holding_[x.source] = std::move(sent_data[i]);
        sent_[x.source] = false;
        ++pending_children_[x.destination];
        ++remaining_;
      }
      for (std::size_t i = phase.size(); i-- > 0;) {
        holding_[phase[i].destination] = std::move(saved[i]);
      }
    }
  }

  const BandwidthMatrix& bw_;
  const std::vector<NodeId>& parent_;
  double width_;
  double best_;
  bool found_ = false;
  std::size_t schedules_ = 0;
  std::size_t remaining_ = 0;
  std::vector<KeyMultiset> holding_;
  std::vector<std::size_t> pending_children_;
  std::vector<bool> sent_;
  AggregationPlan current_;
  AggregationPlan best_plan_;
};

bool reaches_root(const std::vector<NodeId>& parent, NodeId v, NodeId root) {
  for (std::size_t steps = 0; steps <= parent.size(); ++steps) {
    if (v == root) return true;
    v = parent[v];
    if (v == kNoParent) return false;
  }
  return false;
}

}  // namespace

OptimalTreeResult optimal_tree_plan(const AggregationState& state,
                                    const BandwidthMatrix& bw,
                                    std::size_t node_limit) {
  if (state.partition_count() != 1) {
    throw std::invalid_argument(
        "the tree oracle handles single-partition all-to-one aggregations");
  }
  if (state.node_count() > node_limit) {
    throw std::invalid_argument(
        "the tree oracle is limited to " + std::to_string(node_limit) +
        " nodes, got " + std::to_string(state.node_count()));
  }
  const std::size_t n = state.node_count();
  const NodeId root = state.destination(0);

  std::vector<NodeId> members;  // non-root nodes holding data
  for (NodeId v = 0; v < n; ++v) {
    if (v != root && !state.at(v, 0).empty()) members.push_back(v);
  }

  OptimalTreeResult result;
  result.tree.parent.assign(n, kNoParent);
  if (members.empty()) return result;

  // Candidate parents of each member, ascending: so the odometer below
  // visits parent maps in lexicographic order.
  std::vector<std::vector<NodeId>> choices;
  for (NodeId v : members) {
    std::vector<NodeId> c{root};
    for (NodeId u : members) {
      if (u != v) c.push_back(u);
    }
    std::sort(c.begin(), c.end());
    choices.push_back(std::move(c));
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> digit(members.size(), 0);
  std::vector<NodeId> parent(n, kNoParent);
  while (true) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      parent[members[i]] = choices[i][digit[i]];
    }
    bool tree = true;
    for (NodeId v : members) {
      if (!reaches_root(parent, v, root)) {
        tree = false;
        break;
      }
    }
    if (tree) {
      ++result.trees_examined;
      ScheduleSearch search(state, bw, parent, best);
      if (search.run()) {
        best = search.best_cost();
        result.tree.parent = parent;
        result.tree.schedule = search.best_schedule();
      }
      result.schedules_examined += search.schedules();
    }
    // Advance the odometer, last member fastest.
    std::size_t i = members.size();
    while (i > 0) {
      --i;
      if (++digit[i] < choices[i].size()) break;
      digit[i] = 0;
      if (i == 0) {
        result.cost = best;
        return result;
      }
    }
  }
}

}  // namespace aggsched
