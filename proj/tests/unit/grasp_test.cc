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
#include <limits>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "aggsched/baselines.h"
#include "aggsched/sketch.h"

namespace aggsched {
namespace {

AggregationState toy() {
  AggregationState s = AggregationState::all_to_one(4, 0);
  s.at(1, 0) = KeyMultiset::from_keys({1, 2, 3});
  s.at(2, 0) = KeyMultiset::from_keys({4, 5, 6});
  s.at(3, 0) = KeyMultiset::from_keys({4, 5, 6});
  return s;
}

BandwidthMatrix unit(std::size_t n) {
  return pairwise_bandwidth(make_uniform_star(n, 1.0));
}

AggregationState random_state(std::mt19937_64& rng, std::size_t n,
                              std::size_t parts, Key domain) {
  std::vector<NodeId> dest(parts);
  for (PartitionId l = 0; l < parts; ++l) dest[l] = static_cast<NodeId>(l % n);
  AggregationState s(n, dest);
  for (NodeId v = 0; v < n; ++v) {
    for (PartitionId l = 0; l < parts; ++l) {
      std::vector<Key> keys(rng() % 16);
      for (Key& k : keys) k = rng() % domain;
      s.at(v, l) = KeyMultiset::from_keys(keys);
    }
  }
  return preaggregate(s);
}

// Literal transcription of the phase-selection loop: the cost matrix is
// fixed for the phase, candidates are scanned for the cheapest entry whose
// sender is in V_send and V_l and whose receiver is in V_recv and V_l, and
// ties go to the lowest (l, t, s).
Phase reference_phase(SizeEstimator& sizes, const BandwidthMatrix& bw,
                      const std::vector<NodeId>& dest, double w) {
  const std::size_t n = sizes.node_count();
  const std::size_t parts = sizes.partition_count();
  std::vector<double> c(n * n * parts);
  for (PartitionId l = 0; l < parts; ++l) {
    for (NodeId s = 0; s < n; ++s) {
      for (NodeId t = 0; t < n; ++t) {
        c[(l * n + s) * n + t] = cost_entry(sizes, bw, dest, s, t, l, w);
      }
    }
  }
  std::set<NodeId> vsend;
  std::set<NodeId> vrecv;
  for (NodeId v = 0; v < n; ++v) {
    vsend.insert(v);
    vrecv.insert(v);
  }
  std::vector<std::set<NodeId>> vl(parts, vsend);
  Phase phase;
  while (!vsend.empty() && !vrecv.empty()) {
    double best = std::numeric_limits<double>::infinity();
    std::tuple<PartitionId, NodeId, NodeId> pick;
    for (PartitionId l = 0; l < parts; ++l) {
      for (NodeId t = 0; t < n; ++t) {
        for (NodeId s = 0; s < n; ++s) {
          if (!vsend.count(s) || !vrecv.count(t) || !vl[l].count(s) ||
              !vl[l].count(t)) {
            continue;
          }
          const double v = c[(l * n + s) * n + t];
          if (v < best) {
            best = v;
            pick = {l, t, s};
          }
        }
      }
    }
    if (best == std::numeric_limits<double>::infinity()) break;
    const auto [l, t, s] = pick;
    vsend.erase(s);
    vl[l].erase(s);
    vrecv.erase(t);
    vl[l].erase(t);
    phase.push_back({s, t, l});
    sizes.update(s, t, l);
  }
  return phase;
}

std::vector<NodeId> dests(const AggregationState& s) {
  return {s.destinations().begin(), s.destinations().end()};
}

TEST(CostEntryTest, ToyFirstPhaseValues) {
  const AggregationState s = toy();
  const ExactSizes sizes(s);
  const auto d = dests(s);
  const BandwidthMatrix bw = unit(4);
  EXPECT_EQ(cost_entry(sizes, bw, d, 2, 3, 0, 1.0), 6.0);
  EXPECT_EQ(cost_entry(sizes, bw, d, 1, 2, 0, 1.0), 9.0);
  EXPECT_EQ(cost_entry(sizes, bw, d, 1, 0, 0, 1.0), 3.0);
}

TEST(CostEntryTest, ForbiddenEntries) {
  AggregationState s = toy();
  s.at(2, 0) = KeyMultiset();
  const ExactSizes sizes(s);
  const auto d = dests(s);
  const BandwidthMatrix bw = unit(4);
  EXPECT_EQ(cost_entry(sizes, bw, d, 1, 1, 0, 1.0), kForbidden);  // s == t
  EXPECT_EQ(cost_entry(sizes, bw, d, 0, 1, 0, 1.0), kForbidden);  // s is M(l)
  EXPECT_EQ(cost_entry(sizes, bw, d, 2, 1, 0, 1.0), kForbidden);  // empty s
  EXPECT_EQ(cost_entry(sizes, bw, d, 1, 2, 0, 1.0), kForbidden);  // empty t
  EXPECT_EQ(cost_entry(sizes, bw, d, 1, 0, 0, 1.0), 3.0);  // empty M(l) is fine
}

TEST(CostEntryTest, UsesPairBandwidthAndTupleWidth) {
  const AggregationState s = toy();
  const ExactSizes sizes(s);
  BandwidthMatrix bw = unit(4);
  bw(2, 3) = 4.0;
  bw(1, 0) = 0.5;
  const auto d = dests(s);
  // (3 + 3) * w / 4 with w = 2.
  EXPECT_DOUBLE_EQ(cost_entry(sizes, bw, d, 2, 3, 0, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(cost_entry(sizes, bw, d, 1, 0, 0, 2.0), 12.0);
}

TEST(ExactSizesTest, TracksUnions) {
  ExactSizes sizes(toy());
  EXPECT_EQ(sizes.card(1, 0), 3.0);
  EXPECT_EQ(sizes.est_card(2, 3, 0), 3.0);
  EXPECT_EQ(sizes.est_card(1, 2, 0), 6.0);
  sizes.update(1, 2, 0);
  EXPECT_EQ(sizes.card(1, 0), 0.0);
  EXPECT_EQ(sizes.card(2, 0), 6.0);
}

TEST(SelectPhaseTest, ToyFirstPhase) {
  const AggregationState s = toy();
  ExactSizes sizes(s);
  EXPECT_EQ(select_phase(sizes, unit(4), dests(s), 1.0),
            (Phase{{1, 0, 0}, {3, 2, 0}}));
}

TEST(SelectPhaseTest, MatchesReferenceLoop) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    const std::size_t parts = 1 + rng() % 4;
    const AggregationState s = random_state(rng, n, parts, 24);
    BandwidthMatrix bw(n, 0.0);
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = 0; b < n; ++b) {
        if (a != b) bw(a, b) = static_cast<double>(1 + rng() % 3);
      }
    }
    ExactSizes mine(s);
    ExactSizes ref(s);
    for (int phase = 0; phase < 40 && has_pending_data(mine, dests(s)); ++phase) {
      const Phase got = select_phase(mine, bw, dests(s), 1.0);
      const Phase want = reference_phase(ref, bw, dests(s), 1.0);
      ASSERT_EQ(got, want) << "trial " << trial << " phase " << phase;
    }
  }
}

TEST(PlanGraspTest, ToyPlanInExactMode) {
  const AggregationState s = toy();
  const AggregationPlan p = plan_grasp(s, unit(4), GraspMode::kExact);
  EXPECT_EQ(p.phases, (std::vector<Phase>{{{1, 0, 0}, {3, 2, 0}}, {{2, 0, 0}}}));
  EXPECT_EQ(plan_cost(s, p, unit(4)).total, 6.0);
}

TEST(PlanGraspTest, EstimatesModeFindsToyPlanToo) {
  const AggregationState s = toy();
  const AggregationPlan p =
      plan_grasp(s, unit(4), GraspMode::kEstimates, HashFamily(100, 5));
  EXPECT_EQ(plan_cost(s, p, unit(4)).total, 6.0);
}

TEST(PlanGraspTest, PlansAreValidAndBounded) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    const std::size_t parts = 1 + rng() % 5;
    const AggregationState s = random_state(rng, n, parts, 40);
    const BandwidthMatrix bw = unit(n);
    for (GraspMode mode : {GraspMode::kExact, GraspMode::kEstimates}) {
      const AggregationPlan p = plan_grasp(s, bw, mode, HashFamily(32, trial));
      EXPECT_TRUE(validate_plan(s, p).empty()) << "trial " << trial;
      EXPECT_LE(p.phases.size(), n * parts);
      for (const Phase& phase : p.phases) EXPECT_FALSE(phase.empty());
    }
  }
}

TEST(PlanGraspTest, FinishedStateNeedsNoPhases) {
  AggregationState s = AggregationState::all_to_one(3, 1);
  s.at(1, 0) = KeyMultiset::from_keys({1, 2});
  EXPECT_TRUE(plan_grasp(s, unit(3), GraspMode::kExact).empty());
}

TEST(PlanGraspTest, AvoidsSlowLinks) {
  // v1 and v2 hold the same keys; v2 -> v0 is very slow and v2 -> v1 fast,
  // so v2 hands its data to v1 instead of shipping it to the destination.
  AggregationState s = AggregationState::all_to_one(3, 0);
  s.at(1, 0) = KeyMultiset::from_keys({1, 2, 3, 4});
  s.at(2, 0) = KeyMultiset::from_keys({1, 2, 3, 4});
  BandwidthMatrix bw = unit(3);
  bw(2, 0) = 0.01;
  bw(2, 1) = 4.0;
  const AggregationPlan p = plan_grasp(s, bw, GraspMode::kExact);
  for (const Phase& phase : p.phases) {
    for (const Transfer& x : phase) EXPECT_FALSE(x.source == 2 && x.destination == 0);
  }
  EXPECT_DOUBLE_EQ(plan_cost(s, p, bw).total, 5.0);
}

TEST(PlanGraspTest, GreedyCanLoseToRepartition) {
  // The cheapest first move pairs the two large disjoint holdings, whose
  // merge then has to cross the destination's link in one piece.
  AggregationState s = AggregationState::all_to_one(4, 0);
  std::vector<Key> a(10);
  std::vector<Key> b(10);
  for (Key i = 0; i < 10; ++i) {
    a[i] = 100 + i;
    b[i] = 200 + i;
  }
  s.at(1, 0) = KeyMultiset::from_keys({1});
  s.at(2, 0) = KeyMultiset::from_keys(a);
  s.at(3, 0) = KeyMultiset::from_keys(b);
  const BandwidthMatrix bw = unit(4);
  EXPECT_EQ(plan_cost(s, plan_grasp(s, bw, GraspMode::kExact), bw).total, 30.0);
  EXPECT_EQ(plan_cost(s, plan_repartition(s), bw).total, 21.0);
}

TEST(PlanGraspTest, AllToAllDeliversEveryPartition) {
  std::mt19937_64 rng(5);
  const AggregationState s = random_state(rng, 6, 6, 50);
  const AggregationPlan p = plan_grasp(s, unit(6), GraspMode::kExact);
  const PlanCost c = plan_cost(s, p, unit(6), {.check_conservation = true});
  EXPECT_TRUE(is_complete(c.final_state));
  for (PartitionId l = 0; l < 6; ++l) {
    EXPECT_EQ(c.final_state.at(s.destination(l), l), partition_keys(s, l));
  }
}

}  // namespace
}  // namespace aggsched
