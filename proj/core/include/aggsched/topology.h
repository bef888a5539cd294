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

#ifndef AGGSCHED_TOPOLOGY_H_
#define AGGSCHED_TOPOLOGY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aggsched/types.h"

namespace aggsched {

// A star network: every compute node hangs off a single hub through one
// uplink (node -> hub) and one downlink (hub -> node). Bandwidths are bytes
// per abstract time unit.
class Topology {
 public:
  Topology(std::vector<double> uplink_bw, std::vector<double> downlink_bw);

  std::size_t node_count() const { return uplink_.size(); }
  double uplink_bw(NodeId v) const { return uplink_.at(v); }
  double downlink_bw(NodeId v) const { return downlink_.at(v); }

 private:
  std::vector<double> uplink_;
  std::vector<double> downlink_;
};

Topology make_uniform_star(std::size_t n, double link_bw);

// Dense sender x receiver matrix of available bandwidth B(s -> t). The
// diagonal is never read and is stored as zero.
class BandwidthMatrix {
 public:
  BandwidthMatrix() = default;
  explicit BandwidthMatrix(std::size_t n, double fill = 0.0);

  std::size_t node_count() const { return n_; }

  double operator()(NodeId s, NodeId t) const { return bw_[index(s, t)]; }
  double& operator()(NodeId s, NodeId t) { return bw_[index(s, t)]; }

  // Throws std::invalid_argument if any off-diagonal entry is not > 0.
  void check_positive() const;

  bool operator==(const BandwidthMatrix&) const = default;

 private:
  std::size_t index(NodeId s, NodeId t) const;

  std::size_t n_ = 0;
  std::vector<double> bw_;
};

// bw(s, t) = min(uplink(s), downlink(t)), scaled by `intra_factor` when s
// and t share a locality group (fragments co-located on one machine).
// `groups[v]` is the group id of node v.
BandwidthMatrix pairwise_bandwidth(const Topology& top,
                                   std::span<const std::uint32_t> groups,
                                   double intra_factor);

// Every node in its own group.
BandwidthMatrix pairwise_bandwidth(const Topology& top);

struct BenchmarkNoise {
  enum class Kind { kNone, kUnderestimate, kPerEntry };

  Kind kind = Kind::kNone;
  // Percentage in [0, 100).
  double percent = 0.0;
  // Per-entry noise draws one factor per unordered pair when set.
  bool symmetric = true;

  static BenchmarkNoise none() { return {}; }
  static BenchmarkNoise underestimate(double p) {
    return {Kind::kUnderestimate, p, true};
  }
  static BenchmarkNoise per_entry(double p, bool symmetric = true) {
    return {Kind::kPerEntry, p, symmetric};
  }
};

// The matrix a pairwise throughput benchmark would report. Underestimation
// scales every entry by exactly (1 - p/100); per-entry noise scales each
// entry by an independent factor in [1 - p/100, 1]. Deterministic in `seed`.
BandwidthMatrix simulate_benchmark(const BandwidthMatrix& true_bw,
                                   const BenchmarkNoise& noise,
                                   std::uint64_t seed);

// Bandwidth left for s -> t when the links are shared by every transfer in
// `phase`: min(uplink(s) / d_out(s), downlink(t) / d_in(t)).
double effective_bandwidth(const Topology& top, std::span<const Transfer> phase,
                           NodeId s, NodeId t);

}  // namespace aggsched

#endif  // AGGSCHED_TOPOLOGY_H_
