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

#include "aggsched/topology.h"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace aggsched {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

// Uniform double in [0, 1) from the top 53 bits; std::uniform_real_distribution
// is not reproducible across standard libraries.
double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Topology::Topology(std::vector<double> uplink_bw, std::vector<double> downlink_bw)
    : uplink_(std::move(uplink_bw)), downlink_(std::move(downlink_bw)) {
  if (uplink_.size() != downlink_.size()) {
    throw std::invalid_argument("uplink and downlink lists differ in length");
  }
  if (uplink_.size() < 2) {
    throw std::invalid_argument("a topology needs at least 2 nodes");
  }
  for (double b : uplink_) require_positive(b, "uplink bandwidth");
  for (double b : downlink_) require_positive(b, "downlink bandwidth");
}

Topology make_uniform_star(std::size_t n, double link_bw) {
  require_positive(link_bw, "link bandwidth");
  if (n < 2) throw std::invalid_argument("a topology needs at least 2 nodes");
  return Topology(std::vector<double>(n, link_bw), std::vector<double>(n, link_bw));
}

BandwidthMatrix::BandwidthMatrix(std::size_t n, double fill)
    : n_(n), bw_(n * n, fill) {
  for (std::size_t v = 0; v < n; ++v) bw_[v * n + v] = 0.0;
}

std::size_t BandwidthMatrix::index(NodeId s, NodeId t) const {
  if (s >= n_ || t >= n_) throw std::out_of_range("node id out of range");
  return static_cast<std::size_t>(s) * n_ + t;
}

void BandwidthMatrix::check_positive() const {
  for (NodeId s = 0; s < n_; ++s) {
    for (NodeId t = 0; t < n_; ++t) {
      if (s != t && !((*this)(s, t) > 0.0)) {
        throw std::invalid_argument("bandwidth B(" + std::to_string(s) + "->" +
                                    std::to_string(t) + ") is not positive");
      }
    }
  }
}

BandwidthMatrix pairwise_bandwidth(const Topology& top,
                                   std::span<const std::uint32_t> groups,
                                   double intra_factor) {
  const std::size_t n = top.node_count();
  if (groups.size() != n) {
    throw std::invalid_argument("every node needs a locality group");
  }
  if (!(intra_factor >= 1.0)) {
    throw std::invalid_argument("intra-group factor must be >= 1");
  }
  BandwidthMatrix bw(n);
  for (NodeId s = 0; s < n; ++s) {
    for (NodeId t = 0; t < n; ++t) {
      if (s == t) continue;
      double b = std::min(top.uplink_bw(s), top.downlink_bw(t));
      if (groups[s] == groups[t]) b *= intra_factor;
      bw(s, t) = b;
    }
  }
  return bw;
}

BandwidthMatrix pairwise_bandwidth(const Topology& top) {
  std::vector<std::uint32_t> groups(top.node_count());
  for (std::size_t v = 0; v < groups.size(); ++v) {
    groups[v] = static_cast<std::uint32_t>(v);
  }
  return pairwise_bandwidth(top, groups, 1.0);
}

BandwidthMatrix simulate_benchmark(const BandwidthMatrix& true_bw,
                                   const BenchmarkNoise& noise,
                                   std::uint64_t seed) {
  if (!(noise.percent >= 0.0 && noise.percent < 100.0)) {
    throw std::invalid_argument("noise percentage must be in [0, 100)");
  }
  BandwidthMatrix measured = true_bw;
  const std::size_t n = true_bw.node_count();
  const double keep = 1.0 - noise.percent / 100.0;
  switch (noise.kind) {
    case BenchmarkNoise::Kind::kNone:
      break;
    case BenchmarkNoise::Kind::kUnderestimate:
      for (NodeId s = 0; s < n; ++s) {
        for (NodeId t = 0; t < n; ++t) {
          if (s != t) measured(s, t) = true_bw(s, t) * keep;
        }
      }
      break;
    case BenchmarkNoise::Kind::kPerEntry: {
      std::mt19937_64 rng(seed);
      const double width = noise.percent / 100.0;
      for (NodeId s = 0; s < n; ++s) {
        for (NodeId t = 0; t < n; ++t) {
          if (s == t) continue;
          if (noise.symmetric && t < s) continue;
          // Factor in [keep, 1]; never below keep > 0.
          const double factor = 1.0 - width * unit_interval(rng);
          measured(s, t) = true_bw(s, t) * factor;
          if (noise.symmetric) measured(t, s) = true_bw(t, s) * factor;
        }
      }
      break;
    }
  }
  return measured;
}

double effective_bandwidth(const Topology& top, std::span<const Transfer> phase,
                           NodeId s, NodeId t) {
  std::size_t out_degree = 0;
  std::size_t in_degree = 0;
  bool found = false;
  for (const Transfer& x : phase) {
    if (x.source == s) ++out_degree;
    if (x.destination == t) ++in_degree;
    if (x.source == s && x.destination == t) found = true;
  }
  if (!found) {
    throw std::invalid_argument("transfer " + std::to_string(s) + "->" +
                                std::to_string(t) + " is not in the phase");
  }
  return std::min(top.uplink_bw(s) / static_cast<double>(out_degree),
                  top.downlink_bw(t) / static_cast<double>(in_degree));
}

}  // namespace aggsched
