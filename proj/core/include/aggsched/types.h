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

#ifndef AGGSCHED_TYPES_H_
#define AGGSCHED_TYPES_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace aggsched {

using NodeId = std::uint32_t;
using PartitionId = std::uint32_t;
using Key = std::uint64_t;

// One network transfer: `source` ships its whole holding of `partition` to
// `destination`.
struct Transfer {
  NodeId source = 0;
  NodeId destination = 0;
  PartitionId partition = 0;

  auto operator<=>(const Transfer&) const = default;
};

// Transfers that run concurrently.
using Phase = std::vector<Transfer>;

// Phases run in order; each starts when the previous one has finished.
struct AggregationPlan {
  std::vector<Phase> phases;

  bool empty() const { return phases.empty(); }
  std::size_t transfer_count() const {
    std::size_t n = 0;
    for (const auto& p : phases) n += p.size();
    return n;
  }
  bool operator==(const AggregationPlan&) const = default;
};

}  // namespace aggsched

#endif  // AGGSCHED_TYPES_H_
