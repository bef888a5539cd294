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

#ifndef AGGSCHED_WORKLOADS_H_
#define AGGSCHED_WORKLOADS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "aggsched/model.h"
#include "aggsched/types.h"

namespace aggsched {

enum class WorkloadKind {
  kRangeOverlap,
  kDuplicates,
  kImbalance,
  kZipfSkew,
  kFile,
  kInline,
};

enum class MappingKind {
  // One partition, destination node 0.
  kAllToOne,
  // node_count partitions, partition l aggregated at node l.
  kAllToAll,
};

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kRangeOverlap;
  std::size_t node_count = 8;
  std::size_t tuples_per_node = 64000;
  MappingKind mapping = MappingKind::kAllToOne;
  // All-to-all only: 0 means one partition per node. Partition l is
  // aggregated at node l mod node_count; keys go to partition key mod count.
  // imbalance and zipf_skew always use one range partition per node.
  std::size_t partition_count = 0;
  double tuple_width = 1.0;
  std::uint64_t seed = 1;

  // range_overlap, duplicates: Jaccard similarity of adjacent fragments.
  double jaccard = 0.0;
  // duplicates: tuples per distinct key.
  std::size_t dup_factor = 1;
  // imbalance: key domain [1, total_keys]; partition 0 owns the first
  // `fragment0_share` keys, the others split the rest evenly.
  std::size_t total_keys = 128000;
  std::size_t fragment0_share = 16000;
  // zipf_skew: exponent and key domain [1, domain].
  double zipf_theta = 0.0;
  std::size_t domain = 128000;
  // file: key files, assigned to fragments round-robin.
  std::vector<std::filesystem::path> files;
  // inline: one token list per fragment.
  std::vector<std::vector<std::string>> inline_keys;
};

// Fragment i holds the consecutive keys [1 + i*(k - o), i*(k - o) + k] where
// k = tuples_per_node and the overlap o = round(2kJ / (1 + J)), so adjacent
// fragments have Jaccard similarity o / (2k - o).
AggregationState gen_range_overlap(const WorkloadSpec& spec);

// Overlap of adjacent fragments used by gen_range_overlap.
std::size_t range_overlap_keys(std::size_t keys_per_fragment, double jaccard);

// tuples_per_node / dup_factor distinct keys per fragment, laid out like
// gen_range_overlap, each repeated dup_factor times.
AggregationState gen_duplicates(const WorkloadSpec& spec);

// Every fragment draws tuples_per_node keys uniformly from [1, total_keys].
// Partition 0 owns keys [1, n] and each other partition an equal range of
// m = (total_keys - n) / (node_count - 1) keys.
AggregationState gen_imbalance(const WorkloadSpec& spec);

struct ImbalanceSplit {
  std::size_t fragment0_keys;  // n
  std::size_t other_keys;      // m
  // n / m; infinity when m == 0.
  double level() const;
};

ImbalanceSplit imbalance_split(std::size_t total_keys, std::size_t node_count,
                               std::size_t fragment0_share);

// Share n of the split with the largest m whose level n/m is at least
// `level`; the level is exact when total_keys allows it.
std::size_t imbalance_share_for_level(std::size_t total_keys,
                                      std::size_t node_count, double level);

// Every fragment draws tuples_per_node keys from Zipf(theta) over
// [1, domain], key 1 being the most popular. Partition j owns the j-th of
// node_count equal-width key ranges and is aggregated at node j.
AggregationState gen_zipf_skew(const WorkloadSpec& spec);

// Inverse-CDF sampler over ranks [1, domain] with P(r) ~ r^-theta.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t domain, double theta);
  // `u` in [0, 1).
  Key sample(double u) const;

 private:
  std::vector<double> cdf_;
};

using PartitionFn = std::function<PartitionId(Key)>;

// 64-bit FNV-1a of the token bytes.
Key hash_key_token(std::string_view token);

// Integer tokens are taken as-is, anything else is hashed.
Key parse_key_token(std::string_view token);

// File i is loaded into fragment i mod node_count. One key per line; blank
// lines and lines starting with '#' are skipped. Throws std::runtime_error
// with path and line number for unreadable files or malformed lines.
// `partition_of` defaults to key mod destinations.size().
AggregationState load_keys_files(
    const std::vector<std::filesystem::path>& paths, std::size_t node_count,
    std::vector<NodeId> destinations, double tuple_width = 1.0,
    PartitionFn partition_of = {});

// Destinations implied by spec.mapping and spec.partition_count.
std::vector<NodeId> mapping_destinations(const WorkloadSpec& spec);

// Dispatches on spec.kind.
AggregationState generate_workload(const WorkloadSpec& spec);

std::string_view to_string(WorkloadKind kind);
WorkloadKind workload_kind_from_string(std::string_view s);

}  // namespace aggsched

#endif  // AGGSCHED_WORKLOADS_H_
