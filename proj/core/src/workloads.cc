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

#include "aggsched/workloads.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace aggsched {
namespace {

double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void check_common(const WorkloadSpec& spec) {
  require(spec.node_count >= 2, "workload needs at least 2 nodes");
  require(spec.tuples_per_node > 0, "tuples_per_node must be positive");
  require(spec.tuple_width > 0.0, "tuple width must be positive");
}

// Places each fragment's keys into partitions with `key mod partitions`.
AggregationState build_state(const WorkloadSpec& spec,
                             const std::vector<std::vector<Key>>& fragments) {
  AggregationState state(spec.node_count, mapping_destinations(spec),
                         spec.tuple_width);
  const std::size_t partitions = state.partition_count();
  for (NodeId v = 0; v < fragments.size(); ++v) {
    std::vector<std::vector<Key>> split(partitions);
    for (Key k : fragments[v]) split[k % partitions].push_back(k);
    for (PartitionId l = 0; l < partitions; ++l) {
      state.at(v, l) = KeyMultiset::from_keys(std::move(split[l]));
    }
  }
  return state;
}

// One partition per node; partition j owns keys with
// bounds[j] <= key < bounds[j + 1].
AggregationState build_range_state(const WorkloadSpec& spec,
                                   const std::vector<std::vector<Key>>& fragments,
                                   const std::vector<Key>& bounds) {
  std::vector<NodeId> destinations(spec.node_count);
  for (NodeId j = 0; j < spec.node_count; ++j) destinations[j] = j;
  AggregationState state(spec.node_count, destinations, spec.tuple_width);
  for (NodeId v = 0; v < fragments.size(); ++v) {
    std::vector<std::vector<Key>> split(spec.node_count);
    for (Key k : fragments[v]) {
      auto it = std::upper_bound(bounds.begin(), bounds.end(), k);
      const auto j = static_cast<std::size_t>(it - bounds.begin()) - 1;
      split[std::min(j, spec.node_count - 1)].push_back(k);
    }
    for (PartitionId l = 0; l < spec.node_count; ++l) {
      state.at(v, l) = KeyMultiset::from_keys(std::move(split[l]));
    }
  }
  return state;
}

std::vector<std::vector<Key>> overlapping_ranges(std::size_t nodes,
                                                 std::size_t keys,
                                                 double jaccard,
                                                 std::size_t repeat) {
  const std::size_t overlap = range_overlap_keys(keys, jaccard);
  const std::size_t stride = keys - overlap;
  std::vector<std::vector<Key>> fragments(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    fragments[i].reserve(keys * repeat);
    const Key first = 1 + i * stride;
    for (std::size_t r = 0; r < repeat; ++r) {
      for (Key k = first; k < first + keys; ++k) fragments[i].push_back(k);
    }
  }
  return fragments;
}

}  // namespace

std::vector<NodeId> mapping_destinations(const WorkloadSpec& spec) {
  if (spec.mapping == MappingKind::kAllToOne) return {0};
  const std::size_t partitions =
      spec.partition_count == 0 ? spec.node_count : spec.partition_count;
  std::vector<NodeId> out(partitions);
  for (std::size_t l = 0; l < partitions; ++l) {
    out[l] = static_cast<NodeId>(l % spec.node_count);
  }
  return out;
}

std::size_t range_overlap_keys(std::size_t keys_per_fragment, double jaccard) {
  require(jaccard >= 0.0 && jaccard <= 1.0, "jaccard must be in [0, 1]");
  require(keys_per_fragment > 0, "fragments need at least one key");
  const double k = static_cast<double>(keys_per_fragment);
  const auto o = static_cast<std::size_t>(std::llround(2.0 * k * jaccard /
                                                       (1.0 + jaccard)));
  return std::min(o, keys_per_fragment);
}

AggregationState gen_range_overlap(const WorkloadSpec& spec) {
  check_common(spec);
  return build_state(spec, overlapping_ranges(spec.node_count,
                                              spec.tuples_per_node,
                                              spec.jaccard, 1));
}

AggregationState gen_duplicates(const WorkloadSpec& spec) {
  check_common(spec);
  require(spec.dup_factor >= 1, "dup_factor must be >= 1");
  require(spec.tuples_per_node % spec.dup_factor == 0,
          "dup_factor must divide tuples_per_node");
  return build_state(
      spec, overlapping_ranges(spec.node_count,
                               spec.tuples_per_node / spec.dup_factor,
                               spec.jaccard, spec.dup_factor));
}

double ImbalanceSplit::level() const {
  if (other_keys == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(fragment0_keys) / static_cast<double>(other_keys);
}

ImbalanceSplit imbalance_split(std::size_t total_keys, std::size_t node_count,
                               std::size_t fragment0_share) {
  require(node_count >= 2, "imbalance needs at least 2 nodes");
  require(fragment0_share <= total_keys,
          "fragment 0 share exceeds the key domain");
  const std::size_t rest = total_keys - fragment0_share;
  require(rest % (node_count - 1) == 0,
          "the remaining " + std::to_string(rest) + " keys do not split evenly over " +
              std::to_string(node_count - 1) + " fragments");
  return {fragment0_share, rest / (node_count - 1)};
}

std::size_t imbalance_share_for_level(std::size_t total_keys,
                                      std::size_t node_count, double level) {
  require(node_count >= 2, "imbalance needs at least 2 nodes");
  require(level > 0.0, "imbalance level must be positive");
  // n + (nodes - 1) * m = total with the largest m such that n >= l * m.
  const std::size_t others = node_count - 1;
  const auto m = static_cast<std::size_t>(std::floor(
      static_cast<double>(total_keys) / (level + static_cast<double>(others))));
  require(m > 0, "imbalance level too high for the key domain");
  return total_keys - others * m;
}

AggregationState gen_imbalance(const WorkloadSpec& spec) {
  check_common(spec);
  const ImbalanceSplit split =
      imbalance_split(spec.total_keys, spec.node_count, spec.fragment0_share);
  require(spec.total_keys > 0, "total_keys must be positive");

  std::vector<Key> bounds{1};
  bounds.push_back(1 + split.fragment0_keys);
  for (std::size_t j = 1; j + 1 < spec.node_count; ++j) {
    bounds.push_back(bounds.back() + split.other_keys);
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<Key>> fragments(spec.node_count);
  for (auto& f : fragments) {
    f.reserve(spec.tuples_per_node);
    for (std::size_t i = 0; i < spec.tuples_per_node; ++i) {
      f.push_back(1 + rng() % spec.total_keys);
    }
  }
  return build_range_state(spec, fragments, bounds);
}

ZipfSampler::ZipfSampler(std::size_t domain, double theta) {
  require(domain > 0, "zipf domain must be positive");
  require(theta >= 0.0, "zipf exponent must be >= 0");
  cdf_.resize(domain);
  double sum = 0.0;
  for (std::size_t r = 1; r <= domain; ++r) {
    sum += std::pow(static_cast<double>(r), -theta);
    cdf_[r - 1] = sum;
  }
  for (double& c : cdf_) c /= sum;
  cdf_.back() = 1.0;
}

Key ZipfSampler::sample(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<Key>(it - cdf_.begin()) + 1;
}

AggregationState gen_zipf_skew(const WorkloadSpec& spec) {
  check_common(spec);
  require(spec.domain >= spec.node_count,
          "zipf domain must have at least one key per fragment");
  const ZipfSampler sampler(spec.domain, spec.zipf_theta);

  std::vector<Key> bounds;
  for (std::size_t j = 0; j < spec.node_count; ++j) {
    bounds.push_back(1 + j * spec.domain / spec.node_count);
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<Key>> fragments(spec.node_count);
  for (auto& f : fragments) {
    f.reserve(spec.tuples_per_node);
    for (std::size_t i = 0; i < spec.tuples_per_node; ++i) {
      f.push_back(sampler.sample(unit_interval(rng)));
    }
  }
  return build_range_state(spec, fragments, bounds);
}

Key hash_key_token(std::string_view token) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : token) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Key parse_key_token(std::string_view token) {
  Key value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc() && ptr == last && !token.empty()) return value;
  return hash_key_token(token);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<Key> read_keys_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open key file");
  std::vector<Key> keys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view token = trim(line);
    if (token.empty() || token.front() == '#') continue;
    if (token.find_first_of(" \t") != std::string_view::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected one key per line, got '" +
                               std::string(token) + "'");
    }
    keys.push_back(parse_key_token(token));
  }
  if (in.bad()) {
    throw std::runtime_error(path.string() + ": read error");
  }
  return keys;
}

}  // namespace

AggregationState load_keys_files(const std::vector<std::filesystem::path>& paths,
                                 std::size_t node_count,
                                 std::vector<NodeId> destinations,
                                 double tuple_width, PartitionFn partition_of) {
  AggregationState state(node_count, std::move(destinations), tuple_width);
  const std::size_t partitions = state.partition_count();
  if (!partition_of) {
    partition_of = [partitions](Key k) {
      return static_cast<PartitionId>(k % partitions);
    };
  }
  std::vector<std::vector<std::vector<Key>>> split(
      node_count, std::vector<std::vector<Key>>(partitions));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto& fragment = split[i % node_count];
    for (Key k : read_keys_file(paths[i])) {
      const PartitionId l = partition_of(k);
      if (l >= partitions) {
        throw std::runtime_error("partition function returned " +
                                 std::to_string(l) + " for " +
                                 std::to_string(partitions) + " partitions");
      }
      fragment[l].push_back(k);
    }
  }
  for (NodeId v = 0; v < node_count; ++v) {
    for (PartitionId l = 0; l < partitions; ++l) {
      state.at(v, l) = KeyMultiset::from_keys(std::move(split[v][l]));
    }
  }
  return state;
}

AggregationState generate_workload(const WorkloadSpec& spec) {
  switch (spec.kind) {
    case WorkloadKind::kRangeOverlap:
      return gen_range_overlap(spec);
    case WorkloadKind::kDuplicates:
      return gen_duplicates(spec);
    case WorkloadKind::kImbalance:
      return gen_imbalance(spec);
    case WorkloadKind::kZipfSkew:
      return gen_zipf_skew(spec);
    case WorkloadKind::kFile:
      require(!spec.files.empty(), "file workload needs at least one file");
      return load_keys_files(spec.files, spec.node_count,
                             mapping_destinations(spec), spec.tuple_width);
    case WorkloadKind::kInline: {
      require(spec.inline_keys.size() <= spec.node_count,
              "more inline fragments than nodes");
      std::vector<std::vector<Key>> fragments(spec.node_count);
      for (std::size_t v = 0; v < spec.inline_keys.size(); ++v) {
        for (const std::string& t : spec.inline_keys[v]) {
          fragments[v].push_back(parse_key_token(t));
        }
      }
      return build_state(spec, fragments);
    }
  }
  throw std::invalid_argument("unknown workload kind");
}

std::string_view to_string(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kRangeOverlap: return "range_overlap";
    case WorkloadKind::kDuplicates: return "duplicates";
    case WorkloadKind::kImbalance: return "imbalance";
    case WorkloadKind::kZipfSkew: return "zipf_skew";
    case WorkloadKind::kFile: return "file";
    case WorkloadKind::kInline: return "inline";
  }
  return "unknown";
}

WorkloadKind workload_kind_from_string(std::string_view s) {
  for (auto k : {WorkloadKind::kRangeOverlap, WorkloadKind::kDuplicates,
                 WorkloadKind::kImbalance, WorkloadKind::kZipfSkew,
                 WorkloadKind::kFile, WorkloadKind::kInline}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown workload kind '" + std::string(s) + "'");
}

}  // namespace aggsched
