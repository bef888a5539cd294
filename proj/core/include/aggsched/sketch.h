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

#ifndef AGGSCHED_SKETCH_H_
#define AGGSCHED_SKETCH_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "aggsched/types.h"

namespace aggsched {

class AggregationState;

// Family of universal hash functions h_j(x) = (a_j * x + b_j) mod p.
class HashFamily {
 public:
  struct Params {
    std::uint64_t a;
    std::uint64_t b;
  };

  static constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;
  static constexpr std::size_t kDefaultSize = 100;

  // `n` functions over p = 2^61 - 1 with parameters drawn from `seed`.
  explicit HashFamily(std::size_t n = kDefaultSize, std::uint64_t seed = 0);
  // Explicit parameters, e.g. for small worked examples. Requires
  // 2 <= modulus <= 2^61 - 1 and a_j != 0 (mod modulus).
  HashFamily(std::vector<Params> params, std::uint64_t modulus);

  std::size_t size() const { return params_.size(); }
  std::uint64_t modulus() const { return modulus_; }
  std::span<const Params> params() const { return params_; }

  std::uint64_t hash(std::size_t j, Key x) const;

 private:
  std::vector<Params> params_;
  std::uint64_t modulus_;
};

// Per-function minima over a key set. The empty set maps every slot to
// kEmpty, which is larger than any hash output.
class MinhashSignature {
 public:
  static constexpr std::uint64_t kEmpty =
      std::numeric_limits<std::uint64_t>::max();

  MinhashSignature() = default;
  static MinhashSignature empty(std::size_t n);

  std::size_t size() const { return values_.size(); }
  bool is_empty() const;
  std::uint64_t operator[](std::size_t j) const { return values_[j]; }
  std::span<const std::uint64_t> values() const { return values_; }

  bool operator==(const MinhashSignature&) const = default;

 private:
  friend MinhashSignature signature(std::span<const Key>, const HashFamily&);
  friend MinhashSignature merge(const MinhashSignature&,
                                const MinhashSignature&);
  explicit MinhashSignature(std::vector<std::uint64_t> values)
      : values_(std::move(values)) {}

  std::vector<std::uint64_t> values_;
};

MinhashSignature signature(std::span<const Key> keys, const HashFamily& fam);

// Signature of the union. Throws std::invalid_argument on length mismatch.
MinhashSignature merge(const MinhashSignature& a, const MinhashSignature& b);

// Fraction of slots where the signatures agree. Throws DegenerateInputError
// when either signature is all-empty.
double est_jaccard(const MinhashSignature& a, const MinhashSignature& b);

// What the planner knows about partition sizes: a cardinality per
// (node, partition), an estimate of the size of a union, and how both change
// after a transfer.
class SizeEstimator {
 public:
  virtual ~SizeEstimator() = default;

  virtual std::size_t node_count() const = 0;
  virtual std::size_t partition_count() const = 0;
  virtual double card(NodeId v, PartitionId l) const = 0;
  // Estimated |X(s, l) u X(t, l)|.
  virtual double est_card(NodeId s, NodeId t, PartitionId l) const = 0;
  // Bookkeeping after s ships partition l to t.
  virtual void update(NodeId s, NodeId t, PartitionId l) = 0;
};

// Card/MinH arrays maintained by the coordinator from minhash signatures.
// card(v, l) == 0 exactly when minh(v, l) is all-empty.
class SketchState final : public SizeEstimator {
 public:
  SketchState(std::size_t node_count, std::size_t partition_count,
              std::size_t signature_size);
  // Cardinalities are distinct key counts; signatures are taken once here.
  SketchState(const AggregationState& state, const HashFamily& fam);

  std::size_t node_count() const override { return nodes_; }
  std::size_t partition_count() const override { return partitions_; }
  double card(NodeId v, PartitionId l) const override;
  const MinhashSignature& minh(NodeId v, PartitionId l) const;

  void set(NodeId v, PartitionId l, double card, MinhashSignature sig);

  // (card(s) + card(t)) / (1 + J_est). Throws DegenerateInputError if both
  // sides are empty.
  double est_card(NodeId s, NodeId t, PartitionId l) const override;
  void update(NodeId s, NodeId t, PartitionId l) override;

 private:
  std::size_t index(NodeId v, PartitionId l) const;

  std::size_t nodes_;
  std::size_t partitions_;
  std::size_t sig_size_;
  std::vector<double> card_;
  std::vector<MinhashSignature> minh_;
};

}  // namespace aggsched

#endif  // AGGSCHED_SKETCH_H_
