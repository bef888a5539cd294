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

#include "aggsched/sketch.h"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "aggsched/error.h"
#include "aggsched/model.h"

namespace aggsched {
namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

// (a * x + b) mod 2^61 - 1 for a, b, x < 2^61, without a 128-bit division.
std::uint64_t affine_mersenne61(std::uint64_t a, std::uint64_t x,
                                std::uint64_t b) {
  constexpr std::uint64_t p = HashFamily::kMersenne61;
  const u128 prod = static_cast<u128>(a) * x;
  std::uint64_t r = (static_cast<std::uint64_t>(prod) & p) +
                    static_cast<std::uint64_t>(prod >> 61);
  r = (r & p) + (r >> 61);
  r += b;
  r = (r & p) + (r >> 61);
  return r >= p ? r - p : r;
}

}  // namespace

HashFamily::HashFamily(std::size_t n, std::uint64_t seed)
    : modulus_(kMersenne61) {
  if (n == 0) throw std::invalid_argument("hash family needs n >= 1");
  std::mt19937_64 rng(seed);
  params_.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::uint64_t a = 0;
    while (a == 0) a = rng() % modulus_;
    const std::uint64_t b = rng() % modulus_;
    params_.push_back({a, b});
  }
}

HashFamily::HashFamily(std::vector<Params> params, std::uint64_t modulus)
    : params_(std::move(params)), modulus_(modulus) {
  if (params_.empty()) throw std::invalid_argument("hash family needs n >= 1");
  if (modulus_ < 2 || modulus_ > kMersenne61) {
    throw std::invalid_argument("hash modulus must be in [2, 2^61 - 1]");
  }
  for (const Params& p : params_) {
    if (p.a % modulus_ == 0) {
      throw std::invalid_argument("hash multiplier must be nonzero mod p");
    }
  }
}

std::uint64_t HashFamily::hash(std::size_t j, Key x) const {
  const Params& p = params_[j];
  if (modulus_ == kMersenne61) {
    return affine_mersenne61(p.a % modulus_, x % modulus_, p.b % modulus_);
  }
  return (mulmod(p.a % modulus_, x % modulus_, modulus_) + p.b % modulus_) %
         modulus_;
}

MinhashSignature MinhashSignature::empty(std::size_t n) {
  return MinhashSignature(std::vector<std::uint64_t>(n, kEmpty));
}

bool MinhashSignature::is_empty() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](std::uint64_t v) { return v == kEmpty; });
}

MinhashSignature signature(std::span<const Key> keys, const HashFamily& fam) {
  std::vector<std::uint64_t> values(fam.size(), MinhashSignature::kEmpty);
  for (Key k : keys) {
    for (std::size_t j = 0; j < fam.size(); ++j) {
      values[j] = std::min(values[j], fam.hash(j, k));
    }
  }
  return MinhashSignature(std::move(values));
}

MinhashSignature merge(const MinhashSignature& a, const MinhashSignature& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("signature lengths differ");
  }
  std::vector<std::uint64_t> values(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    values[j] = std::min(a[j], b[j]);
  }
  return MinhashSignature(std::move(values));
}

double est_jaccard(const MinhashSignature& a, const MinhashSignature& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("signature lengths differ");
  }
  if (a.size() == 0 || a.is_empty() || b.is_empty()) {
    throw DegenerateInputError("Jaccard similarity of an empty set");
  }
  std::size_t same = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] == b[j]) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(a.size());
}

// ---------------------------------------------------------------------------
// SketchState

SketchState::SketchState(std::size_t node_count, std::size_t partition_count,
                         std::size_t signature_size)
    : nodes_(node_count),
      partitions_(partition_count),
      sig_size_(signature_size),
      card_(node_count * partition_count, 0.0),
      minh_(node_count * partition_count,
            MinhashSignature::empty(signature_size)) {}

SketchState::SketchState(const AggregationState& state, const HashFamily& fam)
    : SketchState(state.node_count(), state.partition_count(), fam.size()) {
  for (NodeId v = 0; v < nodes_; ++v) {
    for (PartitionId l = 0; l < partitions_; ++l) {
      const KeyMultiset& m = state.at(v, l);
      if (m.empty()) continue;
      const std::vector<Key> keys = m.keys();
      set(v, l, static_cast<double>(m.distinct()), signature(keys, fam));
    }
  }
}

std::size_t SketchState::index(NodeId v, PartitionId l) const {
  if (v >= nodes_ || l >= partitions_) {
    throw std::out_of_range("(node, partition) out of range");
  }
  return static_cast<std::size_t>(v) * partitions_ + l;
}

double SketchState::card(NodeId v, PartitionId l) const {
  return card_[index(v, l)];
}

const MinhashSignature& SketchState::minh(NodeId v, PartitionId l) const {
  return minh_[index(v, l)];
}

void SketchState::set(NodeId v, PartitionId l, double card,
                      MinhashSignature sig) {
  if (sig.size() != sig_size_) {
    throw std::invalid_argument("signature length does not match the sketch");
  }
  if (card < 0.0 || (card == 0.0) != sig.is_empty()) {
    throw std::invalid_argument(
        "cardinality must be zero exactly when the signature is empty");
  }
  card_[index(v, l)] = card;
  minh_[index(v, l)] = std::move(sig);
}

double SketchState::est_card(NodeId s, NodeId t, PartitionId l) const {
  const double cs = card(s, l);
  const double ct = card(t, l);
  if (cs == 0.0 && ct == 0.0) {
    throw DegenerateInputError("union estimate of two empty holdings");
  }
  // An empty side shares no minimum with the other: J = 0.
  if (cs == 0.0 || ct == 0.0) return cs + ct;
  return (cs + ct) / (1.0 + est_jaccard(minh(s, l), minh(t, l)));
}

void SketchState::update(NodeId s, NodeId t, PartitionId l) {
  const double merged_card = est_card(s, t, l);
  const std::size_t si = index(s, l);
  const std::size_t ti = index(t, l);
  card_[ti] = merged_card;
  card_[si] = 0.0;
  minh_[ti] = merge(minh_[si], minh_[ti]);
  minh_[si] = MinhashSignature::empty(sig_size_);
}

}  // namespace aggsched
