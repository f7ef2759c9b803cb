// Copyright 2026 The lcorr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lcorr/bits.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/influence.hpp"
#include "lcorr/oracle.hpp"
#include "lcorr/random.hpp"

namespace lcorr {

using BigCount = boost::multiprecision::cpp_int;

// Ordered list of disjoint variable blocks (possibly empty). The ground set is
// the union of the blocks; one block may be designated as the workspace.
class Partition {
 public:
  static constexpr std::int32_t kNoBlock = -1;

  Partition() = default;
  Partition(std::size_t n, std::vector<std::vector<std::uint32_t>> blocks,
            std::optional<std::size_t> workspace = std::nullopt)
      : n_(n), blocks_(std::move(blocks)), workspace_(workspace), block_of_(n, kNoBlock) {
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      std::sort(blocks_[b].begin(), blocks_[b].end());
      for (auto v : blocks_[b]) {
        if (v >= n) throw InvalidArgument("partition variable " + std::to_string(v) + " out of range");
        if (block_of_[v] != kNoBlock) throw InvalidArgument("partition blocks overlap at variable " + std::to_string(v));
        block_of_[v] = static_cast<std::int32_t>(b);
      }
    }
    if (workspace_ && *workspace_ >= blocks_.size()) throw InvalidArgument("workspace is not one of the blocks");
  }

  // Blocks of a, then blocks of b, then (optionally) the workspace block.
  static Partition join(const Partition& a, const Partition& b,
                        std::optional<std::vector<std::uint32_t>> workspace = std::nullopt) {
    if (a.dims() != b.dims()) throw DimensionMismatch("Partition::join", a.dims(), b.dims());
    auto blocks = a.blocks_;
    blocks.insert(blocks.end(), b.blocks_.begin(), b.blocks_.end());
    std::optional<std::size_t> ws;
    if (workspace) {
      ws = blocks.size();
      blocks.push_back(std::move(*workspace));
    }
    return Partition(a.dims(), std::move(blocks), ws);
  }

  std::size_t dims() const { return n_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<std::uint32_t>& block(std::size_t b) const { return blocks_[b]; }
  const std::vector<std::vector<std::uint32_t>>& blocks() const { return blocks_; }
  std::optional<std::size_t> workspace() const { return workspace_; }
  std::int32_t block_of(std::uint32_t v) const { return block_of_[v]; }

  VarSet ground() const {
    std::vector<std::uint32_t> g;
    for (std::uint32_t v = 0; v < n_; ++v) {
      if (block_of_[v] != kNoBlock) g.push_back(v);
    }
    return VarSet(n_, std::move(g));
  }

  std::vector<std::size_t> nonempty_blocks() const {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (!blocks_[b].empty()) out.push_back(b);
    }
    return out;
  }

  // Union of the given blocks.
  VarSet union_of(std::span<const std::size_t> ids) const {
    std::vector<std::uint32_t> vars;
    for (auto b : ids) vars.insert(vars.end(), blocks_[b].begin(), blocks_[b].end());
    return VarSet(n_, std::move(vars));
  }

  // True when no block holds two of the given variables.
  bool separates(std::span<const std::uint32_t> vars) const {
    std::vector<std::int32_t> seen;
    for (auto v : vars) {
      const auto b = block_of_[v];
      if (b == kNoBlock) continue;
      if (std::find(seen.begin(), seen.end(), b) != seen.end()) return false;
      seen.push_back(b);
    }
    return true;
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.n_ == b.n_ && a.blocks_ == b.blocks_ && a.workspace_ == b.workspace_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::uint32_t>> blocks_;
  std::optional<std::size_t> workspace_;
  std::vector<std::int32_t> block_of_;
};

// Assigns every ground element to one of `parts` blocks independently and
// uniformly; empty blocks are kept.
inline Partition random_partition(const VarSet& ground, std::size_t parts, Rng& rng) {
  if (parts == 0) throw InvalidArgument("a partition needs at least one part");
  std::vector<std::vector<std::uint32_t>> blocks(parts);
  for (auto v : ground.indices()) blocks[rng.below(parts)].push_back(v);
  return Partition(ground.dims(), std::move(blocks));
}

inline Partition random_partition(const VarSet& ground, std::size_t parts, std::uint64_t seed) {
  Rng rng(seed);
  return random_partition(ground, parts, rng);
}

namespace detail {

inline void set_bit(std::span<std::uint64_t> words, std::uint32_t v) { words[v >> 6] |= std::uint64_t{1} << (v & 63); }

inline void set_block(std::span<std::uint64_t> words, const std::vector<std::uint32_t>& block) {
  for (auto v : block) set_bit(words, v);
}

// Uniform in [0, bound), bound > 0.
inline BigCount uniform_below(const BigCount& bound, Rng& rng) {
  if (bound <= std::numeric_limits<std::uint64_t>::max()) {
    return BigCount(rng.below(bound.convert_to<std::uint64_t>()));
  }
  const std::size_t bits = boost::multiprecision::msb(bound) + 1;
  const BigCount mask = (BigCount(1) << bits) - 1;
  for (;;) {
    BigCount r = 0;
    for (std::size_t got = 0; got < bits; got += 64) r = (r << 64) | BigCount(rng());
    r &= mask;
    if (r < bound) return r;
  }
}

inline std::vector<BigCount> binomial_row(std::size_t m) {
  std::vector<BigCount> row(m + 1);
  row[0] = 1;
  for (std::size_t j = 1; j <= m; ++j) row[j] = row[j - 1] * (m - j + 1) / j;
  return row;
}

}  // namespace detail

// Draws from D_I for a partition with an even number of blocks: a uniform
// indicator z of weight |blocks|/2 over the blocks, spread as y_i = z_b for
// every i in block b. Only nonempty blocks need an explicit decision; their
// restriction of z is drawn by sequential sampling without replacement.
class BalancedSampler {
 public:
  explicit BalancedSampler(const Partition& p) : n_(p.dims()), total_(p.block_count()) {
    if (p.workspace()) throw InvalidArgument("balanced sampling is defined for partitions without a workspace");
    if (p.block_count() % 2 != 0) {
      throw InvalidArgument("balanced sampling needs an even number of blocks, got " + std::to_string(p.block_count()));
    }
    for (auto b : p.nonempty_blocks()) blocks_.push_back(p.block(b));
  }

  std::size_t dims() const { return n_; }

  // ORs the sample into out (which the caller zeroes).
  void sample_into(Rng& rng, std::span<std::uint64_t> out) const {
    std::uint64_t ones_left = total_ / 2;
    std::uint64_t slots_left = total_;
    for (const auto& block : blocks_) {
      if (rng.below(slots_left) < ones_left) {
        detail::set_block(out, block);
        --ones_left;
      }
      --slots_left;
    }
  }

 private:
  std::size_t n_;
  std::size_t total_;
  std::vector<std::vector<std::uint32_t>> blocks_;
};

inline BitVector sample_balanced(const Partition& p, Rng& rng) {
  BitVector y(p.dims());
  BalancedSampler(p).sample_into(rng, y.words());
  return y;
}

// Merge of independent D_{I0} and D_{I1} draws for partitions of the two
// disjoint halves X0, X1 of [n].
class MergedSampler {
 public:
  MergedSampler(const Partition& p0, const Partition& p1) : s0_(p0), s1_(p1) {
    if (p0.dims() != p1.dims()) throw DimensionMismatch("sample_merged", p0.dims(), p1.dims());
    std::size_t covered = 0;
    for (std::uint32_t v = 0; v < p0.dims(); ++v) {
      const bool a = p0.block_of(v) != Partition::kNoBlock;
      const bool b = p1.block_of(v) != Partition::kNoBlock;
      if (a && b) throw InvalidArgument("merged sampling needs disjoint ground sets; both contain " + std::to_string(v));
      covered += a || b;
    }
    if (covered != p0.dims()) throw InvalidArgument("merged sampling needs ground sets covering all variables");
  }

  std::size_t dims() const { return s0_.dims(); }

  void sample_into(Rng& rng, std::span<std::uint64_t> out) const {
    s0_.sample_into(rng, out);
    s1_.sample_into(rng, out);
  }

 private:
  BalancedSampler s0_;
  BalancedSampler s1_;
};

inline BitVector sample_merged(const Partition& p0, const Partition& p1, Rng& rng) {
  BitVector y(p0.dims());
  MergedSampler(p0, p1).sample_into(rng, y.words());
  return y;
}

// N(t): number of subsets of the nonempty non-workspace blocks with total size t.
class WeightCountTable {
 public:
  explicit WeightCountTable(std::vector<std::size_t> block_sizes) : sizes_(std::move(block_sizes)) {
    std::size_t max_total = 0;
    for (auto s : sizes_) max_total += s;
    prefix_.assign(sizes_.size() + 1, std::vector<BigCount>(max_total + 1, 0));
    prefix_[0][0] = 1;
    for (std::size_t i = 1; i <= sizes_.size(); ++i) {
      const std::size_t s = sizes_[i - 1];
      for (std::size_t t = 0; t <= max_total; ++t) {
        prefix_[i][t] = prefix_[i - 1][t];
        if (t >= s) prefix_[i][t] += prefix_[i - 1][t - s];
      }
    }
  }

  std::size_t max_total() const { return prefix_.back().size() - 1; }
  const BigCount& operator[](std::size_t t) const {
    static const BigCount kZero = 0;
    return t <= max_total() ? prefix_.back()[t] : kZero;
  }

  // Uniform subset (indices into the block list) with total size t; N(t) > 0.
  std::vector<std::size_t> sample_subset(std::size_t t, Rng& rng) const {
    std::vector<std::size_t> chosen;
    for (std::size_t i = sizes_.size(); i > 0; --i) {
      const std::size_t s = sizes_[i - 1];
      if (t >= s && prefix_[i - 1][t - s] != 0) {
        const BigCount u = detail::uniform_below(prefix_[i][t], rng);
        if (u < prefix_[i - 1][t - s]) {
          chosen.push_back(i - 1);
          t -= s;
        }
      }
    }
    return chosen;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<BigCount>> prefix_;  // prefix_[i][t] over the first i blocks
};

// Draws from D_I^W: w ~ B(n, 1/2), then a uniform x of weight w that is
// constant on every non-workspace block, or the all-zeros vector when no such
// x exists. The count table is built once per partition.
class WorkspaceSampler {
 public:
  explicit WorkspaceSampler(const Partition& p) : WorkspaceSampler(p, true) {}

  // Count tables only; the block count may be even.
  static WorkspaceSampler counting(const Partition& p) { return WorkspaceSampler(p, false); }

  std::size_t dims() const { return n_; }
  const WeightCountTable& table() const { return *table_; }

  // Number of valid points of weight w: sum_t N(t) C(|W|, w - t).
  const BigCount& count_weighted(std::size_t w) const {
    static const BigCount kZero = 0;
    return w <= n_ ? by_weight_[w] : kZero;
  }

  void sample_into(Rng& rng, std::span<std::uint64_t> out) const {
    std::size_t w = 0;
    for (std::size_t i = 0; i < n_; i += 64) {
      std::uint64_t bits = rng();
      if (n_ - i < 64) bits &= (std::uint64_t{1} << (n_ - i)) - 1;
      w += static_cast<std::size_t>(std::popcount(bits));
    }
    const BigCount& total = by_weight_[w];
    if (total == 0) return;  // the all-zeros fallback
    BigCount u = detail::uniform_below(total, rng);
    std::size_t t = 0;
    for (;; ++t) {
      if (w - t > workspace_.size()) continue;
      const BigCount term = (*table_)[t] * ws_binomial_[w - t];
      if (u < term) break;
      u -= term;
    }
    for (auto i : table_->sample_subset(t, rng)) detail::set_block(out, blocks_[i]);
    // Uniform (w - t)-subset of the workspace by partial Fisher-Yates.
    std::vector<std::uint32_t> ws = workspace_;
    for (std::size_t i = 0; i < w - t; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(ws.size() - i));
      std::swap(ws[i], ws[j]);
      detail::set_bit(out, ws[i]);
    }
  }

 private:
  WorkspaceSampler(const Partition& p, bool require_odd) : n_(p.dims()) {
    if (!p.workspace()) throw InvalidArgument("workspace sampling needs a designated workspace block");
    if (require_odd && p.block_count() % 2 == 0) {
      throw InvalidArgument("workspace sampling needs an odd number of blocks, got " + std::to_string(p.block_count()));
    }
    std::vector<std::size_t> sizes;
    for (auto b : p.nonempty_blocks()) {
      if (b == *p.workspace()) continue;
      blocks_.push_back(p.block(b));
      sizes.push_back(p.block(b).size());
    }
    workspace_ = p.block(*p.workspace());
    table_.emplace(std::move(sizes));
    ws_binomial_ = detail::binomial_row(workspace_.size());
    by_weight_.resize(n_ + 1);
    for (std::size_t w = 0; w <= n_; ++w) by_weight_[w] = count_for(w);
  }


  BigCount count_for(std::size_t w) const {
    BigCount c = 0;
    const std::size_t hi = std::min(w, table_->max_total());
    for (std::size_t t = 0; t <= hi; ++t) {
      if (w - t <= workspace_.size()) c += (*table_)[t] * ws_binomial_[w - t];
    }
    return c;
  }

  std::size_t n_;
  std::vector<std::vector<std::uint32_t>> blocks_;
  std::vector<std::uint32_t> workspace_;
  std::optional<WeightCountTable> table_;
  std::vector<BigCount> ws_binomial_;
  std::vector<BigCount> by_weight_;
};

inline BigCount count_weighted(const Partition& p, std::size_t w) {
  return WorkspaceSampler::counting(p).count_weighted(w);
}

inline BitVector sample_workspace(const Partition& p, Rng& rng) {
  BitVector y(p.dims());
  WorkspaceSampler(p).sample_into(rng, y.words());
  return y;
}

// r samples of a sampler; sample l comes from a stream keyed by (seed, l).
template <typename Sampler>
class SampleSource final : public QuerySource {
 public:
  SampleSource(std::shared_ptr<const Sampler> sampler, std::size_t count, std::uint64_t seed)
      : sampler_(std::move(sampler)), count_(count), seed_(seed) {}

  std::size_t dims() const override { return sampler_->dims(); }
  std::size_t size() const override { return count_; }

  void fill(std::size_t first, PointSet& out) const override {
    for (std::size_t i = 0; i < out.size(); ++i) {
      Rng rng(derive(seed_, {first + i}));
      auto row = out.row(i);
      std::fill(row.begin(), row.end(), 0);
      sampler_->sample_into(rng, row);
    }
  }

 private:
  std::shared_ptr<const Sampler> sampler_;
  std::size_t count_;
  std::uint64_t seed_;
};

}  // namespace lcorr
