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
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lcorr/bits.hpp"
#include "lcorr/boolfn.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/oracle.hpp"
#include "lcorr/random.hpp"

namespace lcorr {

// Exact influence computations enumerate all 2^n points.
inline constexpr std::size_t kMaxExactInfluenceVars = 20;

// Sorted set of distinct variables of an n-variable function.
class VarSet {
 public:
  VarSet() = default;
  VarSet(std::size_t n, std::vector<std::uint32_t> indices) : n_(n), indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
      throw InvalidArgument("variable set has duplicate indices");
    }
    if (!indices_.empty() && indices_.back() >= n) {
      throw InvalidArgument("variable " + std::to_string(indices_.back()) + " out of range for n=" + std::to_string(n));
    }
  }

  static VarSet all(std::size_t n) {
    std::vector<std::uint32_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(i);
    return VarSet(n, std::move(v));
  }

  std::size_t dims() const { return n_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  const std::vector<std::uint32_t>& indices() const { return indices_; }
  bool contains(std::uint32_t i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

  VarSet complement() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < n_; ++i) {
      if (!contains(i)) out.push_back(i);
    }
    return VarSet(n_, std::move(out));
  }

  std::vector<std::uint64_t> mask() const {
    std::vector<std::uint64_t> m(words_for(n_), 0);
    for (auto i : indices_) m[i >> 6] |= std::uint64_t{1} << (i & 63);
    return m;
  }

  friend bool operator==(const VarSet&, const VarSet&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> indices_;
};

// Accuracy delta and failure probability eta of a Monte-Carlo estimate; the
// estimator runs q = ceil(ln(2/eta) / (2 delta^2)) rounds of two queries.
struct EstimatorParams {
  double delta;
  double eta;

  EstimatorParams(double delta_, double eta_) : delta(delta_), eta(eta_) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("estimator delta must lie in (0, 1)");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("estimator eta must lie in (0, 1)");
  }

  std::size_t rounds() const {
    return static_cast<std::size_t>(std::ceil(std::log(2.0 / eta) / (2.0 * delta * delta)));
  }
  std::size_t queries() const { return 2 * rounds(); }
};

namespace detail {

inline std::uint64_t small_mask(const VarSet& j) {
  std::uint64_t m = 0;
  for (auto i : j.indices()) m |= std::uint64_t{1} << i;
  return m;
}

inline void check_exact(const FunctionView& f, const VarSet& j, const char* what) {
  if (j.dims() != f.dims()) throw DimensionMismatch(what, f.dims(), j.dims());
  if (f.dims() > kMaxExactInfluenceVars) {
    throw CapacityExceeded(std::string(what) + ": n=" + std::to_string(f.dims()) + " exceeds the exact limit of " +
                           std::to_string(kMaxExactInfluenceVars));
  }
}

// Calls fn(o) for every submask o of mask, including 0 and mask.
template <typename F>
void for_each_submask(std::uint64_t mask, F&& fn) {
  std::uint64_t s = 0;
  do {
    fn(s);
    s = (s - mask) & mask;
  } while (s != 0);
}

}  // namespace detail

// Inf_f(J) = Pr_{x,y}[f(x) != f(x_{~J} y_J)], computed as the average over
// assignments o outside J of 2 p (1 - p), p the ones-fraction of f over the
// 2^|J| completions of o.
inline double influence_exact(const FunctionView& f, const VarSet& j) {
  detail::check_exact(f, j, "influence_exact");
  if (j.empty()) return 0.0;
  const TruthTable t = to_table(f);
  const std::size_t n = f.dims();
  const std::uint64_t jm = detail::small_mask(j);
  const std::uint64_t om = ((std::uint64_t{1} << n) - 1) & ~jm;
  const double completions = std::ldexp(1.0, static_cast<int>(j.size()));
  double sum = 0.0;
  detail::for_each_submask(om, [&](std::uint64_t o) {
    std::uint64_t ones = 0;
    detail::for_each_submask(jm, [&](std::uint64_t s) { ones += t[o | s]; });
    const double p = static_cast<double>(ones) / completions;
    sum += 2.0 * p * (1.0 - p);
  });
  return sum / std::ldexp(1.0, static_cast<int>(n - j.size()));
}

// SymInf_f(J) = Pr_{x, pi in S_J}[f(x) != f(pi x)], computed layer by layer:
// for each assignment outside J and each weight w of x_J, x_J and pi x_J are
// independent uniform points of the weight-w layer.
inline double symmetric_influence_exact(const FunctionView& f, const VarSet& j) {
  detail::check_exact(f, j, "symmetric_influence_exact");
  if (j.size() < 2) return 0.0;
  const TruthTable t = to_table(f);
  const std::size_t n = f.dims();
  const std::size_t m = j.size();
  const std::uint64_t jm = detail::small_mask(j);
  const std::uint64_t om = ((std::uint64_t{1} << n) - 1) & ~jm;
  std::vector<double> layer_size(m + 1, 0.0);
  detail::for_each_submask(jm, [&](std::uint64_t s) { layer_size[std::popcount(s)] += 1.0; });
  const double completions = std::ldexp(1.0, static_cast<int>(m));
  std::vector<std::uint64_t> ones(m + 1);
  double sum = 0.0;
  detail::for_each_submask(om, [&](std::uint64_t o) {
    std::fill(ones.begin(), ones.end(), 0);
    detail::for_each_submask(jm, [&](std::uint64_t s) { ones[std::popcount(s)] += t[o | s]; });
    for (std::size_t w = 0; w <= m; ++w) {
      const double p = static_cast<double>(ones[w]) / layer_size[w];
      sum += (layer_size[w] / completions) * 2.0 * p * (1.0 - p);
    }
  });
  return sum / std::ldexp(1.0, static_cast<int>(n - m));
}

// Rounds of the influence estimator: round i queries x and x_{~J} y_J, with
// x, y drawn from a stream keyed by (seed, i).
class InfluenceRounds final : public QuerySource {
 public:
  InfluenceRounds(const VarSet& j, std::size_t rounds, std::uint64_t seed)
      : n_(j.dims()), mask_(j.mask()), rounds_(rounds), seed_(seed) {}

  std::size_t dims() const override { return n_; }
  std::size_t size() const override { return 2 * rounds_; }
  std::size_t rounds() const { return rounds_; }

  void fill(std::size_t first, PointSet& out) const override {
    const std::size_t stride = out.stride();
    std::vector<std::uint64_t> x(stride), y(stride);
    std::size_t at = 0;
    std::size_t idx = first;
    while (at < out.size()) {
      const std::size_t round = idx / 2;
      Rng rng(derive(seed_, {round}));
      rng.fill_bits(x, n_);
      rng.fill_bits(y, n_);
      if (idx % 2 == 0) {
        std::copy(x.begin(), x.end(), out.row(at).begin());
        ++at;
        ++idx;
        if (at == out.size()) break;
      }
      auto row = out.row(at);
      for (std::size_t w = 0; w < stride; ++w) row[w] = (x[w] & ~mask_[w]) | (y[w] & mask_[w]);
      ++at;
      ++idx;
    }
  }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> mask_;
  std::size_t rounds_;
  std::uint64_t seed_;
};

// Rounds of the symmetric-influence estimator: round i queries x and pi x for
// a uniform pi in S_J, where (pi x)_{J[a]} = x_{J[perm[a]]}.
class SymmetricInfluenceRounds final : public QuerySource {
 public:
  SymmetricInfluenceRounds(const VarSet& j, std::size_t rounds, std::uint64_t seed)
      : n_(j.dims()), vars_(j.indices()), rounds_(rounds), seed_(seed) {}

  std::size_t dims() const override { return n_; }
  std::size_t size() const override { return 2 * rounds_; }
  std::size_t rounds() const { return rounds_; }

  // The permutation of positions within J drawn in the given round.
  std::vector<std::uint32_t> permutation_for_round(std::size_t round) const {
    std::vector<std::uint64_t> x(words_for(n_));
    std::vector<std::uint32_t> perm;
    draw(round, x, perm);
    return perm;
  }

  void fill(std::size_t first, PointSet& out) const override {
    const std::size_t stride = out.stride();
    std::vector<std::uint64_t> x(stride);
    std::vector<std::uint32_t> perm;
    std::size_t at = 0;
    for (std::size_t idx = first; at < out.size(); ++idx) {
      if (idx == first || idx % 2 == 0) draw(idx / 2, x, perm);
      auto row = out.row(at++);
      std::copy(x.begin(), x.end(), row.begin());
      if (idx % 2 == 0) continue;
      for (std::size_t a = 0; a < vars_.size(); ++a) {
        const std::uint32_t dst = vars_[a];
        const std::uint32_t src = vars_[perm[a]];
        const std::uint64_t bit = (x[src >> 6] >> (src & 63)) & 1u;
        row[dst >> 6] = (row[dst >> 6] & ~(std::uint64_t{1} << (dst & 63))) | (bit << (dst & 63));
      }
    }
  }

 private:
  void draw(std::size_t round, std::vector<std::uint64_t>& x, std::vector<std::uint32_t>& perm) const {
    Rng rng(derive(seed_, {round}));
    rng.fill_bits(x, n_);
    perm.resize(vars_.size());
    for (std::size_t a = 0; a < perm.size(); ++a) perm[a] = static_cast<std::uint32_t>(a);
    rng.shuffle(std::span(perm));
  }

  std::size_t n_;
  std::vector<std::uint32_t> vars_;
  std::size_t rounds_;
  std::uint64_t seed_;
};

// X/q from the answers of a two-queries-per-round source.
inline double disagreement_rate(std::span<const std::uint8_t> answers) {
  const std::size_t rounds = answers.size() / 2;
  if (rounds == 0) return 0.0;
  std::size_t x = 0;
  for (std::size_t i = 0; i < rounds; ++i) x += answers[2 * i] != answers[2 * i + 1];
  return static_cast<double>(x) / static_cast<double>(rounds);
}

// Monte-Carlo estimate of Inf_g(J) using 2q queries, all submitted as a single
// batch.
inline double estimate_influence(Oracle& oracle, const VarSet& j, const EstimatorParams& params, std::uint64_t seed) {
  if (j.dims() != oracle.dims()) throw DimensionMismatch("estimate_influence", oracle.dims(), j.dims());
  QueryPlan plan(oracle.dims());
  plan.add(std::make_shared<InfluenceRounds>(j, params.rounds(), seed));
  return disagreement_rate(oracle.batch(plan));
}

// Monte-Carlo estimate of SymInf_g(J) using 2q queries in one batch.
inline double estimate_symmetric_influence(Oracle& oracle, const VarSet& j, const EstimatorParams& params,
                                           std::uint64_t seed) {
  if (j.dims() != oracle.dims()) throw DimensionMismatch("estimate_symmetric_influence", oracle.dims(), j.dims());
  QueryPlan plan(oracle.dims());
  plan.add(std::make_shared<SymmetricInfluenceRounds>(j, params.rounds(), seed));
  return disagreement_rate(oracle.batch(plan));
}

}  // namespace lcorr
