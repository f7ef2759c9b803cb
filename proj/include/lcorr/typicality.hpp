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
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lcorr/boolfn.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/influence.hpp"
#include "lcorr/random.hpp"

namespace lcorr {

inline constexpr double kTypicalityThreshold = 0.1;

struct TypicalityVerdict {
  std::string check;
  double statistic = 0.0;
  double threshold = kTypicalityThreshold;
  bool pass = false;
  bool vacuous = false;  // nothing to measure (e.g. no asymmetric variable)

  static TypicalityVerdict measured(std::string check, double statistic) {
    return {std::move(check), statistic, kTypicalityThreshold, statistic > kTypicalityThreshold, false};
  }
  static TypicalityVerdict vacuous_pass(std::string check) {
    return {std::move(check), 1.0, kTypicalityThreshold, true, true};
  }
};

namespace detail {

inline std::vector<std::uint32_t> iota_positions(std::size_t k) {
  std::vector<std::uint32_t> p(k);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

// z_pi with (z_pi)_j = z_{pi(j)}.
inline std::uint64_t permute_bits(std::uint64_t z, const std::vector<std::uint32_t>& pi) {
  std::uint64_t out = 0;
  for (std::size_t j = 0; j < pi.size(); ++j) out |= ((z >> pi[j]) & 1u) << j;
  return out;
}

// C(m, w) / 2^m for w = 0..m.
inline std::vector<double> binomial_half_pmf(std::size_t m) {
  std::vector<double> pmf(m + 1);
  const double lm = std::lgamma(static_cast<double>(m) + 1.0);
  for (std::size_t w = 0; w <= m; ++w) {
    pmf[w] = std::exp(lm - std::lgamma(static_cast<double>(w) + 1.0) - std::lgamma(static_cast<double>(m - w) + 1.0) -
                      static_cast<double>(m) * std::log(2.0));
  }
  return pmf;
}

}  // namespace detail

// Minimum over the k core variables of Inf(i); typical cores exceed 0.1.
inline TypicalityVerdict check_core_min_influence(const JuntaCore& core) {
  const std::size_t k = core.arity();
  if (k > kMaxExactInfluenceVars) throw CapacityExceeded("core min-influence check needs k <= 20");
  if (k == 0) return TypicalityVerdict::vacuous_pass("core-min-influence");
  const auto view = FunctionView::junta(core, detail::iota_positions(k), k);
  double lo = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < k; ++i) lo = std::min(lo, influence_exact(view, VarSet(k, {i})));
  return TypicalityVerdict::measured("core-min-influence", lo);
}

// Minimum over non-identity pi in S_k of dist(core, core_pi).
inline TypicalityVerdict check_core_far_from_isomorphisms(const JuntaCore& core) {
  const std::size_t k = core.arity();
  if (k > 8) throw CapacityExceeded("isomorphism-distance check scans S_k exhaustively and needs k <= 8");
  if (k < 2) return TypicalityVerdict::vacuous_pass("core-far-from-isomorphisms");
  auto pi = detail::iota_positions(k);
  const std::uint64_t points = std::uint64_t{1} << k;
  std::uint64_t lo = points;
  while (std::next_permutation(pi.begin(), pi.end())) {
    std::uint64_t diff = 0;
    for (std::uint64_t z = 0; z < points; ++z) diff += core[z] != core[detail::permute_bits(z, pi)];
    lo = std::min(lo, diff);
  }
  return TypicalityVerdict::measured("core-far-from-isomorphisms",
                                     static_cast<double>(lo) / static_cast<double>(points));
}

// Minimum over asymmetric variables i of SymInf({i, j}) for one symmetric j
// (any symmetric j gives the same value). Exact for n <= 20, otherwise a
// Monte-Carlo estimate over sample_budget rounds.
inline TypicalityVerdict check_psf_pair_syminf(const PsfCore& core, const std::vector<std::uint32_t>& positions,
                                               std::size_t n, std::size_t sample_budget, std::uint64_t seed) {
  const auto view = FunctionView::psf(core, positions, n);
  if (positions.empty() || positions.size() == n) return TypicalityVerdict::vacuous_pass("psf-pair-syminf");
  std::uint32_t j = 0;
  while (std::find(positions.begin(), positions.end(), j) != positions.end()) ++j;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < positions.size(); ++a) {
    const VarSet pair(n, {positions[a], j});
    if (n <= kMaxExactInfluenceVars) {
      lo = std::min(lo, symmetric_influence_exact(view, pair));
      continue;
    }
    if (sample_budget == 0) throw InvalidArgument("pair symmetric-influence check at n > 20 needs a sample budget");
    SymmetricInfluenceRounds rounds(pair, sample_budget, derive(seed, {stream::kTypicality, a}));
    PointSet pts(n, rounds.size());
    rounds.fill(0, pts);
    std::vector<std::uint8_t> out(pts.size());
    view.evaluate(pts, out);
    lo = std::min(lo, disagreement_rate(out));
  }
  return TypicalityVerdict::measured("psf-pair-syminf", lo);
}

// Minimum over non-identity pi in S_k of the distance between f and f with its
// asymmetric positions permuted by pi, computed from the core:
// sum_w C(m,w)/2^m * 2^-k * #{z : core(z,w) != core(z_pi,w)}. Exact at any n.
inline TypicalityVerdict check_psf_far_from_core_perms(const PsfCore& core, std::size_t n) {
  const std::size_t k = core.arity();
  const std::size_t m = core.symmetric_count();
  if (k + m != n) throw DimensionMismatch("check_psf_far_from_core_perms", n, k + m);
  if (k > 8) throw CapacityExceeded("core permutation check scans S_k exhaustively and needs k <= 8");
  if (k < 2) return TypicalityVerdict::vacuous_pass("psf-far-from-core-perms");
  const auto pmf = detail::binomial_half_pmf(m);
  const std::uint64_t points = std::uint64_t{1} << k;
  auto pi = detail::iota_positions(k);
  double lo = std::numeric_limits<double>::infinity();
  while (std::next_permutation(pi.begin(), pi.end())) {
    double d = 0.0;
    for (std::size_t w = 0; w <= m; ++w) {
      std::uint64_t diff = 0;
      for (std::uint64_t z = 0; z < points; ++z) diff += core(z, w) != core(detail::permute_bits(z, pi), w);
      d += pmf[w] * static_cast<double>(diff) / static_cast<double>(points);
    }
    lo = std::min(lo, d);
  }
  return TypicalityVerdict::measured("psf-far-from-core-perms", lo);
}

inline JuntaCore hard_junta_core(std::size_t k) {
  return JuntaCore::from(k, [](std::uint64_t z) { return z == 1; });
}

// The k-junta that is 1 exactly when x_0 = 1 and x_1 = ... = x_{k-1} = 0. It is
// 2^-k close to the constant zero function, as is every isomorphic copy.
inline FunctionView make_hard_junta(std::size_t k, std::size_t n) {
  if (k == 0) throw InvalidArgument("hard junta needs k >= 1");
  if (n < k) throw InvalidArgument("hard junta needs n >= k");
  return FunctionView::junta(hard_junta_core(k), detail::iota_positions(k), n);
}

// AND of k variables; its minimum influence is 2^-k.
inline JuntaCore and_core(std::size_t k) {
  return JuntaCore::from(k, [k](std::uint64_t z) { return z == (std::uint64_t{1} << k) - 1; });
}

struct TypicalJunta {
  JuntaCore core;
  std::size_t rejections = 0;
};

// Draws uniform random cores until one passes both junta checks.
inline TypicalJunta draw_typical_junta_core(std::size_t k, Rng& rng, std::size_t max_attempts = 100000) {
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    JuntaCore core = JuntaCore::random(k, rng);
    if (check_core_min_influence(core).pass && (k > 8 || check_core_far_from_isomorphisms(core).pass)) {
      return {std::move(core), attempt};
    }
  }
  throw Error("typicality rejection budget of " + std::to_string(max_attempts) + " draws exhausted for k=" +
              std::to_string(k));
}

struct TypicalPsf {
  PsfCore core;
  std::size_t rejections = 0;
};

inline TypicalPsf draw_typical_psf_core(std::size_t k, std::size_t n, Rng& rng, std::size_t sample_budget = 100000,
                                        std::size_t max_attempts = 10000) {
  if (k > n) throw InvalidArgument("psf core needs k <= n");
  const auto positions = detail::iota_positions(k);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    PsfCore core = PsfCore::random(k, n - k, rng);
    if (check_psf_pair_syminf(core, positions, n, sample_budget, rng()).pass &&
        (k > 8 || check_psf_far_from_core_perms(core, n).pass)) {
      return {std::move(core), attempt};
    }
  }
  throw Error("typicality rejection budget of " + std::to_string(max_attempts) + " draws exhausted for k=" +
              std::to_string(k));
}

}  // namespace lcorr
