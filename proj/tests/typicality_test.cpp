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

#include "lcorr/typicality.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lcorr {
namespace {

std::vector<std::uint32_t> iota(std::size_t k) {
  std::vector<std::uint32_t> v(k);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

// Minimum distance between the core's function and its isomorphic copies,
// computed on full views through apply_isomorphism.
double iso_distance_by_views(const JuntaCore& core) {
  const std::size_t k = core.arity();
  const auto f = FunctionView::junta(core, iota(k), k);
  auto pi = iota(k);
  double lo = 1.0;
  while (std::next_permutation(pi.begin(), pi.end())) lo = std::min(lo, distance(f, apply_isomorphism(f, Isomorphism(pi))));
  return lo;
}

// SymInf({i, j}) for asymmetric slot a and any symmetric j: x_i != x_j with
// probability 1/2, the transposition is drawn with probability 1/2, and the
// swap moves one unit of weight between slot a and the symmetric part.
double pair_syminf_by_core(const PsfCore& core, std::size_t a) {
  const std::size_t k = core.arity();
  const std::size_t m = core.symmetric_count();
  double sum = 0.0;
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << k); ++z) {
    if ((z >> a) & 1u) continue;
    for (std::size_t w = 0; w + 1 <= m; ++w) {
      const double pr = std::exp(std::lgamma(m) - std::lgamma(w + 1.0) - std::lgamma(m - w * 1.0) - (m - 1.0) * std::log(2.0));
      sum += pr * (core(z | (std::uint64_t{1} << a), w) != core(z, w + 1));
    }
  }
  return sum / static_cast<double>(std::uint64_t{1} << (k - 1)) / 4.0;
}

TEST(VerdictTest, ThresholdIsStrict) {
  EXPECT_FALSE(TypicalityVerdict::measured("c", 0.1).pass);
  EXPECT_TRUE(TypicalityVerdict::measured("c", 0.1000001).pass);
  EXPECT_TRUE(TypicalityVerdict::vacuous_pass("c").vacuous);
}

TEST(MinInfluenceTest, AndCoreFails) {
  const auto v = check_core_min_influence(and_core(10));
  EXPECT_DOUBLE_EQ(v.statistic, std::ldexp(1.0, -10));
  EXPECT_FALSE(v.pass);
}

TEST(MinInfluenceTest, DictatorPasses) {
  const auto v = check_core_min_influence(JuntaCore::from(1, [](std::uint64_t z) { return z == 1; }));
  EXPECT_DOUBLE_EQ(v.statistic, 0.5);
  EXPECT_TRUE(v.pass);
  EXPECT_THROW(check_core_min_influence(JuntaCore(21)), CapacityExceeded);
}

TEST(MinInfluenceTest, RandomCoresUsuallyPass) {
  Rng rng(1);
  int pass = 0;
  for (int i = 0; i < 100; ++i) pass += check_core_min_influence(JuntaCore::random(12, rng)).pass;
  EXPECT_GE(pass, 99);
}

TEST(IsomorphismDistanceTest, ParityIsSymmetric) {
  const auto parity = JuntaCore::from(4, [](std::uint64_t z) { return std::popcount(z) % 2 == 1; });
  const auto v = check_core_far_from_isomorphisms(parity);
  EXPECT_EQ(v.statistic, 0.0);
  EXPECT_FALSE(v.pass);
}

TEST(IsomorphismDistanceTest, IdentityExcluded) {
  // x0 AND NOT x1 differs from its swap on two of four points.
  const auto core = JuntaCore::from(2, [](std::uint64_t z) { return z == 1; });
  EXPECT_DOUBLE_EQ(check_core_far_from_isomorphisms(core).statistic, 0.5);
  EXPECT_TRUE(check_core_far_from_isomorphisms(JuntaCore::constant(true)).vacuous);
  EXPECT_THROW(check_core_far_from_isomorphisms(JuntaCore(9)), CapacityExceeded);
}

TEST(IsomorphismDistanceTest, MatchesViewComputation) {
  Rng rng(2);
  for (int i = 0; i < 30; ++i) {
    const auto core = JuntaCore::random(2 + rng.below(5), rng);
    ASSERT_DOUBLE_EQ(check_core_far_from_isomorphisms(core).statistic, iso_distance_by_views(core));
  }
}

TEST(IsomorphismDistanceTest, RandomCoresUsuallyPass) {
  Rng rng(3);
  int pass = 0;
  for (int i = 0; i < 100; ++i) pass += check_core_far_from_isomorphisms(JuntaCore::random(8, rng)).pass;
  EXPECT_GE(pass, 99);
}

TEST(PairSymInfTest, VacuousAndDummy) {
  Rng rng(4);
  EXPECT_TRUE(check_psf_pair_syminf(PsfCore::random(0, 10, rng), {}, 10, 0, 1).vacuous);
  // Slot 1 is ignored by the core.
  const auto core = PsfCore::from(2, 8, [](std::uint64_t z, std::size_t w) { return ((z & 1u) != 0) != (w % 2 == 1); });
  const auto v = check_psf_pair_syminf(core, {0, 1}, 10, 0, 1);
  EXPECT_EQ(v.statistic, 0.0);
  EXPECT_FALSE(v.pass);
}

TEST(PairSymInfTest, ExactPathMatchesCoreFormula) {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto core = PsfCore::random(3, 9, rng);
    double lo = 1.0;
    for (std::size_t a = 0; a < 3; ++a) lo = std::min(lo, pair_syminf_by_core(core, a));
    ASSERT_NEAR(check_psf_pair_syminf(core, {7, 2, 4}, 12, 0, 1).statistic, lo, 1e-12);
  }
}

TEST(PairSymInfTest, SampledPathNearCoreFormula) {
  Rng rng(6);
  for (int i = 0; i < 5; ++i) {
    const auto core = PsfCore::random(2, 38, rng);
    const double lo = std::min(pair_syminf_by_core(core, 0), pair_syminf_by_core(core, 1));
    EXPECT_NEAR(check_psf_pair_syminf(core, {0, 1}, 40, 100000, rng()).statistic, lo, 0.01);
  }
}

TEST(PairSymInfTest, SmallRandomCoresStayBelowQuarter) {
  // A pair changes f only when its two bits differ and the swap is drawn, so
  // the statistic never exceeds 1/4 and averages 1/8 per slot for a random
  // core. With 12 symmetric variables the minimum over four slots is still
  // spread around 0.1.
  Rng rng(7);
  int pass = 0;
  for (int i = 0; i < 100; ++i) {
    const auto v = check_psf_pair_syminf(PsfCore::random(4, 12, rng), iota(4), 16, 0, 1);
    ASSERT_LE(v.statistic, 0.25);
    pass += v.pass;
  }
  EXPECT_GE(pass, 50);
  EXPECT_LE(pass, 90);
}

TEST(PairSymInfTest, LargeRandomCoresUsuallyPass) {
  Rng rng(7);
  int pass = 0;
  for (int i = 0; i < 100; ++i) pass += check_psf_pair_syminf(PsfCore::random(4, 1020, rng), iota(4), 1024, 100000, rng()).pass;
  EXPECT_GE(pass, 99);
}

TEST(CorePermTest, SymmetricCoreFails) {
  const auto core = PsfCore::from(3, 5, [](std::uint64_t z, std::size_t w) { return std::popcount(z) + w >= 4; });
  EXPECT_EQ(check_psf_far_from_core_perms(core, 8).statistic, 0.0);
  EXPECT_FALSE(check_psf_far_from_core_perms(core, 8).pass);
  Rng rng(8);
  EXPECT_TRUE(check_psf_far_from_core_perms(PsfCore::random(1, 7, rng), 8).vacuous);
  EXPECT_THROW(check_psf_far_from_core_perms(PsfCore::random(2, 7, rng), 8), DimensionMismatch);
}

TEST(CorePermTest, MatchesViewDistance) {
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    const std::size_t n = 10;
    const std::size_t k = 2 + rng.below(3);
    const auto core = PsfCore::random(k, n - k, rng);
    const auto pos = iota(k);
    const auto f = FunctionView::psf(core, pos, n);
    auto pi = iota(k);
    double lo = 1.0;
    while (std::next_permutation(pi.begin(), pi.end())) {
      std::vector<std::uint32_t> moved(k);
      for (std::size_t j = 0; j < k; ++j) moved[j] = pos[pi[j]];
      lo = std::min(lo, distance(f, FunctionView::psf(core, moved, n)));
    }
    ASSERT_NEAR(check_psf_far_from_core_perms(core, n).statistic, lo, 1e-12);
  }
}

TEST(CorePermTest, RandomCoresUsuallyPass) {
  Rng rng(10);
  int pass = 0;
  for (int i = 0; i < 100; ++i) pass += check_psf_far_from_core_perms(PsfCore::random(6, 12, rng), 18).pass;
  EXPECT_GE(pass, 99);
}

TEST(HardJuntaTest, DefiningPoint) {
  const auto f = make_hard_junta(4, 9);
  BitVector x(9);
  x.set(0);
  x.set(7);
  EXPECT_TRUE(f(x));
  x.set(2);
  EXPECT_FALSE(f(x));
  EXPECT_THROW(make_hard_junta(5, 4), InvalidArgument);
  EXPECT_THROW(make_hard_junta(0, 4), InvalidArgument);
}

TEST(HardJuntaTest, CloseToZeroUnderEveryIsomorphism) {
  Rng rng(11);
  for (std::size_t k : {1u, 3u, 5u}) {
    const std::size_t n = 12;
    const auto f = make_hard_junta(k, n);
    const auto zeros = FunctionView::constant(n, false);
    EXPECT_EQ(distance(f, zeros), std::ldexp(1.0, -static_cast<int>(k)));
    const auto a = apply_isomorphism(f, Isomorphism::random(n, rng));
    const auto b = apply_isomorphism(f, Isomorphism::random(n, rng));
    EXPECT_EQ(distance(a, zeros), std::ldexp(1.0, -static_cast<int>(k)));
    EXPECT_EQ(distance(b, zeros), std::ldexp(1.0, -static_cast<int>(k)));
    EXPECT_LE(distance(a, b), std::ldexp(1.0, 1 - static_cast<int>(k)));
  }
}

TEST(DrawTest, TypicalJuntaPassesAndIsDeterministic) {
  Rng a(12), b(12);
  const auto x = draw_typical_junta_core(4, a);
  const auto y = draw_typical_junta_core(4, b);
  EXPECT_EQ(x.core, y.core);
  EXPECT_EQ(x.rejections, y.rejections);
  EXPECT_TRUE(check_core_min_influence(x.core).pass);
  EXPECT_TRUE(check_core_far_from_isomorphisms(x.core).pass);
  Rng c(13);
  EXPECT_THROW(draw_typical_junta_core(1, c, 0), Error);
}

TEST(DrawTest, TypicalPsfPasses) {
  Rng rng(14);
  const auto d = draw_typical_psf_core(3, 16, rng);
  EXPECT_TRUE(check_psf_pair_syminf(d.core, iota(3), 16, 0, 1).pass);
  EXPECT_TRUE(check_psf_far_from_core_perms(d.core, 16).pass);
}

}  // namespace
}  // namespace lcorr
