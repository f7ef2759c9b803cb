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

#include "lcorr/boolfn.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace lcorr {
namespace {

// f_sigma by the definition: y_i = x_{sigma(i)}, then f(y).
bool eval_sigma_direct(const FunctionView& f, const Isomorphism& sigma, std::uint64_t x) {
  std::uint64_t y = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) y |= ((x >> sigma(i)) & 1u) << i;
  return f(BitVector::from_index(f.dims(), y));
}

FunctionView random_table(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return FunctionView::table(TruthTable::random(n, rng));
}

TEST(EvalTest, AndJuntaOnSelectedPositions) {
  const auto f = FunctionView::junta(JuntaCore::from(2, [](std::uint64_t z) { return z == 3; }), {4, 1}, 8);
  BitVector x(8);
  x.set(4);
  x.set(1);
  EXPECT_TRUE(f(x));
  x.set(1, false);
  EXPECT_FALSE(f(x));
}

TEST(EvalTest, PsfLookupUsesWeightOutsidePositions) {
  // f(a, w) = a xor (w mod 2); position 1; x = 1011 read as x_0..x_3.
  const auto core = PsfCore::from(1, 3, [](std::uint64_t a, std::size_t w) { return (a ^ (w & 1)) != 0; });
  const auto f = FunctionView::psf(core, {1}, 4);
  BitVector x(4);
  x.set(0);
  x.set(2);
  x.set(3);
  EXPECT_TRUE(f(x));
}

TEST(EvalTest, DimensionMismatchThrows) {
  const auto f = FunctionView::constant(5, true);
  EXPECT_THROW(f(BitVector(4)), DimensionMismatch);
}

TEST(EvalTest, ViewValidation) {
  EXPECT_THROW(FunctionView::junta(JuntaCore(2), {1, 1}, 4), InvalidArgument);
  EXPECT_THROW(FunctionView::junta(JuntaCore(2), {1, 4}, 4), InvalidArgument);
  EXPECT_THROW(FunctionView::junta(JuntaCore(2), {1}, 4), InvalidArgument);
  EXPECT_THROW(FunctionView::psf(PsfCore(1, 2), {0}, 4), DimensionMismatch);
  EXPECT_THROW(TruthTable(25), CapacityExceeded);
  EXPECT_THROW(Isomorphism({0, 0, 1}), InvalidArgument);
}

TEST(EvalTest, TableIndexConvention) {
  TruthTable t(3);
  t.set(0b110, true);
  const auto f = FunctionView::table(t);
  BitVector x(3);
  x.set(1);
  x.set(2);
  EXPECT_TRUE(f(x));
  EXPECT_EQ(to_table(f), t);
}

TEST(EvalTest, JuntaIgnoresOtherVariables) {
  Rng rng(3);
  const std::size_t n = 10;
  const auto f = FunctionView::junta(JuntaCore::random(3, rng), {7, 2, 5}, n);
  for_each_point(n, [&](std::uint64_t i, BitSpan x) {
    for (std::size_t v = 0; v < n; ++v) {
      if (v == 7 || v == 2 || v == 5) continue;
      ASSERT_EQ(f(x), f(BitVector::from_index(n, i ^ (std::uint64_t{1} << v))));
    }
  });
}

TEST(EvalTest, PsfInvariantUnderPermutingSymmetricVariables) {
  Rng rng(4);
  const std::size_t n = 10;
  const std::vector<std::uint32_t> pos{6, 0, 3};
  const auto f = FunctionView::psf(PsfCore::random(3, n - 3, rng), pos, n);
  std::vector<std::uint32_t> rest;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (std::find(pos.begin(), pos.end(), v) == pos.end()) rest.push_back(v);
  }
  for (int rep = 0; rep < 5; ++rep) {
    auto shuffled = rest;
    rng.shuffle(std::span(shuffled));
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t a = 0; a < rest.size(); ++a) perm[rest[a]] = shuffled[a];
    const Isomorphism pi(perm);
    for_each_point(n, [&](std::uint64_t, BitSpan x) { ASSERT_EQ(f(x), f(pi.apply(x))); });
  }
}

TEST(IsomorphismTest, IdentityLeavesFunctionUnchanged) {
  const auto f = random_table(6, 1);
  EXPECT_EQ(distance(apply_isomorphism(f, Isomorphism::identity(6)), f), 0.0);
}

TEST(IsomorphismTest, DictatorMovesToImage) {
  const auto x0 = FunctionView::junta(JuntaCore::from(1, [](std::uint64_t z) { return z == 1; }), {0}, 2);
  const auto x1 = FunctionView::junta(JuntaCore::from(1, [](std::uint64_t z) { return z == 1; }), {1}, 2);
  const Isomorphism sigma({1, 0});
  for (const auto& f : {x0, FunctionView::table(to_table(x0))}) {
    const auto g = apply_isomorphism(f, sigma);
    for_each_point(2, [&](std::uint64_t, BitSpan x) { EXPECT_EQ(g(x), x1(x)); });
  }
}

TEST(IsomorphismTest, MatchesDefinitionForEveryKind) {
  Rng rng(21);
  const std::size_t n = 7;
  std::vector<FunctionView> fs{random_table(n, 2), FunctionView::junta(JuntaCore::random(3, rng), {5, 0, 2}, n),
                               FunctionView::psf(PsfCore::random(2, n - 2, rng), {1, 6}, n)};
  for (int rep = 0; rep < 10; ++rep) {
    const auto sigma = Isomorphism::random(n, rng);
    for (const auto& f : fs) {
      const auto g = apply_isomorphism(f, sigma);
      for (std::uint64_t x = 0; x < (1u << n); ++x) {
        ASSERT_EQ(g(BitVector::from_index(n, x)), eval_sigma_direct(f, sigma, x));
      }
    }
  }
}

TEST(IsomorphismTest, CompositionLaw) {
  Rng rng(8);
  const std::size_t n = 4;
  for (int rep = 0; rep < 30; ++rep) {
    const auto sigma = Isomorphism::random(n, rng);
    const auto tau = Isomorphism::random(n, rng);
    const auto f = random_table(n, rng());
    const auto lhs = apply_isomorphism(apply_isomorphism(f, sigma), tau);
    const auto rhs = apply_isomorphism(f, compose(tau, sigma));
    for_each_point(n, [&](std::uint64_t, BitSpan x) { ASSERT_EQ(lhs(x), rhs(x)); });
  }
}

TEST(IsomorphismTest, InverseUndoes) {
  Rng rng(9);
  const auto sigma = Isomorphism::random(12, rng);
  EXPECT_TRUE(compose(sigma, sigma.inverse()).is_identity());
  EXPECT_TRUE(compose(sigma.inverse(), sigma).is_identity());
}

TEST(DistanceTest, SelfAndComplement) {
  const auto f = random_table(9, 5);
  EXPECT_EQ(distance(f, f), 0.0);
  EXPECT_EQ(distance(f, FunctionView::table(f.truth_table().complement())), 1.0);
}

TEST(DistanceTest, PreservedByIsomorphism) {
  Rng rng(10);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 1 + rng.below(10);
    const auto f = random_table(n, rng());
    const auto g = random_table(n, rng());
    const auto sigma = Isomorphism::random(n, rng);
    ASSERT_EQ(distance(apply_isomorphism(f, sigma), apply_isomorphism(g, sigma)), distance(f, g));
  }
}

TEST(DistanceTest, SampledTracksExact) {
  const auto f = random_table(12, 6);
  const auto g = random_table(12, 7);
  const double exact = distance(f, g);
  const double sampled = distance(f, g, SampledDistance{200000, 3});
  EXPECT_NEAR(sampled, exact, 0.005);
}

TEST(DistanceTest, ExactCountsByHand) {
  // x0 AND x1 versus x0: differ only where x0 = 1, x1 = 0.
  const auto a = FunctionView::junta(JuntaCore::from(2, [](std::uint64_t z) { return z == 3; }), {0, 1}, 3);
  const auto b = FunctionView::junta(JuntaCore::from(1, [](std::uint64_t z) { return z == 1; }), {0}, 3);
  EXPECT_DOUBLE_EQ(distance(a, b), 0.25);
  EXPECT_THROW(distance(a, FunctionView::constant(4, false)), DimensionMismatch);
}

}  // namespace
}  // namespace lcorr
