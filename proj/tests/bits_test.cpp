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

#include "lcorr/bits.hpp"

#include <gtest/gtest.h>

#include "lcorr/random.hpp"

namespace lcorr {
namespace {

TEST(BitVectorTest, IndexRoundTrip) {
  for (std::size_t n : {1u, 5u, 12u}) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
      const auto v = BitVector::from_index(n, i);
      ASSERT_EQ(v.index(), i);
      for (std::size_t b = 0; b < n; ++b) ASSERT_EQ(v[b], ((i >> b) & 1u) != 0);
    }
  }
}

TEST(BitVectorTest, SetFlipWeight) {
  BitVector v(130);
  EXPECT_EQ(v.weight(), 0u);
  v.set(0);
  v.set(64);
  v.set(129);
  EXPECT_EQ(v.weight(), 3u);
  v.flip(64);
  EXPECT_FALSE(v[64]);
  v.set(129, false);
  EXPECT_EQ(v.weight(), 1u);
  EXPECT_TRUE(v[0]);
}

TEST(HexTest, DigitHoldsFourConsecutiveBits) {
  // Bits 0 and 5 set: digit 0 = 0x1, digit 1 = 0x2.
  BitVector v(8);
  v.set(0);
  v.set(5);
  EXPECT_EQ(hex::encode(v.span()), "12");
  EXPECT_EQ(hex::decode_point("12", 8), v);
}

TEST(HexTest, OddLengths) {
  BitVector v(6);
  v.set(4);
  v.set(5);
  EXPECT_EQ(hex::encode(v.span()), "03");
  EXPECT_EQ(hex::decode_point("03", 6), v);
  EXPECT_THROW(hex::decode_point("04", 6), InvalidArgument);  // bit 6 is out of range
}

TEST(HexTest, RejectsMalformedInput) {
  EXPECT_THROW(hex::decode_point("1", 8), InvalidArgument);
  EXPECT_THROW(hex::decode_point("1g", 8), InvalidArgument);
  EXPECT_EQ(hex::decode_point("AF", 8), hex::decode_point("af", 8));
}

TEST(HexTest, RandomRoundTrip) {
  Rng rng(11);
  for (std::size_t n : {1u, 3u, 63u, 64u, 65u, 200u}) {
    for (int rep = 0; rep < 20; ++rep) {
      BitVector v(n);
      rng.fill_bits(v.words(), n);
      ASSERT_EQ(hex::decode_point(hex::encode(v.span()), n), v);
    }
  }
}

TEST(PointSetTest, PushAndRead) {
  PointSet ps(70);
  BitVector a(70), b(70);
  a.set(69);
  b.set(3);
  ps.push_back(a);
  ps.push_back(b);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_TRUE(ps[0][69]);
  EXPECT_FALSE(ps[0][3]);
  EXPECT_TRUE(ps[1][3]);
  EXPECT_THROW(ps.push_back(BitVector(69)), DimensionMismatch);
}

TEST(RngTest, BelowIsUniformEnough) {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(RngTest, DeriveSeparatesLabels) {
  EXPECT_NE(derive(1, {0}), derive(1, {1}));
  EXPECT_NE(derive(1, {0, 1}), derive(1, {1, 0}));
  EXPECT_EQ(derive(9, {3, 4}), derive(9, {3, 4}));
}

}  // namespace
}  // namespace lcorr
