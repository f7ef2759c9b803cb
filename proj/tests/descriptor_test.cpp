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

#include "lcorr/descriptor.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

namespace lcorr {
namespace {

void expect_round_trip(const FunctionDescriptor& d) {
  const auto text = emit_descriptor(d);
  const auto back = parse_descriptor(text);
  EXPECT_EQ(back, d);
  EXPECT_EQ(emit_descriptor(back), text);
}

TEST(DescriptorTest, RoundTripsEveryKind) {
  Rng rng(1);
  expect_round_trip({FunctionView::table(TruthTable::random(7, rng)), std::nullopt});
  expect_round_trip({FunctionView::junta(JuntaCore::random(3, rng), {9, 0, 4}, 12), Isomorphism::random(12, rng)});
  expect_round_trip({FunctionView::psf(PsfCore::random(2, 9, rng), {3, 1}, 11), std::nullopt});
  expect_round_trip({FunctionView::constant(5, true), std::nullopt});
}

TEST(DescriptorTest, TableHexFollowsEntryOrder) {
  // AND of two variables: only entry 3 is set, i.e. bit 3 of the first digit.
  const auto f = FunctionView::junta(JuntaCore::from(2, [](std::uint64_t z) { return z == 3; }), {4, 1}, 8);
  const auto j = to_json({f, std::nullopt});
  EXPECT_EQ(j.at("table"), "8");
  EXPECT_EQ(j.at("kind"), "junta");
  EXPECT_EQ(j.at("positions"), nlohmann::json::array({4, 1}));
}

TEST(DescriptorTest, ResolveAppliesSigma) {
  Rng rng(2);
  const auto f = FunctionView::junta(JuntaCore::random(2, rng), {0, 1}, 5);
  const auto sigma = Isomorphism::random(5, rng);
  const FunctionDescriptor d{f, sigma};
  EXPECT_EQ(distance(d.resolve(), apply_isomorphism(f, sigma)), 0.0);
}

TEST(DescriptorTest, RejectsBadInput) {
  EXPECT_THROW(parse_descriptor("{"), InvalidArgument);
  EXPECT_THROW(parse_descriptor(R"({"kind":"cube","n":2,"table":"0"})"), InvalidArgument);
  EXPECT_THROW(parse_descriptor(R"({"kind":"table","n":2,"table":"00"})"), InvalidArgument);
  EXPECT_THROW(parse_descriptor(R"({"kind":"junta","n":4,"k":1,"table":"2","positions":[7]})"), InvalidArgument);
  EXPECT_THROW(parse_descriptor(R"({"kind":"table","n":2,"table":"0","sigma":[0,1,2]})"), DimensionMismatch);
  EXPECT_THROW(parse_descriptor(R"({"format":"other/9","kind":"table","n":2,"table":"0"})"), InvalidArgument);
}

TEST(DescriptorTest, FileRoundTripAndMissingPath) {
  const auto path = std::filesystem::temp_directory_path() / "lcorr_descriptor_test.json";
  Rng rng(3);
  const FunctionDescriptor d{FunctionView::psf(PsfCore::random(1, 4, rng), {2}, 5), Isomorphism::random(5, rng)};
  save_descriptor(path.string(), d);
  EXPECT_EQ(load_descriptor(path.string()), d);
  std::filesystem::remove(path);
  try {
    load_descriptor(path.string());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
}

}  // namespace
}  // namespace lcorr
