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

#include "lcorr/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace lcorr {
namespace {

using Type = Column::Type;

Report sample_report(std::size_t rows) {
  Report r;
  r.header = {{"schema", kReportSchema}, {"kind", "test"}, {"seed", 7}};
  r.columns = {{"id", Type::integer}, {"rate", Type::real}, {"ok", Type::boolean}, {"tag", Type::string}};
  for (std::size_t i = 0; i < rows; ++i) {
    nlohmann::ordered_json row;
    row["id"] = i;
    row["rate"] = 1.0 / static_cast<double>(i + 3);
    row["ok"] = i % 2 == 0;
    row["tag"] = "t" + std::to_string(i);
    r.rows.push_back(row);
  }
  return r;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lcorr_report_test_" + name)).string();
}

TEST(ReportTest, EmptyReportIsHeaderOnly) {
  const auto r = sample_report(0);
  EXPECT_EQ(line_count(emit_report_string(r, ReportFormat::jsonl)), 1u);
  EXPECT_EQ(line_count(emit_report_string(r, ReportFormat::csv)), 2u);
  EXPECT_EQ(parse_report_string(emit_report_string(r, ReportFormat::jsonl), ReportFormat::jsonl), r);
  EXPECT_EQ(parse_report_string(emit_report_string(r, ReportFormat::csv), ReportFormat::csv), r);
}

TEST(ReportTest, RoundTripBothFormats) {
  const auto r = sample_report(25);
  for (auto f : {ReportFormat::jsonl, ReportFormat::csv}) {
    const auto text = emit_report_string(r, f);
    const auto back = parse_report_string(text, f);
    EXPECT_EQ(back, r);
    EXPECT_EQ(emit_report_string(back, f), text);
  }
}

TEST(ReportTest, HundredRowsPlusHeader) {
  const auto r = sample_report(100);
  EXPECT_EQ(line_count(emit_report_string(r, ReportFormat::jsonl)), 101u);
  EXPECT_EQ(line_count(emit_report_string(r, ReportFormat::csv)), 102u);
}

TEST(ReportTest, StableFieldOrder) {
  const auto text = emit_report_string(sample_report(1), ReportFormat::jsonl);
  const auto first = text.substr(0, text.find('\n'));
  EXPECT_LT(first.find("\"schema\""), first.find("\"kind\""));
  EXPECT_LT(first.find("\"kind\""), first.find("\"columns\""));
  const auto csv = emit_report_string(sample_report(1), ReportFormat::csv);
  EXPECT_NE(csv.find("\nid,rate,ok,tag\n0,0.33333333333333331,true,t0\n"), std::string::npos);
}

TEST(ReportTest, FormatNames) {
  EXPECT_EQ(parse_report_format("jsonl"), ReportFormat::jsonl);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::csv);
  EXPECT_THROW(parse_report_format("json"), InvalidArgument);
}

TEST(ReportTest, MalformedInputRejected) {
  EXPECT_THROW(parse_report_string("", ReportFormat::jsonl), InvalidArgument);
  EXPECT_THROW(parse_report_string("{\"schema\":\"other/1\",\"columns\":[]}\n", ReportFormat::jsonl), InvalidArgument);
  EXPECT_THROW(parse_report_string("not json\n", ReportFormat::jsonl), InvalidArgument);
  auto csv = emit_report_string(sample_report(2), ReportFormat::csv);
  EXPECT_THROW(parse_report_string(csv.substr(2), ReportFormat::csv), InvalidArgument);
  EXPECT_THROW(parse_report_string(csv + "1,2\n", ReportFormat::csv), InvalidArgument);
  EXPECT_THROW(parse_report_string(csv + "1,x,true,t\n", ReportFormat::csv), InvalidArgument);
  EXPECT_THROW(parse_report_string(csv + "1,0.5,maybe,t\n", ReportFormat::csv), InvalidArgument);
}

TEST(ReportTest, CsvRejectsSeparatorsInStrings) {
  auto r = sample_report(1);
  r.rows[0]["tag"] = "a,b";
  EXPECT_THROW(emit_report_string(r, ReportFormat::csv), InvalidArgument);
  EXPECT_NO_THROW(emit_report_string(r, ReportFormat::jsonl));
}

TEST(ReportTest, FileRoundTrip) {
  const auto r = sample_report(10);
  const auto path = temp_path("roundtrip.csv");
  emit_report(r, ReportFormat::csv, path);
  EXPECT_EQ(load_report(path, ReportFormat::csv), r);
  std::filesystem::remove(path);
}

TEST(ReportTest, IoErrorsNameThePath) {
  const std::string missing = "/nonexistent-dir/lcorr/report.jsonl";
  try {
    emit_report(sample_report(1), ReportFormat::jsonl, missing);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(missing), std::string::npos);
  }
  try {
    load_report(missing, ReportFormat::jsonl);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(missing), std::string::npos);
  }
  const auto bad = temp_path("bad.jsonl");
  std::ofstream(bad) << "garbage\n";
  try {
    load_report(bad, ReportFormat::jsonl);
    FAIL() << "expected an error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find(bad), std::string::npos);
  }
  std::filesystem::remove(bad);
}

}  // namespace
}  // namespace lcorr
