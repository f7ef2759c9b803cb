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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcorr/errors.hpp"

namespace lcorr {

inline constexpr const char* kReportSchema = "lcorr-report/1";

enum class ReportFormat { jsonl, csv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "jsonl") return ReportFormat::jsonl;
  if (s == "csv") return ReportFormat::csv;
  throw InvalidArgument("unknown report format '" + s + "' (expected jsonl or csv)");
}

struct Column {
  enum class Type { integer, real, boolean, string };
  std::string name;
  Type type;

  friend bool operator==(const Column&, const Column&) = default;
};

// Machine-readable report: one header object (schema, kind, run metadata)
// followed by one row per record with a fixed column order.
//
// jsonl: line 1 is the header object with a "columns" array added; every
//        further line is one row object.
// csv:   line 1 is "# " + the same header object; line 2 the column names;
//        every further line is one row.
struct Report {
  nlohmann::ordered_json header;
  std::vector<Column> columns;
  std::vector<nlohmann::ordered_json> rows;

  friend bool operator==(const Report&, const Report&) = default;
};

namespace detail {

inline const char* type_name(Column::Type t) {
  switch (t) {
    case Column::Type::integer: return "integer";
    case Column::Type::real: return "real";
    case Column::Type::boolean: return "boolean";
    case Column::Type::string: return "string";
  }
  return "?";
}

inline Column::Type type_from_name(const std::string& s) {
  if (s == "integer") return Column::Type::integer;
  if (s == "real") return Column::Type::real;
  if (s == "boolean") return Column::Type::boolean;
  if (s == "string") return Column::Type::string;
  throw InvalidArgument("unknown report column type '" + s + "'");
}

inline nlohmann::ordered_json header_with_columns(const Report& r) {
  nlohmann::ordered_json h = r.header;
  auto cols = nlohmann::ordered_json::array();
  for (const auto& c : r.columns) cols.push_back({{"name", c.name}, {"type", type_name(c.type)}});
  h["columns"] = cols;
  return h;
}

inline std::string csv_cell(const nlohmann::ordered_json& v, Column::Type t) {
  switch (t) {
    case Column::Type::integer:
      return v.dump();
    case Column::Type::real: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      return buf;
    }
    case Column::Type::boolean:
      return v.get<bool>() ? "true" : "false";
    case Column::Type::string: {
      auto s = v.get<std::string>();
      if (s.find_first_of(",\"\n") != std::string::npos) throw InvalidArgument("csv cell contains a separator: " + s);
      return s;
    }
  }
  return {};
}

inline nlohmann::ordered_json csv_value(const std::string& cell, Column::Type t) {
  switch (t) {
    case Column::Type::integer:
      return nlohmann::ordered_json::parse(cell);
    case Column::Type::real:
      return std::stod(cell);
    case Column::Type::boolean:
      if (cell == "true") return true;
      if (cell == "false") return false;
      throw InvalidArgument("bad boolean cell '" + cell + "'");
    case Column::Type::string:
      return cell;
  }
  return {};
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline std::string emit_report_string(const Report& r, ReportFormat format) {
  std::string out;
  const auto header = detail::header_with_columns(r);
  if (format == ReportFormat::jsonl) {
    out += header.dump() + "\n";
    for (const auto& row : r.rows) out += row.dump() + "\n";
    return out;
  }
  out += "# " + header.dump() + "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + r.columns[i].name;
  out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
      out += (i ? "," : "") + detail::csv_cell(row.at(r.columns[i].name), r.columns[i].type);
    }
    out += "\n";
  }
  return out;
}

inline Report parse_report_string(const std::string& text, ReportFormat format) {
  std::istringstream in(text);
  std::string line;
  Report r;
  try {
    if (!std::getline(in, line)) throw InvalidArgument("report is empty");
    if (format == ReportFormat::csv) {
      if (line.rfind("# ", 0) != 0) throw InvalidArgument("csv report must start with a '# ' header line");
      line = line.substr(2);
    }
    r.header = nlohmann::ordered_json::parse(line);
    if (r.header.value("schema", "") != kReportSchema) throw InvalidArgument("unsupported report schema");
    for (const auto& c : r.header.at("columns")) {
      r.columns.push_back({c.at("name").get<std::string>(), detail::type_from_name(c.at("type").get<std::string>())});
    }
    r.header.erase("columns");
    if (format == ReportFormat::csv) {
      if (!std::getline(in, line)) throw InvalidArgument("csv report lacks a column row");
      const auto names = detail::split_csv(line);
      if (names.size() != r.columns.size()) throw InvalidArgument("csv column row does not match the header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (format == ReportFormat::jsonl) {
        r.rows.push_back(nlohmann::ordered_json::parse(line));
        continue;
      }
      const auto cells = detail::split_csv(line);
      if (cells.size() != r.columns.size()) throw InvalidArgument("csv row has the wrong number of cells");
      nlohmann::ordered_json row;
      for (std::size_t i = 0; i < cells.size(); ++i) row[r.columns[i].name] = detail::csv_value(cells[i], r.columns[i].type);
      r.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InvalidArgument(std::string("malformed report cell: ") + e.what());
  }
  return r;
}

inline void emit_report(const Report& r, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open report '" + path + "' for writing");
  out << emit_report_string(r, format);
  out.flush();
  if (!out) throw Error("failed writing report '" + path + "'");
}

inline Report load_report(const std::string& path, ReportFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open report '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_report_string(ss.str(), format);
  } catch (const Error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

}  // namespace lcorr
