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

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lcorr/bits.hpp"
#include "lcorr/boolfn.hpp"

namespace lcorr {

// Textual function descriptor:
//
//   {"format": "lcorr-function/1", "kind": "junta", "n": 8, "k": 2,
//    "table": "8", "positions": [4, 1], "sigma": [...]}
//
// "table" is the hex stream of the explicit/core table (entry i is bit i, see
// hex::encode). Variables and positions are 0-based; variable 0 is the
// least-significant bit of a table index. "k" and "positions" are omitted for
// explicit tables, "sigma" is optional.
struct FunctionDescriptor {
  FunctionView function;
  std::optional<Isomorphism> sigma;

  // The described function with sigma applied, if present.
  FunctionView resolve() const { return sigma ? apply_isomorphism(function, *sigma) : function; }

  friend bool operator==(const FunctionDescriptor&, const FunctionDescriptor&) = default;
};

inline constexpr const char* kFunctionFormat = "lcorr-function/1";

inline nlohmann::ordered_json to_json(const FunctionDescriptor& d) {
  const FunctionView& f = d.function;
  nlohmann::ordered_json j;
  j["format"] = kFunctionFormat;
  switch (f.kind()) {
    case FunctionView::Kind::table:
      j["kind"] = "table";
      j["n"] = f.dims();
      j["table"] = hex::encode(f.truth_table().words(), f.truth_table().entries());
      break;
    case FunctionView::Kind::junta:
      j["kind"] = "junta";
      j["n"] = f.dims();
      j["k"] = f.junta_core().arity();
      j["table"] = hex::encode(f.junta_core().words(), f.junta_core().entries());
      j["positions"] = f.positions();
      break;
    case FunctionView::Kind::psf:
      j["kind"] = "psf";
      j["n"] = f.dims();
      j["k"] = f.psf_core().arity();
      j["table"] = hex::encode(f.psf_core().words(), f.psf_core().entries());
      j["positions"] = f.positions();
      break;
  }
  if (d.sigma) j["sigma"] = d.sigma->perm();
  return j;
}

inline FunctionDescriptor descriptor_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("format") && j.at("format").get<std::string>() != kFunctionFormat) {
      throw InvalidArgument("unsupported function format '" + j.at("format").get<std::string>() + "'");
    }
    const auto kind = j.at("kind").get<std::string>();
    const auto n = j.at("n").get<std::size_t>();
    const auto table = j.at("table").get<std::string>();
    FunctionDescriptor d;
    if (kind == "table") {
      detail::check_table_vars(n, "descriptor");
      d.function = FunctionView::table(TruthTable(n, hex::decode(table, std::size_t{1} << n)));
    } else if (kind == "junta" || kind == "psf") {
      const auto k = j.at("k").get<std::size_t>();
      auto positions = j.at("positions").get<std::vector<std::uint32_t>>();
      detail::check_table_vars(k, "descriptor core");
      if (kind == "junta") {
        d.function = FunctionView::junta(JuntaCore(k, hex::decode(table, std::size_t{1} << k)), std::move(positions), n);
      } else {
        if (k > n) throw InvalidArgument("psf descriptor has k > n");
        const std::size_t m = n - k;
        d.function = FunctionView::psf(PsfCore(k, m, hex::decode(table, (std::size_t{1} << k) * (m + 1))),
                                       std::move(positions), n);
      }
    } else {
      throw InvalidArgument("unknown function kind '" + kind + "'");
    }
    if (j.contains("sigma")) {
      d.sigma = Isomorphism(j.at("sigma").get<std::vector<std::uint32_t>>());
      if (d.sigma->size() != n) throw DimensionMismatch("descriptor sigma", n, d.sigma->size());
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed function descriptor: ") + e.what());
  }
}

inline std::string emit_descriptor(const FunctionDescriptor& d) { return to_json(d).dump(2) + "\n"; }

inline FunctionDescriptor parse_descriptor(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("function descriptor is not valid JSON: ") + e.what());
  }
  return descriptor_from_json(j);
}

inline void save_descriptor(const std::string& path, const FunctionDescriptor& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << emit_descriptor(d);
  if (!out) throw Error("failed writing '" + path + "'");
}

inline FunctionDescriptor load_descriptor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open function descriptor '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_descriptor(ss.str());
  } catch (const Error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

}  // namespace lcorr
