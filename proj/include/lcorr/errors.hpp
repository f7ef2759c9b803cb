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

#include <stdexcept>
#include <string>

namespace lcorr {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two objects disagree on the number of variables.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected, std::size_t got)
      : Error(what + ": expected n=" + std::to_string(expected) + ", got n=" + std::to_string(got)) {}
};

// A request exceeds a hard size limit (explicit tables, permutation scans, ...).
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

// Oracle access that violates the batch discipline.
class PhaseViolation : public Error {
 public:
  using Error::Error;
};

// Malformed argument or input file.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace lcorr
