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

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lcorr/errors.hpp"

namespace lcorr::stats {

// One-sided Clopper-Pearson lower confidence bound on a binomial proportion.
inline double clopper_pearson_lower(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95) {
  if (trials == 0 || successes == 0) return 0.0;
  const double alpha = 1.0 - confidence;
  return boost::math::ibeta_inv(static_cast<double>(successes), static_cast<double>(trials - successes + 1), alpha);
}

// One-sided Clopper-Pearson upper confidence bound.
inline double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95) {
  if (trials == 0 || successes == trials) return 1.0;
  const double alpha = 1.0 - confidence;
  return boost::math::ibeta_inv(static_cast<double>(successes + 1), static_cast<double>(trials - successes),
                                1.0 - alpha);
}

// Upper-tail probability of the chi-square distribution.
inline double chi_square_sf(double statistic, double dof) {
  if (dof <= 0) throw InvalidArgument("chi-square needs positive degrees of freedom");
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

struct ChiSquare {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

// Pearson goodness of fit; cells with zero expectation must have zero count.
inline ChiSquare chi_square(std::span<const std::uint64_t> observed, std::span<const double> expected) {
  if (observed.size() != expected.size()) throw InvalidArgument("chi-square needs matching cell counts");
  ChiSquare r;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) {
      if (observed[i] != 0) return {std::numeric_limits<double>::infinity(), 0.0, 0.0};
      continue;
    }
    const double d = static_cast<double>(observed[i]) - expected[i];
    r.statistic += d * d / expected[i];
    ++cells;
  }
  r.dof = static_cast<double>(cells) - 1.0;
  r.p_value = cells < 2 ? 1.0 : chi_square_sf(r.statistic, r.dof);
  return r;
}

// Two-sided pooled two-proportion z-test; returns the p-value.
inline double two_proportion_p_value(std::uint64_t s1, std::uint64_t n1, std::uint64_t s2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw InvalidArgument("two-proportion test needs nonempty samples");
  const double p1 = static_cast<double>(s1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(s2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(s1 + s2) / static_cast<double>(n1 + n2);
  const double var = pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
  if (var <= 0.0) return p1 == p2 ? 1.0 : 0.0;
  const double z = std::abs(p1 - p2) / std::sqrt(var);
  return std::erfc(z / std::sqrt(2.0));
}

}  // namespace lcorr::stats
