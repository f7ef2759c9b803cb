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
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcorr/bits.hpp"
#include "lcorr/boolfn.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/influence.hpp"
#include "lcorr/oracle.hpp"
#include "lcorr/random.hpp"
#include "lcorr/sampling.hpp"

namespace lcorr {
// Constants of the correctors. The default profile (named "paper") uses:
// Constants of the correctors. The paper profile uses them verbatim:
//   junta parts per side s = 400 k^2, psf parts per side s = 100 k^2,
//   set-finder rounds ceil(12 k ln |I|), estimator (delta, eta) = (eps, 1/(20 r)),
//   removal threshold 3 eps with eps = 0.01, permutation samples 2500 ceil(k log2 k).
// A scaled profile divides the partition sizes and the permutation samples by
// its factor; it carries no correctness guarantee and is meant for smoke runs.
struct ConstantsProfile {
  std::string name = "paper";
  double factor = 1.0;
  double junta_parts_coeff = 400.0;
  double psf_parts_coeff = 100.0;
  double perm_samples_coeff = 2500.0;
  double set_finder_epsilon = 0.01;
  double threshold_multiplier = 3.0;

  static ConstantsProfile paper() { return {}; }

  static ConstantsProfile scaled(double factor) {
    if (!(factor >= 1.0)) throw InvalidArgument("scaled profile factor must be >= 1");
    ConstantsProfile p;
    p.name = "scaled";
    p.factor = factor;
    p.junta_parts_coeff /= factor;
    p.psf_parts_coeff /= factor;
    p.perm_samples_coeff /= factor;
    return p;
  }

  bool is_paper() const { return factor == 1.0; }

  // Parts per side for the junta corrector; kept even for balanced sampling.
  std::size_t junta_parts(std::size_t k) const {
    auto s = static_cast<std::size_t>(std::ceil(junta_parts_coeff * static_cast<double>(k * k)));
    s = std::max<std::size_t>(s, 2);
    return s + (s % 2);
  }

  std::size_t psf_parts(std::size_t k) const {
    return std::max<std::size_t>(static_cast<std::size_t>(std::ceil(psf_parts_coeff * static_cast<double>(k * k))), 1);
  }

  // 2500 ceil(k log2 k); zero for k <= 1, where S_k is trivial.
  std::size_t perm_samples(std::size_t k) const {
    if (k <= 1) return 0;
    const double klogk = std::ceil(static_cast<double>(k) * std::log2(static_cast<double>(k)) - 1e-9);
    return static_cast<std::size_t>(std::ceil(perm_samples_coeff * klogk));
  }

  // Largest k whose permutation scan fits: 8 for the default profile, otherwise
  // k! * samples must stay under 4e9 core evaluations.
  void check_perm_budget(std::size_t k) const {
    if (is_paper()) {
      if (k > 8) throw CapacityExceeded("permutation scan over S_" + std::to_string(k) + " exceeds the k <= 8 cap");
      return;
    }
    double cost = static_cast<double>(perm_samples(k));
    for (std::size_t i = 2; i <= k; ++i) cost *= static_cast<double>(i);
    if (cost > 4e9) throw CapacityExceeded("permutation scan over S_" + std::to_string(k) + " exceeds the budget");
  }
};

inline std::size_t set_finder_rounds(std::size_t k, std::size_t parts) {
  return static_cast<std::size_t>(std::ceil(12.0 * static_cast<double>(k) * std::log(static_cast<double>(parts))));
}

enum class SetMeasure { influence, symmetric_influence };

// Find-Influencing-Sets / Find-Asymmetric-Sets. Every round picks T with each
// block included with probability 1/k, estimates the (symmetric) influence of
// the union with (delta, eta) = (eps, 1/(20 r)), and discards T when the
// estimate is at most 3 eps. The query plan is fixed at construction.
class SetFinder {
 public:
  SetFinder(SetMeasure measure, const Partition& p, std::size_t k, double eps, std::uint64_t seed,
            double threshold_multiplier = 3.0)
      : measure_(measure),
        blocks_(p.block_count()),
        rounds_(0),
        params_(eps, 0.5),
        threshold_(threshold_multiplier * eps),
        seed_(seed) {
    if (k == 0) throw InvalidArgument("set finder needs k >= 1");
    if (p.block_count() <= 5) throw InvalidArgument("set finder needs more than 5 blocks");
    rounds_ = set_finder_rounds(k, blocks_);
    params_ = EstimatorParams(eps, 1.0 / (20.0 * static_cast<double>(rounds_)));
    // k = 1 would include every block in every round; 1/2 keeps the round
    // structure meaningful.
    const std::uint64_t inv_p = std::max<std::size_t>(k, 2);
    subsets_.resize(rounds_);
    Rng rng(derive(seed, {stream::kSubsets}));
    for (std::size_t r = 0; r < rounds_; ++r) {
      std::vector<std::size_t> nonempty;
      for (std::size_t b = 0; b < blocks_; ++b) {
        if (rng.below(inv_p) == 0) {
          subsets_[r].push_back(static_cast<std::uint32_t>(b));
          if (!p.block(b).empty()) nonempty.push_back(b);
        }
      }
      unions_.push_back(p.union_of(nonempty));
    }
  }

  std::size_t rounds() const { return rounds_; }
  const EstimatorParams& params() const { return params_; }
  std::size_t queries() const { return rounds_ * params_.queries(); }
  const std::vector<std::uint32_t>& subset(std::size_t round) const { return subsets_[round]; }

  // Adds one estimator segment per round.
  void append_to(QueryPlan& plan) {
    first_segment_ = plan.segments();
    for (std::size_t r = 0; r < rounds_; ++r) {
      const std::uint64_t s = derive(seed_, {stream::kRounds, r});
      if (measure_ == SetMeasure::influence) {
        plan.add(std::make_shared<InfluenceRounds>(unions_[r], params_.rounds(), s));
      } else {
        plan.add(std::make_shared<SymmetricInfluenceRounds>(unions_[r], params_.rounds(), s));
      }
    }
  }

  // Per-round estimates from the batch answers.
  std::vector<double> estimates(const QueryPlan& plan, std::span<const std::uint8_t> answers) const {
    std::vector<double> out(rounds_);
    for (std::size_t r = 0; r < rounds_; ++r) out[r] = disagreement_rate(plan.answers_for(answers, first_segment_ + r));
    return out;
  }

  // Surviving block ids, ascending.
  std::vector<std::size_t> finish(const QueryPlan& plan, std::span<const std::uint8_t> answers) const {
    std::vector<bool> alive(blocks_, true);
    const auto est = estimates(plan, answers);
    for (std::size_t r = 0; r < rounds_; ++r) {
      if (est[r] <= threshold_) {
        for (auto b : subsets_[r]) alive[b] = false;
      }
    }
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < blocks_; ++b) {
      if (alive[b]) out.push_back(b);
    }
    return out;
  }

 private:
  SetMeasure measure_;
  std::size_t blocks_;
  std::size_t rounds_;
  EstimatorParams params_;
  double threshold_;
  std::uint64_t seed_;
  std::size_t first_segment_ = 0;
  std::vector<std::vector<std::uint32_t>> subsets_;
  std::vector<VarSet> unions_;
};

namespace detail {

inline std::vector<std::size_t> run_set_finder(SetMeasure measure, Oracle& oracle, const Partition& p, std::size_t k,
                                               double eps, std::uint64_t seed) {
  if (p.dims() != oracle.dims()) throw DimensionMismatch("set finder", oracle.dims(), p.dims());
  SetFinder finder(measure, p, k, eps, seed);
  QueryPlan plan(oracle.dims());
  finder.append_to(plan);
  const auto answers = oracle.batch(plan);
  return finder.finish(plan, answers);
}

}  // namespace detail

// Block ids of p the estimator could not rule out as influential.
inline std::vector<std::size_t> find_influencing_sets(Oracle& oracle, const Partition& p, std::size_t k, double eps,
                                                      std::uint64_t seed) {
  return detail::run_set_finder(SetMeasure::influence, oracle, p, k, eps, seed);
}

// Block ids of p the estimator could not rule out as asymmetric.
inline std::vector<std::size_t> find_asymmetric_sets(Oracle& oracle, const Partition& p, std::size_t k, double eps,
                                                     std::uint64_t seed) {
  return detail::run_set_finder(SetMeasure::symmetric_influence, oracle, p, k, eps, seed);
}

struct CorrectionTrace {
  enum class Exit {
    corrected,          // a permutation was chosen
    trivial,            // k = 0: the core alone determines the answer
    wrong_block_count,  // set finder returned != k blocks
    empty_block,        // set finder returned an empty block
    workspace_block,    // set finder returned the workspace
  };

  Partition partition;
  std::vector<std::size_t> found_blocks;
  std::vector<std::uint32_t> representatives;
  std::vector<std::uint64_t> scores;  // per permutation of [k], lexicographic order
  std::vector<std::uint32_t> chosen;  // chosen[j] = index into representatives feeding core input j
  std::size_t set_finder_rounds = 0;
  std::size_t set_finder_queries = 0;
  std::size_t samples = 0;
  std::uint64_t query_count = 0;
  Exit exit = Exit::corrected;
  bool output = false;
};

inline const char* to_string(CorrectionTrace::Exit e) {
  switch (e) {
    case CorrectionTrace::Exit::corrected: return "corrected";
    case CorrectionTrace::Exit::trivial: return "trivial";
    case CorrectionTrace::Exit::wrong_block_count: return "wrong-block-count";
    case CorrectionTrace::Exit::empty_block: return "empty-block";
    case CorrectionTrace::Exit::workspace_block: return "workspace-block";
  }
  return "?";
}

struct CorrectionResult {
  bool value = false;
  CorrectionTrace trace;
};

namespace detail {

inline std::uint64_t pattern_at(BitSpan y, std::span<const std::uint32_t> positions) {
  std::uint64_t z = 0;
  for (std::size_t j = 0; j < positions.size(); ++j) z |= static_cast<std::uint64_t>(y[positions[j]]) << j;
  return z;
}

// Maps a pattern read at B (bit i = y_{b_i}) to the core input for B_pi
// (bit j = y_{b_{pi(j)}}).
inline std::uint64_t permute_pattern(std::uint64_t pattern, std::span<const std::uint32_t> pi) {
  std::uint64_t z = 0;
  for (std::size_t j = 0; j < pi.size(); ++j) z |= ((pattern >> pi[j]) & 1u) << j;
  return z;
}

// Runs the plan in one batch, then scores every permutation over the sample
// segment. `classify(point)` returns the histogram cell of a sample and
// `agrees(pi, cell, answer)` whether the core under pi matches the answer.
template <typename Cell, typename Agree>
void scan_permutations(std::size_t k, const QuerySource& samples, std::span<const std::uint8_t> answers,
                       std::size_t cells, Cell&& cell_of, Agree&& agrees, CorrectionTrace& trace) {
  std::vector<std::uint64_t> hist(2 * cells, 0);
  PointSet chunk(samples.dims());
  constexpr std::size_t kChunk = 4096;
  for (std::size_t first = 0; first < samples.size(); first += kChunk) {
    chunk.resize(std::min(kChunk, samples.size() - first));
    samples.fill(first, chunk);
    for (std::size_t i = 0; i < chunk.size(); ++i) ++hist[2 * cell_of(chunk[i]) + answers[first + i]];
  }
  std::vector<std::uint32_t> pi(k);
  std::iota(pi.begin(), pi.end(), 0u);
  std::uint64_t best = 0;
  bool have_best = false;
  do {
    std::uint64_t score = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      for (unsigned a = 0; a < 2; ++a) {
        if (hist[2 * c + a] != 0 && agrees(std::span<const std::uint32_t>(pi), c, a)) score += hist[2 * c + a];
      }
    }
    trace.scores.push_back(score);
    // Strict comparison: the lexicographically smallest maximizer wins.
    if (!have_best || score > best) {
      best = score;
      have_best = true;
      trace.chosen = pi;
    }
  } while (std::next_permutation(pi.begin(), pi.end()));
}

inline std::vector<std::uint32_t> representatives_of(const Partition& p, std::span<const std::size_t> blocks) {
  std::vector<std::uint32_t> reps;
  for (auto b : blocks) reps.push_back(p.block(b).front());
  return reps;
}

}  // namespace detail

// Locally-Correct-Junta: estimates f_sigma(x) from queries to g, where g is
// promised to be close to an isomorphic copy f_sigma of the junta with the
// given core. All queries go out in one batch.
inline CorrectionResult locally_correct_junta(const JuntaCore& core, Oracle& oracle, BitSpan x,
                                              const ConstantsProfile& profile, std::uint64_t seed) {
  const std::size_t n = oracle.dims();
  const std::size_t k = core.arity();
  if (x.n != n) throw DimensionMismatch("locally_correct_junta", n, x.n);
  if (k > n) throw InvalidArgument("junta core has more variables than the oracle");
  profile.check_perm_budget(k);
  CorrectionResult result;
  CorrectionTrace& trace = result.trace;
  const std::uint64_t count_before = oracle.query_count();
  if (k == 0) {
    trace.exit = CorrectionTrace::Exit::trivial;
    result.value = trace.output = core[0];
    return result;
  }

  // Split [n] by the bits of x and partition each side into s parts.
  const std::size_t s = profile.junta_parts(k);
  std::vector<std::uint32_t> side[2];
  for (std::uint32_t i = 0; i < n; ++i) side[x[i]].push_back(i);
  Rng part_rng(derive(seed, {stream::kPartition}));
  const Partition p0 = random_partition(VarSet(n, side[0]), s, part_rng);
  const Partition p1 = random_partition(VarSet(n, side[1]), s, part_rng);
  trace.partition = Partition::join(p0, p1);

  SetFinder finder(SetMeasure::influence, trace.partition, k, profile.set_finder_epsilon,
                   derive(seed, {stream::kRounds}), profile.threshold_multiplier);
  const std::size_t r = profile.perm_samples(k);
  auto samples = std::make_shared<SampleSource<MergedSampler>>(std::make_shared<MergedSampler>(p0, p1), r,
                                                               derive(seed, {stream::kSamples}));
  QueryPlan plan(n);
  finder.append_to(plan);
  const std::size_t sample_segment = plan.add(samples);
  const auto answers = oracle.batch(plan);
  trace.set_finder_rounds = finder.rounds();
  trace.set_finder_queries = finder.queries();
  trace.samples = r;
  trace.query_count = oracle.query_count() - count_before;

  trace.found_blocks = finder.finish(plan, answers);
  if (trace.found_blocks.size() != k) {
    trace.exit = CorrectionTrace::Exit::wrong_block_count;
    return result;
  }
  for (auto b : trace.found_blocks) {
    if (trace.partition.block(b).empty()) {
      trace.exit = CorrectionTrace::Exit::empty_block;
      return result;
    }
  }
  trace.representatives = detail::representatives_of(trace.partition, trace.found_blocks);
  const auto& reps = trace.representatives;

  detail::scan_permutations(
      k, *samples, plan.answers_for(answers, sample_segment), std::size_t{1} << k,
      [&](BitSpan y) { return detail::pattern_at(y, reps); },
      [&](std::span<const std::uint32_t> pi, std::size_t pattern, unsigned a) {
        return core[detail::permute_pattern(pattern, pi)] == (a != 0);
      },
      trace);

  result.value = trace.output = core[detail::permute_pattern(detail::pattern_at(x, reps), trace.chosen)];
  return result;
}

// Locally-Correct-Partially-Symmetric-Function for an (n-k)-symmetric target
// with the given core.
inline CorrectionResult locally_correct_psf(const PsfCore& core, Oracle& oracle, BitSpan x,
                                            const ConstantsProfile& profile, std::uint64_t seed) {
  const std::size_t n = oracle.dims();
  const std::size_t k = core.arity();
  if (x.n != n) throw DimensionMismatch("locally_correct_psf", n, x.n);
  if (k + core.symmetric_count() != n) throw DimensionMismatch("psf core", n, k + core.symmetric_count());
  profile.check_perm_budget(k);
  CorrectionResult result;
  CorrectionTrace& trace = result.trace;
  const std::uint64_t count_before = oracle.query_count();
  if (k == 0) {
    trace.exit = CorrectionTrace::Exit::trivial;
    result.value = trace.output = core(0, x.weight());
    return result;
  }

  const std::size_t s = profile.psf_parts(k);
  Rng part_rng(derive(seed, {stream::kPartition}));
  std::vector<std::uint32_t> workspace;
  std::vector<std::uint32_t> side[2];
  for (std::uint32_t i = 0; i < n; ++i) {
    if (part_rng.below(2 * s + 1) == 0) {
      workspace.push_back(i);
    } else {
      side[x[i]].push_back(i);
    }
  }
  const Partition p0 = random_partition(VarSet(n, side[0]), s, part_rng);
  const Partition p1 = random_partition(VarSet(n, side[1]), s, part_rng);
  trace.partition = Partition::join(p0, p1, workspace);
  const std::size_t ws_block = *trace.partition.workspace();

  SetFinder finder(SetMeasure::symmetric_influence, trace.partition, k, profile.set_finder_epsilon,
                   derive(seed, {stream::kRounds}), profile.threshold_multiplier);
  const std::size_t r = profile.perm_samples(k);
  auto samples = std::make_shared<SampleSource<WorkspaceSampler>>(
      std::make_shared<WorkspaceSampler>(trace.partition), r, derive(seed, {stream::kSamples}));
  QueryPlan plan(n);
  finder.append_to(plan);
  const std::size_t sample_segment = plan.add(samples);
  const auto answers = oracle.batch(plan);
  trace.set_finder_rounds = finder.rounds();
  trace.set_finder_queries = finder.queries();
  trace.samples = r;
  trace.query_count = oracle.query_count() - count_before;

  trace.found_blocks = finder.finish(plan, answers);
  if (trace.found_blocks.size() != k) {
    trace.exit = CorrectionTrace::Exit::wrong_block_count;
    return result;
  }
  for (auto b : trace.found_blocks) {
    if (b == ws_block) {
      trace.exit = CorrectionTrace::Exit::workspace_block;
      return result;
    }
    if (trace.partition.block(b).empty()) {
      trace.exit = CorrectionTrace::Exit::empty_block;
      return result;
    }
  }
  trace.representatives = detail::representatives_of(trace.partition, trace.found_blocks);
  const auto& reps = trace.representatives;
  const std::size_t m = core.symmetric_count();
  const std::size_t patterns = std::size_t{1} << k;

  // Cell = (pattern at B, weight outside B).
  detail::scan_permutations(
      k, *samples, plan.answers_for(answers, sample_segment), patterns * (m + 1),
      [&](BitSpan y) {
        const std::uint64_t z = detail::pattern_at(y, reps);
        return (y.weight() - static_cast<std::size_t>(std::popcount(z))) * patterns + z;
      },
      [&](std::span<const std::uint32_t> pi, std::size_t cell, unsigned a) {
        return core(detail::permute_pattern(cell % patterns, pi), cell / patterns) == (a != 0);
      },
      trace);

  const std::uint64_t zx = detail::pattern_at(x, reps);
  result.value = trace.output =
      core(detail::permute_pattern(zx, trace.chosen), x.weight() - static_cast<std::size_t>(std::popcount(zx)));
  return result;
}

}  // namespace lcorr
