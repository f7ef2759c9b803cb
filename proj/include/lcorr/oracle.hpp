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
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lcorr/bits.hpp"
#include "lcorr/boolfn.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/random.hpp"

namespace lcorr {

// How the noisy copy g of f_sigma is produced.
struct NoiseSpec {
  enum class Mode {
    exact_fraction,  // flip exactly floor(eps * 2^n) distinct uniform points; n <= 24
    procedural,      // flip x iff keyed-hash(seed, x) < eps * 2^64; any n
    adversarial,     // flip exactly the listed points
  };

  double epsilon = 0.0;
  Mode mode = Mode::procedural;
  std::uint64_t seed = 0;
  std::vector<BitVector> flips;

  static NoiseSpec none() { return {}; }
  static NoiseSpec exact_fraction(double eps, std::uint64_t seed) { return {eps, Mode::exact_fraction, seed, {}}; }
  static NoiseSpec procedural(double eps, std::uint64_t seed) { return {eps, Mode::procedural, seed, {}}; }
  static NoiseSpec adversarial(std::vector<BitVector> points) { return {0.0, Mode::adversarial, 0, std::move(points)}; }
};

inline const char* to_string(NoiseSpec::Mode m) {
  switch (m) {
    case NoiseSpec::Mode::exact_fraction: return "exact";
    case NoiseSpec::Mode::procedural: return "procedural";
    case NoiseSpec::Mode::adversarial: return "adversarial";
  }
  return "?";
}

// One hex-encoded point per line; blank lines and '#' comments are skipped.
inline std::vector<BitVector> load_flip_list(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open flip list '" + path + "'");
  std::vector<BitVector> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
    if (line.empty() || line[0] == '#') continue;
    try {
      points.push_back(hex::decode_point(line, n));
    } catch (const Error& e) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return points;
}

// The corrupted function g = f_sigma XOR flip. Immutable; shared by every
// oracle handle that queries it.
class NoisyFunction {
 public:
  NoisyFunction(FunctionView target, const NoiseSpec& noise) : target_(std::move(target)), mode_(noise.mode) {
    const std::size_t n = target_.dims();
    if (!(noise.epsilon >= 0.0 && noise.epsilon < 1.0)) throw InvalidArgument("noise rate must lie in [0, 1)");
    epsilon_ = noise.epsilon;
    switch (noise.mode) {
      case NoiseSpec::Mode::exact_fraction: {
        if (n > kMaxTableVars) {
          throw CapacityExceeded("exact-fraction noise needs an explicit flip table; n=" + std::to_string(n) +
                                 " exceeds " + std::to_string(kMaxTableVars));
        }
        const std::uint64_t total = std::uint64_t{1} << n;
        const auto count = static_cast<std::uint64_t>(std::floor(noise.epsilon * static_cast<double>(total)));
        flip_table_ = std::make_shared<TruthTable>(n);
        // Floyd's algorithm: count distinct uniform indices.
        Rng rng(noise.seed);
        for (std::uint64_t j = total - count; j < total; ++j) {
          const std::uint64_t t = rng.below(j + 1);
          flip_table_->set((*flip_table_)[t] ? j : t, true);
        }
        flipped_ = count;
        break;
      }
      case NoiseSpec::Mode::procedural:
        key_ = mix64(noise.seed ^ 0x6e6f697365ULL);
        threshold_ = noise.epsilon <= 0.0 ? 0
                                          : static_cast<std::uint64_t>(std::min(
                                                std::ldexp(noise.epsilon, 64), 18446744073709549568.0));
        break;
      case NoiseSpec::Mode::adversarial:
        for (const auto& p : noise.flips) {
          if (p.size() != n) throw DimensionMismatch("adversarial flip point", n, p.size());
          flip_set_.insert(std::vector<std::uint64_t>(p.words().begin(), p.words().end()));
        }
        flipped_ = flip_set_.size();
        break;
    }
  }

  std::size_t dims() const { return target_.dims(); }
  const FunctionView& target() const { return target_; }
  NoiseSpec::Mode mode() const { return mode_; }
  double epsilon() const { return epsilon_; }

  // Number of corrupted points, for the exact-fraction and adversarial modes.
  std::uint64_t flipped_points() const { return flipped_; }

  bool flipped(BitSpan x) const {
    switch (mode_) {
      case NoiseSpec::Mode::exact_fraction:
        return (*flip_table_)[x.index()];
      case NoiseSpec::Mode::procedural: {
        if (threshold_ == 0) return false;
        std::uint64_t h = key_;
        for (auto w : x.words) h = mix64(h ^ w);
        return h < threshold_;
      }
      case NoiseSpec::Mode::adversarial:
        return !flip_set_.empty() && flip_set_.count(std::vector<std::uint64_t>(x.words.begin(), x.words.end())) > 0;
    }
    return false;
  }

  // Uncounted evaluation of g.
  bool operator()(BitSpan x) const {
    if (x.n != dims()) throw DimensionMismatch("NoisyFunction", dims(), x.n);
    return target_.eval_unchecked(x) != flipped(x);
  }

  void evaluate(const PointSet& points, std::span<std::uint8_t> out) const {
    target_.evaluate(points, out);
    if (mode_ == NoiseSpec::Mode::procedural && threshold_ == 0) return;
    for (std::size_t i = 0; i < points.size(); ++i) out[i] ^= flipped(points[i]) ? 1 : 0;
  }

 private:
  FunctionView target_;
  NoiseSpec::Mode mode_;
  double epsilon_ = 0.0;
  std::shared_ptr<TruthTable> flip_table_;
  std::uint64_t key_ = 0;
  std::uint64_t threshold_ = 0;
  std::set<std::vector<std::uint64_t>> flip_set_;
  std::uint64_t flipped_ = 0;
};

// A deterministic, random-access list of query points. Sources are built from
// randomness fixed up front, so a plan is fully determined before any answer
// exists.
class QuerySource {
 public:
  virtual ~QuerySource() = default;
  virtual std::size_t dims() const = 0;
  virtual std::size_t size() const = 0;
  // Writes points [first, first + out.size()) into out.
  virtual void fill(std::size_t first, PointSet& out) const = 0;
};

class PointListSource final : public QuerySource {
 public:
  explicit PointListSource(PointSet points) : points_(std::move(points)) {}
  std::size_t dims() const override { return points_.dims(); }
  std::size_t size() const override { return points_.size(); }
  void fill(std::size_t first, PointSet& out) const override {
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto src = points_[first + i];
      std::copy(src.words.begin(), src.words.end(), out.row(i).begin());
    }
  }

 private:
  PointSet points_;
};

// Concatenation of sources; answers come back in the same order.
class QueryPlan {
 public:
  explicit QueryPlan(std::size_t n) : n_(n) {}

  std::size_t add(std::shared_ptr<const QuerySource> source) {
    if (source->dims() != n_) throw DimensionMismatch("QueryPlan::add", n_, source->dims());
    segments_.push_back({std::move(source), total_});
    total_ += segments_.back().source->size();
    return segments_.size() - 1;
  }

  std::size_t dims() const { return n_; }
  std::size_t size() const { return total_; }
  std::size_t segments() const { return segments_.size(); }
  const QuerySource& source(std::size_t seg) const { return *segments_[seg].source; }

  std::span<const std::uint8_t> answers_for(std::span<const std::uint8_t> answers, std::size_t seg) const {
    return answers.subspan(segments_[seg].offset, segments_[seg].source->size());
  }

 private:
  struct Segment {
    std::shared_ptr<const QuerySource> source;
    std::size_t offset;
  };
  std::size_t n_;
  std::size_t total_ = 0;
  std::vector<Segment> segments_;
};

// adaptive: point queries and any number of batches.
// non_adaptive: point queries are refused and exactly one batch may be
// answered, so everything the caller ever learns about g comes from a query
// set fixed before the first answer.
enum class Discipline { adaptive, non_adaptive };

// Counted black-box access to g.
class Oracle {
 public:
  enum class Phase { free, batch_collect, batch_answer };

  explicit Oracle(std::shared_ptr<const NoisyFunction> g, Discipline discipline = Discipline::adaptive)
      : g_(std::move(g)), discipline_(discipline), count_(std::make_unique<std::atomic<std::uint64_t>>(0)) {}

  // Fresh handle over the same g with its own counter and phase.
  Oracle handle(Discipline discipline) const { return Oracle(g_, discipline); }

  std::size_t dims() const { return g_->dims(); }
  std::uint64_t query_count() const { return count_->load(); }
  Phase phase() const { return phase_; }
  Discipline discipline() const { return discipline_; }
  const NoisyFunction& function() const { return *g_; }

  bool query(BitSpan x) {
    if (discipline_ == Discipline::non_adaptive) {
      throw PhaseViolation("point query on a non-adaptive oracle; submit a batch instead");
    }
    if (phase_ == Phase::batch_collect) throw PhaseViolation("point query while a batch is being collected");
    const bool v = (*g_)(x);
    count_->fetch_add(1);
    return v;
  }

  // Registers every point, then releases all answers at once.
  std::vector<std::uint8_t> batch(const PointSet& points) {
    begin_batch();
    pending_ = points;
    return submit_all();
  }

  std::vector<std::uint8_t> batch(const QueryPlan& plan) {
    if (plan.dims() != dims()) throw DimensionMismatch("Oracle::batch", dims(), plan.dims());
    open_batch();
    std::vector<std::uint8_t> answers(plan.size());
    constexpr std::size_t kChunk = 4096;
    PointSet chunk(dims());
    std::size_t at = 0;
    for (std::size_t seg = 0; seg < plan.segments(); ++seg) {
      const QuerySource& src = plan.source(seg);
      for (std::size_t first = 0; first < src.size(); first += kChunk) {
        chunk.resize(std::min(kChunk, src.size() - first));
        src.fill(first, chunk);
        g_->evaluate(chunk, std::span(answers).subspan(at, chunk.size()));
        at += chunk.size();
      }
    }
    count_->fetch_add(plan.size());
    phase_ = Phase::batch_answer;
    last_answers_ = {};
    return answers;
  }

  // Incremental form of batch(): begin_batch(), submit() each point, submit_all().
  void begin_batch() {
    open_batch();
    pending_ = PointSet(dims());
  }

  void submit(BitSpan x) {
    if (phase_ != Phase::batch_collect) throw PhaseViolation("submit outside of batch collection");
    pending_.push_back(x);
  }

  std::vector<std::uint8_t> submit_all() {
    if (phase_ != Phase::batch_collect) throw PhaseViolation("submit_all without an open batch");
    if (pending_.dims() != dims()) throw DimensionMismatch("Oracle::batch", dims(), pending_.dims());
    std::vector<std::uint8_t> answers(pending_.size());
    g_->evaluate(pending_, answers);
    count_->fetch_add(pending_.size());
    pending_ = PointSet(dims());
    phase_ = Phase::batch_answer;
    last_answers_ = answers;
    return answers;
  }

  // Answers of the most recent incremental batch.
  const std::vector<std::uint8_t>& answers() const {
    if (phase_ != Phase::batch_answer) throw PhaseViolation("batch answers requested before submit_all");
    return last_answers_;
  }

 private:
  void open_batch() {
    if (phase_ == Phase::batch_collect) throw PhaseViolation("a batch is already being collected");
    if (discipline_ == Discipline::non_adaptive && batches_ > 0) {
      throw PhaseViolation("non-adaptive oracle already answered its batch");
    }
    ++batches_;
    phase_ = Phase::batch_collect;
  }

  std::shared_ptr<const NoisyFunction> g_;
  Discipline discipline_;
  std::unique_ptr<std::atomic<std::uint64_t>> count_;
  Phase phase_ = Phase::free;
  std::size_t batches_ = 0;
  PointSet pending_;
  std::vector<std::uint8_t> last_answers_;
};

// g = f_sigma with the given noise; isomorphism first, then noise.
inline Oracle make_oracle(const FunctionView& f, const Isomorphism& sigma, const NoiseSpec& noise,
                          Discipline discipline = Discipline::adaptive) {
  return Oracle(std::make_shared<const NoisyFunction>(apply_isomorphism(f, sigma), noise), discipline);
}

}  // namespace lcorr
