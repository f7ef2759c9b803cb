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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lcorr/boolfn.hpp"
#include "lcorr/corrector.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/oracle.hpp"
#include "lcorr/random.hpp"
#include "lcorr/report.hpp"
#include "lcorr/stats.hpp"
#include "lcorr/typicality.hpp"

namespace lcorr {

enum class Family { junta, psf };

inline const char* to_string(Family f) { return f == Family::junta ? "junta" : "psf"; }

inline Family parse_family(const std::string& s) {
  if (s == "junta") return Family::junta;
  if (s == "psf") return Family::psf;
  throw InvalidArgument("unknown family '" + s + "' (expected junta or psf)");
}

// "paper" or "scaled:FACTOR".
inline ConstantsProfile parse_profile(const std::string& s) {
  if (s == "paper") return ConstantsProfile::paper();
  if (s.rfind("scaled:", 0) == 0) {
    const std::string f = s.substr(7);
    std::size_t used = 0;
    double factor = 0;
    try {
      factor = std::stod(f, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (f.empty() || used != f.size()) throw InvalidArgument("bad scaled profile factor '" + f + "'");
    return ConstantsProfile::scaled(factor);
  }
  throw InvalidArgument("unknown profile '" + s + "' (expected paper or scaled:FACTOR)");
}

inline std::string profile_string(const ConstantsProfile& p) {
  if (p.is_paper()) return "paper";
  char buf[40];
  std::snprintf(buf, sizeof buf, "scaled:%.17g", p.factor);
  return buf;
}

struct ExperimentConfig {
  Family family = Family::junta;
  std::size_t k = 2;
  std::size_t n = 32;
  double epsilon = 0.001;
  NoiseSpec::Mode noise = NoiseSpec::Mode::procedural;
  std::string flip_file;  // adversarial noise only
  std::size_t trials = 1;
  ConstantsProfile profile;
  std::uint64_t seed = 1;
  bool gating = true;
  bool identity_sigma = false;
  std::size_t amplify = 1;  // odd; > 1 repeats the corrector and takes a majority vote
  std::size_t syminf_budget = 100000;
  std::size_t workers = 1;
  bool timing = false;
  std::string out;
  ReportFormat format = ReportFormat::jsonl;

  void validate() const {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (k > n) throw InvalidArgument("k must not exceed n");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
    if (workers < 1) throw InvalidArgument("workers must be >= 1");
    if (amplify < 1 || amplify % 2 == 0) throw InvalidArgument("amplify must be an odd count >= 1");
    if (noise == NoiseSpec::Mode::adversarial && flip_file.empty()) {
      throw InvalidArgument("adversarial noise needs a flip-list file");
    }
    if (noise == NoiseSpec::Mode::exact_fraction && n > kMaxTableVars) {
      throw CapacityExceeded("exact noise needs n <= " + std::to_string(kMaxTableVars) + "; use procedural noise");
    }
    profile.check_perm_budget(k);
  }
};

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["family"] = to_string(c.family);
  j["k"] = c.k;
  j["n"] = c.n;
  j["epsilon"] = c.epsilon;
  j["noise"] = to_string(c.noise);
  if (c.noise == NoiseSpec::Mode::adversarial) j["flip_file"] = c.flip_file;
  j["trials"] = c.trials;
  j["profile"] = profile_string(c.profile);
  j["seed"] = c.seed;
  j["gating"] = c.gating;
  j["identity_sigma"] = c.identity_sigma;
  j["amplify"] = c.amplify;
  j["syminf_budget"] = c.syminf_budget;
  j["workers"] = c.workers;
  j["timing"] = c.timing;
  j["out"] = c.out;
  j["format"] = c.format == ReportFormat::jsonl ? "jsonl" : "csv";
  return j;
}

struct TrialReport {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string sigma;  // 16 hex digits
  std::string x;      // hex point
  bool expected = false;
  bool returned = false;
  bool success = false;
  std::uint64_t queries = 0;
  std::string stage = "none";  // none | partition-collision | set-finder | permutation
  std::string exit;
  std::size_t rejections = 0;
  double wall_ms = 0.0;

  friend bool operator==(const TrialReport&, const TrialReport&) = default;
};

struct Aggregate {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double lower95 = 0.0;  // one-sided Clopper-Pearson
  double ci_low = 0.0;   // two-sided 95%
  double ci_high = 1.0;
  double mean_queries = 0.0;
  std::uint64_t min_queries = 0;
  std::uint64_t max_queries = 0;
  std::optional<double> query_constant;  // mean / (k log2^2 k), k >= 2
  std::size_t rejections = 0;
  std::map<std::string, std::size_t> stages = {
      {"none", 0}, {"partition-collision", 0}, {"set-finder", 0}, {"permutation", 0}};
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialReport> trials;
  Aggregate aggregate;
};

inline std::string sigma_digest(const Isomorphism& sigma) {
  std::uint64_t h = mix64(sigma.size());
  for (auto v : sigma.perm()) h = mix64(h ^ v);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Aggregate aggregate(const std::vector<TrialReport>& trials, std::size_t k) {
  Aggregate a;
  a.trials = trials.size();
  if (trials.empty()) return a;
  a.min_queries = trials.front().queries;
  double total = 0.0;
  for (const auto& t : trials) {
    a.successes += t.success ? 1 : 0;
    total += static_cast<double>(t.queries);
    a.min_queries = std::min(a.min_queries, t.queries);
    a.max_queries = std::max(a.max_queries, t.queries);
    a.rejections += t.rejections;
    ++a.stages[t.stage];
  }
  a.success_rate = static_cast<double>(a.successes) / static_cast<double>(a.trials);
  a.lower95 = stats::clopper_pearson_lower(a.successes, a.trials, 0.95);
  a.ci_low = stats::clopper_pearson_lower(a.successes, a.trials, 0.975);
  a.ci_high = stats::clopper_pearson_upper(a.successes, a.trials, 0.975);
  a.mean_queries = total / static_cast<double>(a.trials);
  if (k >= 2) {
    const double l = std::log2(static_cast<double>(k));
    a.query_constant = a.mean_queries / (static_cast<double>(k) * l * l);
  }
  return a;
}

inline nlohmann::ordered_json to_json(const Aggregate& a) {
  nlohmann::ordered_json j;
  j["trials"] = a.trials;
  j["successes"] = a.successes;
  j["success_rate"] = a.success_rate;
  j["lower95"] = a.lower95;
  j["ci95"] = {a.ci_low, a.ci_high};
  j["mean_queries"] = a.mean_queries;
  j["min_queries"] = a.min_queries;
  j["max_queries"] = a.max_queries;
  j["query_constant"] = a.query_constant ? nlohmann::ordered_json(*a.query_constant) : nlohmann::ordered_json();
  j["rejections"] = a.rejections;
  nlohmann::ordered_json st;
  for (const char* s : {"none", "partition-collision", "set-finder", "permutation"}) st[s] = a.stages.at(s);
  j["stages"] = st;
  return j;
}

namespace detail {

// Attributes a failed trial to the first stage that went wrong: a relevant
// variable sharing a block (or sitting in the workspace), the set finder
// returning the wrong blocks, or else the permutation step.
inline std::string failure_stage(const CorrectionTrace& trace, const std::vector<std::uint32_t>& relevant) {
  if (relevant.empty() || trace.exit == CorrectionTrace::Exit::trivial) return "permutation";
  const Partition& p = trace.partition;
  if (!p.separates(relevant)) return "partition-collision";
  std::vector<std::size_t> want;
  for (auto v : relevant) {
    const auto b = p.block_of(v);
    if (b == Partition::kNoBlock || (p.workspace() && static_cast<std::size_t>(b) == *p.workspace())) {
      return "partition-collision";
    }
    want.push_back(static_cast<std::size_t>(b));
  }
  std::sort(want.begin(), want.end());
  auto got = trace.found_blocks;
  std::sort(got.begin(), got.end());
  if (got != want) return "set-finder";
  return "permutation";
}

struct PlantedTrial {
  FunctionView f;
  std::size_t rejections = 0;
};

inline PlantedTrial plant(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  Rng core_rng(derive(trial_seed, {stream::kCore}));
  const auto positions = iota_positions(cfg.k);
  if (cfg.family == Family::junta) {
    if (cfg.gating) {
      auto drawn = draw_typical_junta_core(cfg.k, core_rng);
      return {FunctionView::junta(std::move(drawn.core), positions, cfg.n), drawn.rejections};
    }
    return {FunctionView::junta(JuntaCore::random(cfg.k, core_rng), positions, cfg.n), 0};
  }
  if (cfg.gating) {
    auto drawn = draw_typical_psf_core(cfg.k, cfg.n, core_rng, cfg.syminf_budget);
    return {FunctionView::psf(std::move(drawn.core), positions, cfg.n), drawn.rejections};
  }
  return {FunctionView::psf(PsfCore::random(cfg.k, cfg.n - cfg.k, core_rng), positions, cfg.n), 0};
}

inline NoiseSpec noise_for(const ExperimentConfig& cfg, std::uint64_t trial_seed,
                           const std::vector<BitVector>& flips) {
  switch (cfg.noise) {
    case NoiseSpec::Mode::exact_fraction:
      return NoiseSpec::exact_fraction(cfg.epsilon, derive(trial_seed, {stream::kNoise}));
    case NoiseSpec::Mode::procedural:
      return NoiseSpec::procedural(cfg.epsilon, derive(trial_seed, {stream::kNoise}));
    case NoiseSpec::Mode::adversarial:
      return NoiseSpec::adversarial(flips);
  }
  return {};
}

}  // namespace detail

// Runs trial `trial` from its sub-seed alone; run_experiment uses
// derive(cfg.seed, {trial}) as that sub-seed.
inline TrialReport run_trial(const ExperimentConfig& cfg, std::size_t trial, std::uint64_t trial_seed,
                             const std::vector<BitVector>& flips = {}) {
  const auto start = std::chrono::steady_clock::now();
  TrialReport r;
  r.trial = trial;
  r.seed = trial_seed;

  auto planted = detail::plant(cfg, trial_seed);
  r.rejections = planted.rejections;
  Rng sigma_rng(derive(trial_seed, {stream::kSigma}));
  const Isomorphism sigma = cfg.identity_sigma ? Isomorphism::identity(cfg.n) : Isomorphism::random(cfg.n, sigma_rng);
  r.sigma = sigma_digest(sigma);
  const Oracle base = make_oracle(planted.f, sigma, detail::noise_for(cfg, trial_seed, flips), Discipline::non_adaptive);
  const FunctionView& target = base.function().target();

  BitVector x(cfg.n);
  Rng point_rng(derive(trial_seed, {stream::kPoint}));
  point_rng.fill_bits(x.words(), cfg.n);
  r.x = hex::encode(x.span());
  r.expected = target(x.span());

  std::size_t ones = 0;
  std::optional<CorrectionTrace> first;
  for (std::size_t a = 0; a < cfg.amplify; ++a) {
    Oracle oracle = base.handle(Discipline::non_adaptive);
    const std::uint64_t seed = cfg.amplify == 1 ? derive(trial_seed, {stream::kCorrector})
                                                : derive(trial_seed, {stream::kCorrector, a});
    CorrectionResult res = cfg.family == Family::junta
                               ? locally_correct_junta(planted.f.junta_core(), oracle, x.span(), cfg.profile, seed)
                               : locally_correct_psf(planted.f.psf_core(), oracle, x.span(), cfg.profile, seed);
    ones += res.value ? 1 : 0;
    r.queries += oracle.query_count();
    if (!first) first = std::move(res.trace);
  }
  r.returned = 2 * ones > cfg.amplify;
  r.success = r.returned == r.expected;
  r.exit = to_string(first->exit);
  if (!r.success) r.stage = detail::failure_stage(*first, target.positions());
  if (cfg.timing) {
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

// Calls fn(i) for i in [0, count) on up to `workers` threads.
template <typename F>
void parallel_for(std::size_t count, std::size_t workers, F&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<BitVector> flips;
  if (cfg.noise == NoiseSpec::Mode::adversarial) flips = load_flip_list(cfg.flip_file, cfg.n);
  ExperimentReport report;
  report.config = cfg;
  report.trials.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.workers,
               [&](std::size_t t) { report.trials[t] = run_trial(cfg, t, derive(cfg.seed, {t}), flips); });
  report.aggregate = aggregate(report.trials, cfg.k);
  return report;
}

inline ExperimentReport run_junta_experiment(ExperimentConfig cfg) {
  cfg.family = Family::junta;
  return run_experiment(cfg);
}

inline ExperimentReport run_psf_experiment(ExperimentConfig cfg) {
  cfg.family = Family::psf;
  return run_experiment(cfg);
}

inline Report to_report(const ExperimentReport& e) {
  Report r;
  r.header["schema"] = kReportSchema;
  r.header["kind"] = "experiment";
  r.header["config"] = to_json(e.config);
  r.header["aggregate"] = to_json(e.aggregate);
  using T = Column::Type;
  r.columns = {{"trial", T::integer},   {"seed", T::integer},     {"sigma", T::string},
               {"x", T::string},        {"expected", T::boolean}, {"returned", T::boolean},
               {"success", T::boolean}, {"queries", T::integer},  {"stage", T::string},
               {"exit", T::string},     {"rejections", T::integer}};
  if (e.config.timing) r.columns.push_back({"wall_ms", T::real});
  for (const auto& t : e.trials) {
    nlohmann::ordered_json row;
    row["trial"] = t.trial;
    row["seed"] = t.seed;
    row["sigma"] = t.sigma;
    row["x"] = t.x;
    row["expected"] = t.expected;
    row["returned"] = t.returned;
    row["success"] = t.success;
    row["queries"] = t.queries;
    row["stage"] = t.stage;
    row["exit"] = t.exit;
    row["rejections"] = t.rejections;
    if (e.config.timing) row["wall_ms"] = t.wall_ms;
    r.rows.push_back(std::move(row));
  }
  return r;
}

inline std::vector<TrialReport> trials_from_report(const Report& r) {
  std::vector<TrialReport> out;
  for (const auto& row : r.rows) {
    TrialReport t;
    t.trial = row.at("trial").get<std::size_t>();
    t.seed = row.at("seed").get<std::uint64_t>();
    t.sigma = row.at("sigma").get<std::string>();
    t.x = row.at("x").get<std::string>();
    t.expected = row.at("expected").get<bool>();
    t.returned = row.at("returned").get<bool>();
    t.success = row.at("success").get<bool>();
    t.queries = row.at("queries").get<std::uint64_t>();
    t.stage = row.at("stage").get<std::string>();
    t.exit = row.at("exit").get<std::string>();
    t.rejections = row.at("rejections").get<std::size_t>();
    if (row.contains("wall_ms")) t.wall_ms = row.at("wall_ms").get<double>();
    out.push_back(std::move(t));
  }
  return out;
}

struct TypicalityConfig {
  Family family = Family::junta;
  std::size_t k = 8;
  std::size_t n = 16;  // psf only
  std::size_t draws = 100;
  std::uint64_t seed = 1;
  bool inject_and = false;  // junta only: append the AND core as a known failure
  std::size_t sample_budget = 100000;
  std::size_t workers = 1;

  void validate() const {
    if (draws < 1) throw InvalidArgument("draws must be >= 1");
    if (workers < 1) throw InvalidArgument("workers must be >= 1");
    if (family == Family::junta && k > kMaxExactInfluenceVars) {
      throw CapacityExceeded("junta typicality checks need k <= " + std::to_string(kMaxExactInfluenceVars));
    }
    if (family == Family::psf && k > n) throw InvalidArgument("psf needs k <= n");
    if (family == Family::psf && inject_and) throw InvalidArgument("AND injection applies to junta cores only");
  }
};

inline nlohmann::ordered_json to_json(const TypicalityConfig& c) {
  nlohmann::ordered_json j;
  j["family"] = to_string(c.family);
  j["k"] = c.k;
  if (c.family == Family::psf) j["n"] = c.n;
  j["draws"] = c.draws;
  j["seed"] = c.seed;
  j["inject_and"] = c.inject_and;
  j["sample_budget"] = c.sample_budget;
  j["workers"] = c.workers;
  return j;
}

struct TypicalityRow {
  std::size_t draw = 0;
  std::string source;  // random | and
  TypicalityVerdict verdict;
};

struct CheckSummary {
  std::size_t count = 0;
  std::size_t passes = 0;
  double pass_rate = 0.0;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct TypicalityReport {
  TypicalityConfig config;
  std::vector<TypicalityRow> rows;
  std::map<std::string, CheckSummary> summary;  // random draws only
};

inline std::vector<TypicalityVerdict> junta_checks(const JuntaCore& core) {
  std::vector<TypicalityVerdict> v{check_core_min_influence(core)};
  if (core.arity() <= 8) v.push_back(check_core_far_from_isomorphisms(core));
  return v;
}

inline std::vector<TypicalityVerdict> psf_checks(const PsfCore& core, std::size_t n, std::size_t budget,
                                                 std::uint64_t seed) {
  std::vector<TypicalityVerdict> v{check_psf_pair_syminf(core, detail::iota_positions(core.arity()), n, budget, seed)};
  if (core.arity() <= 8) v.push_back(check_psf_far_from_core_perms(core, n));
  return v;
}

inline TypicalityReport run_typicality_suite(const TypicalityConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<TypicalityVerdict>> per_draw(cfg.draws);
  parallel_for(cfg.draws, cfg.workers, [&](std::size_t d) {
    Rng rng(derive(cfg.seed, {stream::kTypicality, d}));
    if (cfg.family == Family::junta) {
      per_draw[d] = junta_checks(JuntaCore::random(cfg.k, rng));
    } else {
      const PsfCore core = PsfCore::random(cfg.k, cfg.n - cfg.k, rng);
      per_draw[d] = psf_checks(core, cfg.n, cfg.sample_budget, rng());
    }
  });
  TypicalityReport report;
  report.config = cfg;
  for (std::size_t d = 0; d < cfg.draws; ++d) {
    for (auto& v : per_draw[d]) {
      auto& s = report.summary[v.check];
      if (s.count == 0) s.min = s.max = v.statistic;
      ++s.count;
      s.passes += v.pass ? 1 : 0;
      s.min = std::min(s.min, v.statistic);
      s.max = std::max(s.max, v.statistic);
      s.mean += v.statistic;
      report.rows.push_back({d, "random", std::move(v)});
    }
  }
  for (auto& [name, s] : report.summary) {
    s.pass_rate = static_cast<double>(s.passes) / static_cast<double>(s.count);
    s.mean /= static_cast<double>(s.count);
  }
  if (cfg.inject_and) {
    for (auto& v : junta_checks(and_core(cfg.k))) report.rows.push_back({cfg.draws, "and", std::move(v)});
  }
  return report;
}

inline Report to_report(const TypicalityReport& t) {
  Report r;
  r.header["schema"] = kReportSchema;
  r.header["kind"] = "typicality";
  r.header["config"] = to_json(t.config);
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [name, s] : t.summary) {
    summary[name] = {{"count", s.count}, {"passes", s.passes}, {"pass_rate", s.pass_rate},
                     {"min", s.min},     {"mean", s.mean},     {"max", s.max}};
  }
  r.header["summary"] = summary;
  using T = Column::Type;
  r.columns = {{"draw", T::integer},   {"source", T::string}, {"check", T::string},  {"statistic", T::real},
               {"threshold", T::real}, {"pass", T::boolean},  {"vacuous", T::boolean}};
  for (const auto& row : t.rows) {
    nlohmann::ordered_json j;
    j["draw"] = row.draw;
    j["source"] = row.source;
    j["check"] = row.verdict.check;
    j["statistic"] = row.verdict.statistic;
    j["threshold"] = row.verdict.threshold;
    j["pass"] = row.verdict.pass;
    j["vacuous"] = row.verdict.vacuous;
    r.rows.push_back(std::move(j));
  }
  return r;
}

}  // namespace lcorr
