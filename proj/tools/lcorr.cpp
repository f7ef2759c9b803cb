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

// Command-line front end: single corrections, seeded experiments, typicality
// suites and one-off influence estimates. Reports go to --out (or stdout) in
// jsonl or csv; a one-line summary goes to stderr.
//
// Exit codes: 0 success, 1 runtime error, 2 invalid arguments or violated
// preconditions, 3 acceptance threshold (--min-success) not met.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "lcorr/lcorr.hpp"

namespace {

using namespace lcorr;

constexpr int kExitRuntime = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitAcceptance = 3;

// Raw flag values shared by the subcommands.
struct Options {
  std::string family = "junta";
  std::size_t k = 2;
  std::size_t n = 32;
  double epsilon = 0.001;
  std::string noise = "procedural";
  std::size_t trials = 1;
  std::string profile = "paper";
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out;
  std::string format = "jsonl";
  bool no_gating = false;
  bool identity_sigma = false;
  std::size_t amplify = 1;
  bool timing = false;
  std::optional<double> min_success;
  std::size_t draws = 100;
  bool inject_and = false;
  std::size_t budget = 100000;
  std::string measure = "influence";
  std::string set;
  double delta = 0.01;
  double eta = 0.05;
};

// Environment values apply when the corresponding flag is absent.
void apply_env(Options& o, const CLI::App& cmd) {
  const auto parse = [](const char* name) -> std::optional<std::uint64_t> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    try {
      std::size_t used = 0;
      const auto x = std::stoull(v, &used, 0);
      if (used == std::string(v).size()) return x;
    } catch (const std::exception&) {
    }
    throw InvalidArgument(std::string("bad value for ") + name + ": '" + v + "'");
  };
  if (cmd.count("--seed") == 0) {
    if (auto s = parse("LCORR_SEED")) o.seed = *s;
  }
  if (cmd.count("--workers") == 0) {
    if (auto w = parse("LCORR_WORKERS")) o.workers = static_cast<std::size_t>(*w);
  }
}

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig c;
  c.family = parse_family(o.family);
  c.k = o.k;
  c.n = o.n;
  c.epsilon = o.epsilon;
  if (o.noise == "exact") {
    c.noise = NoiseSpec::Mode::exact_fraction;
  } else if (o.noise == "procedural") {
    c.noise = NoiseSpec::Mode::procedural;
  } else if (o.noise.rfind("adversarial:", 0) == 0) {
    c.noise = NoiseSpec::Mode::adversarial;
    c.flip_file = o.noise.substr(12);
  } else {
    throw InvalidArgument("unknown noise mode '" + o.noise + "' (expected exact, procedural or adversarial:FILE)");
  }
  c.trials = o.trials;
  c.profile = parse_profile(o.profile);
  c.seed = o.seed;
  c.gating = !o.no_gating;
  c.identity_sigma = o.identity_sigma;
  c.amplify = o.amplify;
  c.syminf_budget = o.budget;
  c.workers = o.workers;
  c.timing = o.timing;
  c.out = o.out;
  c.format = parse_report_format(o.format);
  c.validate();
  return c;
}

void write(const Report& r, const Options& o) {
  const auto format = parse_report_format(o.format);
  if (o.out.empty() || o.out == "-") {
    std::cout << emit_report_string(r, format);
    std::cout.flush();
  } else {
    emit_report(r, format, o.out);
  }
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--family", o.family, "junta or psf")->check(CLI::IsMember({"junta", "psf"}));
  cmd->add_option("--k", o.k, "number of relevant (junta) or asymmetric (psf) variables");
  cmd->add_option("--n", o.n, "number of variables");
  cmd->add_option("--seed", o.seed, "master seed (env LCORR_SEED)");
  cmd->add_option("--workers", o.workers, "worker threads (env LCORR_WORKERS)");
  cmd->add_option("--out", o.out, "report path; stdout when absent");
  cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"jsonl", "csv"}));
}

void add_noise(CLI::App* cmd, Options& o) {
  cmd->add_option("--epsilon", o.epsilon, "noise rate");
  cmd->add_option("--noise", o.noise, "exact, procedural or adversarial:FILE");
}

void add_correction(CLI::App* cmd, Options& o) {
  add_common(cmd, o);
  add_noise(cmd, o);
  cmd->add_option("--trials", o.trials, "number of seeded trials");
  cmd->add_option("--profile", o.profile, "paper or scaled:FACTOR");
  cmd->add_flag("--no-gating", o.no_gating, "skip typicality gating of planted cores");
  cmd->add_flag("--identity-sigma", o.identity_sigma, "plant without a random isomorphism");
  cmd->add_option("--amplify", o.amplify, "odd repeat count for a majority vote (off by default)");
  cmd->add_option("--syminf-budget", o.budget, "Monte-Carlo samples for psf gating at n > 20");
  cmd->add_flag("--timing", o.timing, "record wall time per trial (reports stop being byte-identical)");
  cmd->add_option("--min-success", o.min_success, "exit 3 unless the 95% lower bound reaches this rate");
}

int run_correction(const Options& o) {
  const auto cfg = experiment_config(o);
  const auto rep = run_experiment(cfg);
  write(to_report(rep), o);
  const auto& a = rep.aggregate;
  std::cerr << to_string(cfg.family) << " k=" << cfg.k << " n=" << cfg.n << ": " << a.successes << "/" << a.trials
            << " corrected, lower95=" << a.lower95 << ", mean queries=" << a.mean_queries;
  if (a.query_constant) std::cerr << ", C=" << *a.query_constant;
  std::cerr << "\n";
  if (o.min_success && a.lower95 < *o.min_success) {
    std::cerr << "acceptance failure: lower95 " << a.lower95 << " < " << *o.min_success << "\n";
    return kExitAcceptance;
  }
  return 0;
}

int run_typicality(const Options& o) {
  TypicalityConfig c;
  c.family = parse_family(o.family);
  c.k = o.k;
  c.n = o.n;
  c.draws = o.draws;
  c.seed = o.seed;
  c.inject_and = o.inject_and;
  c.sample_budget = o.budget;
  c.workers = o.workers;
  const auto rep = run_typicality_suite(c);
  write(to_report(rep), o);
  for (const auto& [name, s] : rep.summary) {
    std::cerr << name << ": " << s.passes << "/" << s.count << " pass, min=" << s.min << ", mean=" << s.mean << "\n";
  }
  return 0;
}

std::vector<std::uint32_t> parse_set(const std::string& s, std::size_t n) {
  std::vector<std::uint32_t> out;
  if (s.empty()) throw InvalidArgument("--set needs at least one variable index");
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto end = std::min(s.find(',', pos), s.size());
    const auto tok = s.substr(pos, end - pos);
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size() || v >= n) throw InvalidArgument("bad variable index '" + tok + "' in --set");
    out.push_back(static_cast<std::uint32_t>(v));
    pos = end + 1;
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw InvalidArgument("--set repeats a variable");
  return out;
}

// Estimates Inf or SymInf of a variable set on the noisy planted function of
// trial 0 and compares it with the exact value of the clean target when n is
// small enough to enumerate.
int run_estimate(const Options& o) {
  Options eo = o;
  eo.trials = 1;
  const auto cfg = experiment_config(eo);
  if (o.measure != "influence" && o.measure != "symmetric") {
    throw InvalidArgument("--measure must be influence or symmetric");
  }
  const EstimatorParams params{o.delta, o.eta};
  const VarSet j(cfg.n, parse_set(o.set, cfg.n));
  const std::uint64_t ts = derive(cfg.seed, {0});
  std::vector<BitVector> flips;
  if (cfg.noise == NoiseSpec::Mode::adversarial) flips = load_flip_list(cfg.flip_file, cfg.n);
  const auto planted = detail::plant(cfg, ts);
  Rng sigma_rng(derive(ts, {stream::kSigma}));
  const Isomorphism sigma = cfg.identity_sigma ? Isomorphism::identity(cfg.n) : Isomorphism::random(cfg.n, sigma_rng);
  Oracle oracle = make_oracle(planted.f, sigma, detail::noise_for(cfg, ts, flips));
  const bool sym = o.measure == "symmetric";
  const std::uint64_t est_seed = derive(ts, {stream::kCorrector});
  const double estimate = sym ? estimate_symmetric_influence(oracle, j, params, est_seed)
                              : estimate_influence(oracle, j, params, est_seed);

  Report r;
  r.header["schema"] = kReportSchema;
  r.header["kind"] = "estimate";
  r.header["config"] = to_json(cfg);
  r.header["measure"] = o.measure;
  r.header["set"] = j.indices();
  r.header["delta"] = o.delta;
  r.header["eta"] = o.eta;
  r.header["sigma"] = sigma_digest(sigma);
  using T = Column::Type;
  r.columns = {{"estimate", T::real}, {"queries", T::integer}, {"exact_available", T::boolean}, {"exact", T::real}};
  nlohmann::ordered_json row;
  row["estimate"] = estimate;
  row["queries"] = oracle.query_count();
  const bool small = cfg.n <= kMaxExactInfluenceVars;
  const FunctionView& target = oracle.function().target();
  row["exact_available"] = small;
  row["exact"] = small ? (sym ? symmetric_influence_exact(target, j) : influence_exact(target, j)) : 0.0;
  r.rows.push_back(row);
  write(r, o);
  std::cerr << o.measure << " estimate " << estimate << " from " << oracle.query_count() << " queries";
  if (small) std::cerr << " (clean exact " << row["exact"].get<double>() << ")";
  std::cerr << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local correction of juntas and partially symmetric functions from constant noise"};
  app.require_subcommand(1);
  Options o;

  auto* junta = app.add_subcommand("correct-junta", "correct seeded planted juntas");
  add_correction(junta, o);
  auto* psf = app.add_subcommand("correct-psf", "correct seeded planted partially symmetric functions");
  add_correction(psf, o);
  auto* exp = app.add_subcommand("experiment", "run a seeded experiment for --family");
  add_correction(exp, o);

  auto* typ = app.add_subcommand("typicality", "draw random cores and run the typicality checks");
  add_common(typ, o);
  typ->add_option("--draws,--trials", o.draws, "number of random cores");
  typ->add_flag("--inject-and", o.inject_and, "append the AND core as a known failure (junta only)");
  typ->add_option("--sample-budget", o.budget, "Monte-Carlo samples for psf checks at n > 20");

  auto* est = app.add_subcommand("estimate", "estimate the influence of a variable set on a planted function");
  add_common(est, o);
  add_noise(est, o);
  est->add_option("--profile", o.profile, "paper or scaled:FACTOR (gating only)");
  est->add_flag("--no-gating", o.no_gating, "skip typicality gating of the planted core");
  est->add_flag("--identity-sigma", o.identity_sigma, "plant without a random isomorphism");
  est->add_option("--measure", o.measure, "influence or symmetric")->check(CLI::IsMember({"influence", "symmetric"}));
  est->add_option("--set", o.set, "comma-separated variable indices")->required();
  est->add_option("--delta", o.delta, "additive accuracy");
  est->add_option("--eta", o.eta, "failure probability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitPrecondition;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    apply_env(o, *cmd);
    if (cmd == junta) o.family = "junta";
    if (cmd == psf) o.family = "psf";
    if (cmd == typ) return run_typicality(o);
    if (cmd == est) return run_estimate(o);
    return run_correction(o);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const CapacityExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
