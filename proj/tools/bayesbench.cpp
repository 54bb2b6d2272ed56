// Command-line front end: bench, fit, diagnose, summarize, rank, ppc,
// sensitivity, report, catalog.
//
// Exit codes: 0 success, 2 invalid input, 3 convergence failure, 4 I/O error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <nlohmann/json.hpp>

#include "bayesbench/benchfns.hpp"
#include "bayesbench/error.hpp"
#include "bayesbench/harness.hpp"
#include "bayesbench/modelcheck.hpp"
#include "bayesbench/optim.hpp"
#include "bayesbench/pipeline.hpp"
#include "bayesbench/random.hpp"
#include "bayesbench/report.hpp"
#include "bayesbench/svg.hpp"

#ifndef BAYESBENCH_VERSION
#define BAYESBENCH_VERSION "0.0.0"
#endif

using namespace bayesbench;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kInvalid = 2, kNotConverged = 3, kIo = 4;

struct Common {
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  bool force = false;
  std::string out;
};

// --seed wins, then BAYESBENCH_SEED, then whatever the config said.
std::optional<std::uint64_t> resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("BAYESBENCH_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("BAYESBENCH_SEED: not an unsigned integer: ") + env);
  }
  return std::nullopt;
}

json read_json_file(const std::string& path) {
  const auto text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
}

// Options shared by fit and sensitivity.
struct FitFlags {
  std::string model;
  std::string config;
  std::string data;
  std::vector<std::string> filters;
  std::optional<double> epsilon;
  std::optional<int> chains, warmup, iters;
  std::optional<double> prior_scale;
  std::string ties;

  void attach(CLI::App* app) {
    app->add_option("model", model, "binomial, relative_improvement, bradley_terry, davidson, cox, student_t");
    app->add_option("--config", config, "fit request JSON");
    app->add_option("--data", data, "dataset CSV written by bench");
    app->add_option("--filter", filters, "key=value[,value...] (repeatable)");
    app->add_option("--epsilon", epsilon, "success threshold (binomial, cox)");
    app->add_option("--chains", chains, "number of chains");
    app->add_option("--warmup", warmup, "warmup iterations per chain");
    app->add_option("--iters", iters, "post-warmup draws per chain");
    app->add_option("--prior-scale", prior_scale, "multiplier on every prior scale");
    app->add_option("--ties", ties, "random or keep (paired models)");
  }

  FitRequest request(const Common& common) const {
    FitRequest r;
    if (!config.empty()) {
      auto j = read_json_file(config);
      if (!model.empty() && j.is_object()) j["model"] = model;
      r = FitRequest::from_json(j);
    } else {
      if (model.empty()) throw ValidationError("fit: a model or --config is required");
      r = FitRequest::defaults(parse_model_kind(model));
    }
    if (!data.empty()) r.data = data;
    for (const auto& f : filters) r.filters.add(f);
    if (epsilon) r.epsilon = *epsilon;
    if (chains) r.sampler.chains = *chains;
    if (warmup) r.sampler.warmup = *warmup;
    if (iters) r.sampler.iterations = *iters;
    if (prior_scale) r.priors.scale = *prior_scale;
    if (ties == "keep") r.ties = TieMode::KeepTies;
    else if (ties == "random") r.ties = TieMode::RandomWinner;
    else if (!ties.empty()) throw ValidationError("--ties: expected 'random' or 'keep'");
    if (const auto s = resolve_seed(common.seed)) r.seed = *s;
    r.sampler.jobs = common.jobs;
    if (r.data.empty()) throw ValidationError("fit: no dataset (--data or config.data)");
    r.validate();
    return r;
  }
};

void print_problems(const FitDiagnostics& d) {
  for (const auto& p : d.problems()) std::cerr << "convergence: " << p << "\n";
}

int cmd_bench(const std::string& config_path, const Common& c) {
  if (config_path.empty()) throw ValidationError("bench: --config is required");
  if (c.out.empty()) throw ValidationError("bench: --out is required");
  auto config = ExperimentConfig::from_json(read_json_file(config_path));
  if (const auto s = resolve_seed(c.seed)) config.master_seed = *s;
  const fs::path out(c.out);
  const auto manifest_path = out.string() + ".manifest.json";
  for (const auto& p : {out.string(), manifest_path}) {
    if (!c.force && fs::exists(p)) throw ValidationError("refusing to overwrite " + p + " (use --force)");
  }
  const auto start = std::chrono::steady_clock::now();
  const auto data = run_experiment(config, c.jobs);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_csv(data, out.string());
  const json manifest{{"seed", config.master_seed},
                      {"version", BAYESBENCH_VERSION},
                      {"compiler", __VERSION__},
                      {"config", config.to_json()},
                      {"rows", data.rows.size()},
                      {"elapsed_seconds", elapsed}};
  write_text(manifest_path, manifest.dump(2) + "\n", true);
  std::cout << "wrote " << data.rows.size() << " rows to " << out.string() << "\n";
  return kOk;
}

int cmd_fit(const FitFlags& flags, const Common& c) {
  if (c.out.empty()) throw ValidationError("fit: --out is required");
  const auto request = flags.request(c);
  const auto data = read_csv(request.data);
  const auto fit = run_fit(request, data);
  write_fit(fit, c.out, c.force);
  for (const auto& w : fit.model->input().warnings) std::cerr << "warning: " << w << "\n";
  std::cout << parameter_table(*fit.model, fit.draws, request.hpd_mass).to_markdown();
  if (!fit.diagnostics.converged()) {
    print_problems(fit.diagnostics);
    return kNotConverged;
  }
  return kOk;
}

int cmd_diagnose(const std::string& dir) {
  const auto fit = load_fit(dir);
  std::cout << diagnostics_table(fit.diagnostics).to_markdown();
  std::cout << "\ndivergences: " << fit.diagnostics.divergences << ", max treedepth hits: "
            << fit.diagnostics.treedepth_hits << "\n";
  if (!fit.diagnostics.converged()) {
    print_problems(fit.diagnostics);
    return kNotConverged;
  }
  std::cout << "converged\n";
  return kOk;
}

int cmd_summarize(const std::string& dir, const Common& c) {
  const auto fit = load_fit(dir);
  for (const auto& [name, table] : fit_tables(fit)) {
    std::cout << table.to_markdown() << "\n";
    if (!c.out.empty()) write_table(table, c.out, name, c.force);
  }
  return kOk;
}

int cmd_rank(const std::string& dir, int samples, bool average, const Common& c) {
  const auto fit = load_fit(dir);
  RankOptions opt;
  opt.samples = samples;
  opt.average_benchmarks = average;
  opt.seed = SeedSequence(resolve_seed(c.seed).value_or(fit.request.seed)).child("ranks").seed();
  const auto ranks = fit_ranks(fit, opt);
  const auto table = rank_table(ranks);
  std::cout << table.to_markdown();
  if (!c.out.empty()) {
    write_table(table, c.out, "ranks", c.force);
    write_text((fs::path(c.out) / "ranks.svg").string(), svg::rank_bars(ranks), c.force);
  }
  return kOk;
}

int cmd_ppc(const std::string& dir, int replications, const Common& c) {
  const auto fit = load_fit(dir);
  PpcOptions opt;
  opt.replications = replications;
  opt.seed = resolve_seed(c.seed).value_or(fit.request.seed);
  const auto result = posterior_predictive_check(*fit.model, fit.draws, opt);
  const auto table = ppc_table(result);
  std::cout << table.to_markdown();
  if (!c.out.empty()) {
    write_table(table, c.out, "ppc", c.force);
    for (const auto& s : result.statistics) {
      Interval range{s.observed, s.observed};
      if (s.replicated.size() >= 100) range = hpd_interval(s.replicated, 0.95);
      write_text((fs::path(c.out) / ("ppc_" + s.name + ".svg")).string(),
                 svg::density_plot(s.replicated, range, "Replicated " + s.name + " (dashed: observed)", s.observed),
                 c.force);
    }
  }
  return kOk;
}

int cmd_sensitivity(const FitFlags& flags, const std::vector<double>& multipliers, const std::vector<std::string>& blocks,
                    const Common& c) {
  const auto request = flags.request(c);
  const auto input = prepare_input(read_csv(request.data), request);
  SensitivityOptions opt;
  if (!multipliers.empty()) opt.multipliers = multipliers;
  opt.blocks = blocks;
  opt.sampler = request.sampler;
  opt.sampler.seed = SeedSequence(request.seed).child("sampler").seed();
  opt.mass = request.hpd_mass;
  opt.jobs = c.jobs;
  const auto report = sensitivity_analysis(input, request.priors, opt);
  const auto table = sensitivity_table(report);
  std::cout << table.to_markdown();
  if (!c.out.empty()) write_table(table, c.out, "sensitivity", c.force);
  std::cout << "\nmax shift: " << format_fixed(report.max_shift_sd, 3) << " posterior sd; "
            << (report.robust() ? "robust" : "NOT robust") << "\n";
  bool failed = false;
  for (const auto& v : report.variants) {
    if (v.converged) continue;
    failed = true;
    for (const auto& p : v.problems) std::cerr << "variant x" << format_shortest(v.multiplier) << ": " << p << "\n";
  }
  return failed ? kNotConverged : kOk;
}

int cmd_catalog() {
  json j{{"benchmarks", registry_catalog()}, {"algorithms", json::array()}};
  for (auto id : all_algorithms()) j["algorithms"].push_back(to_string(id));
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian analysis of optimizer benchmarks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BAYESBENCH_VERSION);

  Common common;
  auto add_common = [&](CLI::App* sub, bool seed = true, bool jobs = true) {
    sub->add_option("--out", common.out, "output file or directory");
    sub->add_flag("--force", common.force, "replace existing outputs");
    if (seed) sub->add_option("--seed", common.seed, "master seed (fallback: BAYESBENCH_SEED)");
    if (jobs) sub->add_option("--jobs", common.jobs, "worker threads (0 = logical cores)");
  };

  std::string bench_config;
  auto* bench = app.add_subcommand("bench", "run the optimizer experiment grid and write a dataset CSV");
  bench->add_option("--config", bench_config, "experiment JSON")->required();
  add_common(bench);

  FitFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "fit a model to a dataset");
  fit_flags.attach(fit);
  add_common(fit);

  std::string fit_dir;
  auto* diagnose = app.add_subcommand("diagnose", "convergence diagnostics of a fit");
  diagnose->add_option("--fit", fit_dir, "fit directory")->required();

  auto* summarize = app.add_subcommand("summarize", "summary tables of a fit");
  summarize->add_option("--fit", fit_dir, "fit directory")->required();
  add_common(summarize, false, false);

  int rank_samples = 1000;
  bool rank_average = false;
  auto* rank = app.add_subcommand("rank", "rank distribution of a paired-comparison fit");
  rank->add_option("--fit", fit_dir, "fit directory")->required();
  rank->add_option("--samples", rank_samples, "posterior samples to rank");
  rank->add_flag("--average-benchmarks", rank_average, "average benchmark effects instead of sampling one");
  add_common(rank, true, false);

  int replications = 200;
  auto* ppc = app.add_subcommand("ppc", "posterior predictive checks of a fit");
  ppc->add_option("--fit", fit_dir, "fit directory")->required();
  ppc->add_option("--replications", replications, "replicated data sets");
  add_common(ppc, true, false);

  FitFlags sens_flags;
  std::vector<double> multipliers;
  std::vector<std::string> blocks;
  auto* sensitivity = app.add_subcommand("sensitivity", "refit under rescaled priors");
  sens_flags.attach(sensitivity);
  sensitivity->add_option("--multipliers", multipliers, "prior scale multipliers")->delimiter(',');
  sensitivity->add_option("--blocks", blocks, "rescale only these prior blocks")->delimiter(',');
  add_common(sensitivity);

  ReportOptions report_opt;
  auto* report = app.add_subcommand("report", "markdown report with SVG figures");
  report->add_option("--fit", report_opt.fits, "fit directory (repeatable)");
  report->add_option("--data", report_opt.data, "dataset CSV for the CPU-time figure");
  add_common(report, false, false);

  app.add_subcommand("catalog", "list benchmark functions and algorithms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*bench) return cmd_bench(bench_config, common);
    if (*fit) return cmd_fit(fit_flags, common);
    if (*diagnose) return cmd_diagnose(fit_dir);
    if (*summarize) return cmd_summarize(fit_dir, common);
    if (*rank) return cmd_rank(fit_dir, rank_samples, rank_average, common);
    if (*ppc) return cmd_ppc(fit_dir, replications, common);
    if (*sensitivity) return cmd_sensitivity(sens_flags, multipliers, blocks, common);
    if (*report) {
      report_opt.out = common.out;
      report_opt.force = common.force;
      std::cout << "wrote " << write_report(report_opt) << "\n";
      return kOk;
    }
    return cmd_catalog();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kNotConverged;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
