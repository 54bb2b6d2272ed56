#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "bayesbench/error.hpp"
#include "bayesbench/pipeline.hpp"
#include "bayesbench/report.hpp"
#include "synthetic.hpp"

using namespace bayesbench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bayesbench_test_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

Dataset small_dataset() {
  ExperimentConfig c;
  c.algorithms = {"PSO", "DifferentialEvolution", "NelderMead", "RandomSearch1"};
  c.benchmarks = {"sphere6d", "discus2d"};
  c.noise_levels = {0.0, 3.0};
  c.budgets_per_dim = {50};
  c.repetitions = 3;
  c.master_seed = 11;
  c.measure_cpu = false;
  return run_experiment(c, 1);
}

FitRequest quick_request(ModelKind kind) {
  auto r = FitRequest::defaults(kind);
  r.sampler.chains = 2;
  r.sampler.warmup = 200;
  r.sampler.iterations = 200;
  r.seed = 3;
  return r;
}

}  // namespace

TEST_CASE("fit request JSON round trip and errors") {
  auto r = FitRequest::defaults(ModelKind::Davidson);
  CHECK(r.ties == TieMode::KeepTies);
  r.data = "x.csv";
  r.filters.add("noise=3");
  r.epsilon = 1e-3;
  r.priors.scale = 2;
  r.priors.block["s"] = 0.5;
  r.sampler.chains = 3;
  r.sampler.target_accept = 0.9;
  r.seed = 99;
  const auto back = FitRequest::from_json(r.to_json());
  CHECK(back.to_json() == r.to_json());

  CHECK_THROWS_AS(FitRequest::from_json(nlohmann::json{{"model", "binomial"}, {"chain", 4}}), ValidationError);
  CHECK_THROWS_AS(FitRequest::from_json(nlohmann::json{{"epsilon", 0.1}}), ValidationError);
  CHECK_THROWS_AS(FitRequest::from_json(nlohmann::json{{"model", "logistic"}}), ValidationError);
  try {
    FitRequest::from_json(nlohmann::json{{"model", "binomial"}, {"chain", 4}});
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("chain") != std::string::npos);
  }

  auto one = FitRequest::defaults(ModelKind::Binomial);
  one.sampler.chains = 1;
  CHECK_THROWS_AS(one.validate(), ValidationError);
  auto bt = FitRequest::defaults(ModelKind::BradleyTerry);
  bt.ties = TieMode::KeepTies;
  CHECK_THROWS_AS(bt.validate(), ValidationError);
}

TEST_CASE("model input JSON round trip") {
  for (auto kind : {ModelKind::Binomial, ModelKind::Cox, ModelKind::Davidson}) {
    auto in = synthetic::skeleton(kind, 3, 2, 2);
    if (kind == ModelKind::Davidson) in.outcome[0] = PairOutcome::Tie;
    const auto back = model_input_from_json(to_json(in));
    CHECK(to_json(back) == to_json(in));
    CHECK(back.rows() == in.rows());
  }
}

TEST_CASE("fit artifacts: write, load, overwrite refusal, missing file") {
  const auto data = small_dataset();
  const auto fit = run_fit(quick_request(ModelKind::Binomial), data);
  CHECK(fit.draws.chains == 2);
  CHECK(fit.draws.iterations == 200);

  const auto dir = scratch("fit");
  write_fit(fit, dir.string(), false);
  for (const char* f : {fit_files::kRequest, fit_files::kInput, fit_files::kDraws, fit_files::kDiagnostics,
                        fit_files::kSummaryCsv, fit_files::kSummaryMd}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK_THROWS_AS(write_fit(fit, dir.string(), false), ValidationError);
  CHECK_NOTHROW(write_fit(fit, dir.string(), true));

  const auto loaded = load_fit(dir.string());
  CHECK(loaded.draws.values == fit.draws.values);
  CHECK(loaded.draws.divergent == fit.draws.divergent);
  CHECK(loaded.draws.names == fit.draws.names);
  CHECK(loaded.diagnostics.max_rhat() == doctest::Approx(fit.diagnostics.max_rhat()));
  CHECK(loaded.request.to_json() == fit.request.to_json());

  const auto summary = fit_tables(loaded).front().second;
  CHECK(summary.columns.at(0) == "Parameter");
  CHECK(summary.columns.at(1) == "Mean");
  CHECK(summary.columns.at(2) == "HPD low");
  CHECK(summary.columns.at(3) == "HPD high");
  CHECK(summary.to_csv() == read_text((dir / fit_files::kSummaryCsv).string()));

  fs::remove(dir / fit_files::kDraws);
  try {
    load_fit(dir.string());
    FAIL("missing draws accepted");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("draws.csv") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("draws CSV round trip is exact") {
  PosteriorDraws d;
  d.names = {"a_alg[x]", "s", "a_bm[p,q]"};
  d.chains = 2;
  d.iterations = 3;
  d.dimension = 3;
  for (int i = 0; i < 18; ++i) d.values.push_back(0.1 * i - 1.0 / 3.0);
  d.divergent = {0, 1, 0, 0, 0, 1};
  d.treedepth = {1, 2, 3, 4, 5, 6};
  d.accept_stat = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const auto dir = scratch("draws");
  fs::create_directories(dir);
  const auto path = (dir / "d.csv").string();
  write_draws_csv(d, path);
  const auto back = read_draws_csv(path);
  CHECK(back.names == d.names);
  CHECK(back.chains == 2);
  CHECK(back.iterations == 3);
  CHECK(back.values == d.values);
  CHECK(back.divergent == d.divergent);
  CHECK(back.treedepth == d.treedepth);
  CHECK(back.accept_stat == d.accept_stat);
  fs::remove_all(dir);
}

TEST_CASE("fits are deterministic and the report regenerates byte-identically") {
  const auto data = small_dataset();
  const auto req = quick_request(ModelKind::BradleyTerry);
  const auto a = run_fit(req, data);
  const auto b = run_fit(req, data);
  CHECK(a.draws.values == b.draws.values);

  const auto dir = scratch("report");
  write_fit(a, (dir / "fit").string(), false);
  ReportOptions opt;
  opt.fits = {(dir / "fit").string()};
  opt.out = (dir / "report").string();
  const auto path = write_report(opt);
  const auto first = read_text(path);
  const auto ranks_svg = read_text((dir / "report" / "bradley_terry_ranks.svg").string());
  CHECK(first.find("Rank") != std::string::npos);
  CHECK_THROWS_AS(write_report(opt), ValidationError);
  opt.force = true;
  write_report(opt);
  CHECK(read_text(path) == first);
  CHECK(read_text((dir / "report" / "bradley_terry_ranks.svg").string()) == ranks_svg);

  // Every figure is a closed SVG document.
  int svgs = 0;
  for (const auto& e : fs::directory_iterator(dir / "report")) {
    if (e.path().extension() != ".svg") continue;
    const auto text = read_text(e.path().string());
    CHECK(text.rfind("<svg", 0) == 0);
    CHECK(text.find("</svg>") != std::string::npos);
    CHECK(text.find("nan") == std::string::npos);
    ++svgs;
  }
  CHECK(svgs > 2);

  ReportOptions missing;
  missing.fits = {(dir / "nope").string()};
  missing.out = (dir / "report2").string();
  CHECK_THROWS_AS(write_report(missing), IoError);
  fs::remove_all(dir);
}

TEST_CASE("every model kind runs through the pipeline") {
  const auto data = small_dataset();
  for (auto kind : {ModelKind::RelativeImprovement, ModelKind::Davidson, ModelKind::Cox, ModelKind::StudentT}) {
    auto req = quick_request(kind);
    req.epsilon = 1.0;
    const auto fit = run_fit(req, data);
    CHECK(fit.model->kind() == kind);
    const auto tables = fit_tables(fit, 200, 200);
    CHECK(!tables.empty());
    if (kind == ModelKind::Cox) {
      bool hazards = false;
      for (const auto& [name, t] : tables) hazards = hazards || name == "hazards";
      CHECK(hazards);
    }
  }
}
