// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. Usage: acceptance <configs dir> [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bayesbench/diagnostics.hpp"
#include "bayesbench/error.hpp"
#include "bayesbench/modelcheck.hpp"
#include "bayesbench/pipeline.hpp"
#include "bayesbench/posterior.hpp"
#include "bayesbench/report.hpp"
#include "synthetic.hpp"

using namespace bayesbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double round_to(double x, int decimals) {
  const double f = std::pow(10.0, decimals);
  return std::round(x * f) / f;
}

PosteriorDraws point_mass(const std::vector<std::string>& names, const std::vector<double>& values, int n = 200) {
  PosteriorDraws d;
  d.names = names;
  d.chains = 2;
  d.iterations = n / 2;
  d.dimension = static_cast<int>(names.size());
  for (int i = 0; i < n; ++i) d.values.insert(d.values.end(), values.begin(), values.end());
  d.divergent.assign(n, 0);
  d.treedepth.assign(n, 1);
  d.accept_stat.assign(n, 1.0);
  return d;
}

void transforms(Outcome& o) {
  const PosteriorDraws d = point_mass({"b[a]", "b[b]", "b[c]"}, {-0.10, -4.35, 2.44});
  const struct {
    const char* name;
    double want;
  } cases[] = {{"b[a]", 0.90}, {"b[b]", 0.01}, {"b[c]", 11.47}};
  for (const auto& c : cases) {
    const double got = odds_ratio_summary(d, c.name).transform->mean;
    o.detail << " OR=" << round_to(got, 2);
    o.require(std::abs(round_to(got, 2) - c.want) <= 0.005, std::string("odds ratio of ") + c.name);
  }
  const PosteriorDraws h = point_mass({"a_alg[x]", "b_noise[x]"}, {-5.09, 0.0});
  const double baseline = hazard_summary(h, {"x"}).at(0).baseline.mean;
  o.detail << " baseline hazard=" << round_to(baseline, 3);
  o.require(std::abs(round_to(baseline, 3) - 0.006) <= 0.005, "baseline hazard");
}

double beta35_cdf(double x) {
  // Regularized incomplete beta I_x(3, 5) as a binomial tail.
  double s = 0;
  for (int j = 3; j <= 7; ++j) {
    double c = 1;
    for (int i = 0; i < j; ++i) c = c * (7 - i) / (i + 1);
    s += c * std::pow(x, j) * std::pow(1 - x, 7 - j);
  }
  return s;
}

double beta35_quantile(double p) {
  double lo = 0, hi = 1;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (beta35_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void sampler_oracle(Outcome& o) {
  Target normal;
  normal.dimension = 5;
  for (int i = 0; i < 5; ++i) normal.names.push_back("x" + std::to_string(i));
  normal.log_density_grad = [](std::span<const double> q, std::span<double> g) {
    double lp = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      lp -= 0.5 * q[i] * q[i];
      g[i] = -q[i];
    }
    return lp;
  };
  SamplerConfig c;
  c.chains = 4;
  c.warmup = 1000;
  c.iterations = 1000;
  c.seed = 20240601;
  const auto d = nuts_sample(normal, c);
  const auto diag = diagnose(d);
  double worst_mean = 0, worst_sd = 0;
  for (const auto& p : diag.params) {
    worst_mean = std::max(worst_mean, std::abs(p.mean));
    worst_sd = std::max(worst_sd, std::abs(p.sd - 1));
  }
  o.detail << " normal: max|mean|=" << worst_mean << " max|sd-1|=" << worst_sd << " max R-hat=" << diag.max_rhat()
           << " min ESS=" << diag.min_ess() << " divergences=" << diag.divergences;
  o.require(worst_mean < 0.05 && worst_sd < 0.05, "normal moments");
  o.require(diag.max_rhat() < 1.01, "normal R-hat");
  o.require(diag.min_ess() > 400, "normal ESS");
  o.require(diag.divergences == 0, "normal divergences");

  // Beta(3, 5) on the logit scale: density theta^3 (1 - theta)^5 including the Jacobian.
  Target beta;
  beta.dimension = 1;
  beta.names = {"theta"};
  beta.log_density_grad = [](std::span<const double> q, std::span<double> g) {
    const double t = 1 / (1 + std::exp(-q[0]));
    g[0] = 3 * (1 - t) - 5 * t;
    return 3 * std::log(t) + 5 * std::log1p(-t);
  };
  beta.constrain = [](std::span<const double> q, std::span<double> out) { out[0] = 1 / (1 + std::exp(-q[0])); };
  c.seed = 20240602;
  c.iterations = 2500;
  const auto b = nuts_sample(beta, c);
  const auto flat = b.flat(0);
  double worst_q = 0;
  for (int k = 1; k <= 9; ++k) worst_q = std::max(worst_q, std::abs(quantile(flat, k / 10.0) - beta35_quantile(k / 10.0)));
  o.detail << "; beta(3,5): max quantile error=" << worst_q;
  o.require(worst_q < 0.02, "beta quantiles");
}

const std::vector<ModelKind> kAllModels = {ModelKind::Binomial, ModelKind::RelativeImprovement,
                                           ModelKind::BradleyTerry, ModelKind::Davidson,
                                           ModelKind::Cox,      ModelKind::StudentT};

// Known parameter values used to simulate data for each model.
struct Truth {
  ModelInput design;
  std::map<std::string, std::vector<double>> blocks;
  double s = 0.5;
  std::vector<std::string> focal;
};

Truth truth_for(ModelKind kind) {
  Truth t;
  switch (kind) {
    case ModelKind::Binomial:
      t.design = synthetic::skeleton(kind, 3, 8, 2);  // 48 groups of 10 trials
      t.blocks = {{"a_alg", {-1, 0, 1}}, {"b_noise", {-0.5, -1, 0}}};
      t.focal = {"a_alg", "b_noise"};
      break;
    case ModelKind::RelativeImprovement:
      t.design = synthetic::skeleton(kind, 3, 8, 5);
      t.blocks = {{"a_alg", {0.2, 0.5, 0.8}}, {"sigma", {0.3}}};
      t.s = 0.2;
      t.focal = {"a_alg", "sigma"};
      break;
    case ModelKind::BradleyTerry:
    case ModelKind::Davidson:
      t.design = synthetic::skeleton(kind, 4, 10, 9);  // 540 pairs
      t.blocks = {{"a_alg", {-0.9, -0.3, 0.3, 0.9}}};
      if (kind == ModelKind::Davidson) t.blocks["nu_tie"] = {-1.0};
      t.s = 0.3;
      t.focal = {"a_alg"};
      break;
    case ModelKind::Cox:
      t.design = synthetic::skeleton(kind, 3, 8, 17);  // 408 rows
      for (auto& c : t.design.censor_time) c = 125;
      t.blocks = {{"a_alg", {-5, -4.5, -4}}, {"b_noise", {-0.6, -0.3, 0}}};
      t.s = 0.3;
      t.focal = {"a_alg", "b_noise"};
      break;
    case ModelKind::StudentT:
      t.design = synthetic::skeleton(kind, 3, 8, 15);
      t.blocks = {{"a_alg", {-1, 0, 1}}, {"sigma", {0.5, 1.0, 0.7}}, {"nu", {5}}};
      t.focal = {"a_alg", "sigma"};
      break;
  }
  return t;
}

std::vector<double> truth_theta(const Model& m, const Truth& t, Rng& rng) {
  std::vector<double> theta(m.dimension(), 0.0);
  std::normal_distribution<double> z;
  for (const auto& b : m.blocks()) {
    for (int i = 0; i < b.size; ++i) {
      double v = 0;
      if (b.kind == BlockKind::Effect) {
        v = t.s * z(rng);
      } else if (b.name == "s") {
        v = t.s;
      } else {
        const auto& vals = t.blocks.at(b.name);
        v = vals[std::min<std::size_t>(i, vals.size() - 1)];
      }
      theta[b.offset + i] = v;
    }
    // Center each algorithm's benchmark effects so the intercepts keep their
    // stated values instead of absorbing the sample mean of the effects.
    if (b.kind == BlockKind::Effect) {
      const int groups = b.size == static_cast<int>(m.input().benchmarks.size()) ? 1 : m.input().algorithms.size();
      const int per = b.size / groups;
      for (int g = 0; g < groups; ++g) {
        double mean = 0;
        for (int i = 0; i < per; ++i) mean += theta[b.offset + g * per + i] / per;
        for (int i = 0; i < per; ++i) theta[b.offset + g * per + i] -= mean;
      }
    }
  }
  return theta;
}

void gradients(Outcome& o) {
  for (auto kind : kAllModels) {
    const auto truth = truth_for(kind);
    Rng rng = SeedSequence(31).child(to_string(kind)).rng();
    const auto shape = make_model(truth.design);
    const auto data = shape->simulate(truth_theta(*shape, truth, rng), rng);
    const auto model = make_model(data);
    const auto target = model->target();
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    double worst = 0;
    for (int p = 0; p < 20; ++p) {
      std::vector<double> q(model->dimension());
      for (auto& v : q) v = u(rng);
      worst = std::max(worst, gradient_check(target, q));
    }
    o.detail << " " << to_string(kind) << "=" << worst;
    o.require(worst < 1e-4, to_string(kind) + " gradient");
  }
}

void recovery(Outcome& o) {
  const int reps = 20;
  for (auto kind : kAllModels) {
    const auto truth = truth_for(kind);
    const auto shape = make_model(truth.design);
    Rng theta_rng = SeedSequence(77).child(to_string(kind)).rng();
    const auto theta = truth_theta(*shape, truth, theta_rng);

    std::vector<int> focal;
    for (const auto& name : truth.focal) {
      const auto& b = shape->block(name);
      for (int i = 0; i < b.size; ++i) focal.push_back(b.offset + i);
    }
    std::vector<int> covered(focal.size(), 0);
    int unconverged = 0;
    double censored = 0;
    for (int r = 0; r < reps; ++r) {
      Rng rng = SeedSequence(77).child(to_string(kind)).child(r).rng();
      const auto data = shape->simulate(theta, rng);
      if (kind == ModelKind::Cox) {
        for (int e : data.event) censored += e == 0;
      }
      auto req = FitRequest::defaults(kind);
      req.sampler.chains = 4;
      req.sampler.warmup = 500;
      req.sampler.iterations = 500;
      req.sampler.jobs = 1;
      req.sampler.target_accept = 0.9;
      req.seed = 1000 + r;
      const auto fit = run_fit(req, data);
      unconverged += !fit.diagnostics.converged();
      for (std::size_t k = 0; k < focal.size(); ++k) {
        const auto samples = fit.draws.flat(focal[k]);
        const auto hpd = hpd_interval(samples, 0.95);
        covered[k] += hpd.low <= theta[focal[k]] && theta[focal[k]] <= hpd.high;
      }
    }
    const int worst = *std::min_element(covered.begin(), covered.end());
    o.detail << " " << to_string(kind) << ": rows=" << truth.design.rows() << " min coverage=" << worst << "/" << reps;
    if (std::getenv("BAYESBENCH_VERBOSE")) {
      for (std::size_t k = 0; k < focal.size(); ++k) o.detail << " " << shape->names()[focal[k]] << "=" << covered[k];
    }
    if (kind == ModelKind::Cox) o.detail << " censored=" << censored / (reps * truth.design.rows());
    if (unconverged) o.detail << " unconverged fits=" << unconverged;
    for (std::size_t k = 0; k < focal.size(); ++k) {
      o.require(covered[k] >= 16, shape->names()[focal[k]] + " covered " + std::to_string(covered[k]) + "/20");
    }
  }
}

void waic_and_davidson(Outcome& o) {
  const auto r = waic(Matrix{2, 1, {std::log(0.5), std::log(0.25)}});
  const double lppd = std::log(0.375);
  const double d = std::log(0.5) - std::log(0.25);
  const double oracle = -2 * (lppd - d * d / 2);
  o.detail << " waic=" << r.waic << " oracle=" << oracle;
  o.require(std::abs(r.waic - oracle) < 1e-9 && std::abs(r.waic - 2.442) < 5e-4, "waic oracle");

  Rng rng = SeedSequence(5).rng();
  std::uniform_real_distribution<double> u(-5, 5);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = davidson_probabilities(u(rng), u(rng), u(rng));
    worst = std::max(worst, std::abs(p[0] + p[1] + p[2] - 1));
  }
  o.detail << " davidson max|sum-1|=" << worst;
  o.require(worst < 1e-12, "davidson simplex");
}

void hpd(Outcome& o) {
  Rng rng = SeedSequence(6).rng();
  std::normal_distribution<double> z;
  std::vector<double> x(100000);
  for (auto& v : x) v = z(rng);
  const auto i = hpd_interval(x, 0.95);
  o.detail << " N(0,1) HPD=(" << i.low << ", " << i.high << ")";
  o.require(std::abs(i.low + 1.96) <= 0.05 && std::abs(i.high - 1.96) <= 0.05, "normal HPD");

  int shorter = 0;
  for (int t = 0; t < 10; ++t) {
    std::gamma_distribution<double> g(1.0 + t * 0.5, 1.0);
    std::vector<double> s(2000);
    for (auto& v : s) v = std::exp(g(rng)) - 1;  // strongly right-skewed
    const auto h = hpd_interval(s, 0.95);
    std::sort(s.begin(), s.end());
    const std::size_t k = static_cast<std::size_t>(std::ceil(0.95 * s.size() - 1e-9));
    int inside = 0;
    for (double v : s) inside += h.low <= v && v <= h.high;
    for (std::size_t a = 0; a + k <= s.size(); ++a) shorter += s[a + k - 1] - s[a] < h.width() - 1e-12;
    o.require(inside >= static_cast<int>(k), "HPD mass");
  }
  o.detail << " shorter windows found=" << shorter;
  o.require(shorter == 0, "exhaustive scan");
}

struct DeskRun {
  Dataset data;
  std::vector<Fit> fits;
};

FitRequest load_request(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return FitRequest::from_json(nlohmann::json::parse(in));
}

DeskRun desk_run(const fs::path& configs) {
  std::ifstream in(configs / "desk.json");
  if (!in) throw IoError("cannot read desk.json");
  auto config = ExperimentConfig::from_json(nlohmann::json::parse(in));
  config.measure_cpu = false;
  DeskRun run;
  run.data = run_experiment(config, 0);
  for (const char* f : {"fit_binomial.json", "fit_bradley_terry.json"}) {
    run.fits.push_back(run_fit(load_request(configs / f), run.data));
  }
  return run;
}

double posterior_mean(const Fit& fit, const std::string& name) {
  const auto v = fit.draws.flat(fit.draws.index_of(name));
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

void qualitative(Outcome& o, const DeskRun& run) {
  o.detail << " rows=" << run.data.rows.size();
  for (const auto& fit : run.fits) {
    const auto name = to_string(fit.request.model);
    o.detail << "; " << name << ": divergences=" << fit.diagnostics.divergences
             << " max R-hat=" << fit.diagnostics.max_rhat();
    o.require(fit.diagnostics.converged(), name + " converged");
    double de = posterior_mean(fit, "a_alg[DifferentialEvolution]");
    double pso = posterior_mean(fit, "a_alg[PSO]");
    double sa = posterior_mean(fit, "a_alg[SimulatedAnnealing]");
    double nm = posterior_mean(fit, "a_alg[NelderMead]");
    o.detail << " DE=" << de << " PSO=" << pso << " SA=" << sa << " NM=" << nm;
    o.require(std::min(de, pso) > std::max(sa, nm), name + " ordering");
    if (fit.request.model == ModelKind::Binomial) {
      const auto& b = fit.model->block("b_noise");
      double worst = 0;
      for (int i = b.offset; i < b.offset + b.size; ++i) {
        const auto v = fit.draws.flat(i);
        double s = 0;
        for (double x : v) s += std::exp(x);
        worst = std::max(worst, s / v.size());
      }
      o.detail << " max noise OR=" << worst;
      o.require(worst < 1, "noise odds ratios");
    }
  }
}

std::map<std::string, std::string> write_artifacts(const DeskRun& run, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_csv(run.data, (dir / "desk.csv").string());
  ReportOptions report;
  report.out = (dir / "report").string();
  report.data = (dir / "desk.csv").string();
  for (std::size_t i = 0; i < run.fits.size(); ++i) {
    const auto fit_dir = dir / ("fit" + std::to_string(i));
    write_fit(run.fits[i], fit_dir.string(), false);
    report.fits.push_back(fit_dir.string());
  }
  write_report(report);
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext == ".csv" || ext == ".md" || ext == ".svg") {
      files[fs::relative(e.path(), dir).string()] = read_text(e.path().string());
    }
  }
  return files;
}

void determinism(Outcome& o, const DeskRun& first, const fs::path& configs) {
  const auto scratch = fs::temp_directory_path() / "bayesbench_acceptance";
  const auto a = write_artifacts(first, scratch / "a");
  const auto b = write_artifacts(desk_run(configs), scratch / "b");
  int differing = 0;
  for (const auto& [name, text] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != text) {
      ++differing;
      o.detail << " differs: " << name;
    }
  }
  o.detail << " compared " << a.size() << " files";
  o.require(a.size() == b.size() && a.size() > 10, "same file set");
  o.require(differing == 0, "byte-identical outputs");
  fs::remove_all(scratch);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <configs dir> [criteria...]\n";
    return 2;
  }
  const fs::path configs = argv[1];
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const auto wanted = [&](int n) { return only.empty() || only.count(n); };

  std::optional<DeskRun> desk;
  const auto desk_once = [&]() -> const DeskRun& {
    if (!desk) desk = desk_run(configs);
    return *desk;
  };

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"deterministic transforms", transforms},
      {"sampler oracle", sampler_oracle},
      {"gradient checks", gradients},
      {"parameter recovery", recovery},
      {"WAIC oracle and Davidson simplex", waic_and_davidson},
      {"HPD correctness", hpd},
      {"qualitative ordering at desk scale", [&](Outcome& o) { qualitative(o, desk_once()); }},
      {"end-to-end determinism", [&](Outcome& o) { determinism(o, desk_once(), configs); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!wanted(n)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s criterion %d (%s, %.1fs):%s\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
