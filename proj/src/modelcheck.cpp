#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

#include "bayesbench/diagnostics.hpp"
#include "bayesbench/error.hpp"
#include "bayesbench/math.hpp"
#include "bayesbench/modelcheck.hpp"
#include "bayesbench/random.hpp"

namespace bayesbench {
namespace {

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0;
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / (x.size() - 1));
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

WaicReport waic(const Matrix& ll) {
  if (ll.rows < 2) throw ValidationError("waic needs at least 2 draws");
  if (ll.cols == 0) throw ValidationError("waic needs at least 1 observation");
  if (ll.values.size() != ll.rows * ll.cols) throw ValidationError("waic: matrix shape does not match its values");
  for (double v : ll.values) {
    if (!std::isfinite(v)) throw ValidationError("waic: log-likelihood matrix has non-finite entries");
  }
  WaicReport r;
  std::vector<double> column(ll.rows);
  for (std::size_t c = 0; c < ll.cols; ++c) {
    for (std::size_t s = 0; s < ll.rows; ++s) column[s] = ll(s, c);
    const double lppd = math::log_sum_exp(column) - std::log(static_cast<double>(ll.rows));
    const double sd = sample_sd(column);
    r.lppd_i.push_back(lppd);
    r.p_waic_i.push_back(sd * sd);
    r.waic_i.push_back(-2 * (lppd - sd * sd));
  }
  r.lppd = std::accumulate(r.lppd_i.begin(), r.lppd_i.end(), 0.0);
  r.p_waic = std::accumulate(r.p_waic_i.begin(), r.p_waic_i.end(), 0.0);
  r.waic = -2 * (r.lppd - r.p_waic);
  return r;
}

Table waic_table(const std::vector<std::pair<std::string, WaicReport>>& fits) {
  Table t;
  t.title = "WAIC";
  t.columns = {"Model", "lppd", "p_waic", "WAIC"};
  for (const auto& [name, r] : fits) t.add({name, Cell(r.lppd), Cell(r.p_waic), Cell(r.waic)});
  return t;
}

std::vector<std::string> ppc_statistics(ModelKind kind) {
  switch (kind) {
    case ModelKind::Binomial:
    case ModelKind::Cox:
      return {"mean", "sd", "max", "min", "rate"};
    case ModelKind::RelativeImprovement:
    case ModelKind::StudentT:
      return {"mean", "sd", "max", "min"};
    case ModelKind::BradleyTerry:
      return {"rate"};
    case ModelKind::Davidson:
      return {"rate", "tie_rate"};
  }
  return {};
}

double ppc_statistic(const std::string& name, const ModelInput& data) {
  const auto known = ppc_statistics(data.kind);
  if (std::find(known.begin(), known.end(), name) == known.end()) {
    throw ValidationError("statistic '" + name + "' is not available for " + to_string(data.kind));
  }
  if (name == "rate") {
    if (data.kind == ModelKind::Binomial) {
      double y = 0, n = 0;
      for (std::size_t r = 0; r < data.rows(); ++r) {
        y += data.y[r];
        n += data.trials[r];
      }
      return y / n;
    }
    if (data.kind == ModelKind::Cox) {
      return std::accumulate(data.event.begin(), data.event.end(), 0.0) / data.rows();
    }
    return std::count(data.outcome.begin(), data.outcome.end(), PairOutcome::Alg1Wins) /
           static_cast<double>(data.rows());
  }
  if (name == "tie_rate") {
    return std::count(data.outcome.begin(), data.outcome.end(), PairOutcome::Tie) / static_cast<double>(data.rows());
  }
  const auto y = Model::responses(data);
  if (name == "mean") return std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  if (name == "sd") return sample_sd(y);
  if (name == "max") return *std::max_element(y.begin(), y.end());
  return *std::min_element(y.begin(), y.end());
}

PpcResult posterior_predictive_check(const Model& model, const PosteriorDraws& draws, const PpcOptions& options) {
  if (options.replications < 1) throw ValidationError("ppc replications must be >= 1");
  if (draws.dimension != model.dimension() || draws.total_draws() == 0) {
    throw ValidationError("ppc: draws do not match the model");
  }
  const auto names = options.statistics.empty() ? ppc_statistics(model.kind()) : options.statistics;
  PpcResult out;
  for (const auto& n : names) out.statistics.push_back({n, ppc_statistic(n, model.input()), {}, 0});

  const auto root = SeedSequence(options.seed).child("ppc");
  auto pick_rng = root.child("draws").rng();
  std::uniform_int_distribution<std::size_t> pick(0, draws.total_draws() - 1);
  out.replicated.rows = options.replications;
  out.replicated.cols = model.input().rows();
  out.replicated.values.reserve(out.replicated.rows * out.replicated.cols);
  for (int r = 0; r < options.replications; ++r) {
    const std::size_t d = pick(pick_rng);
    auto rng = root.child(static_cast<std::uint64_t>(r)).rng();
    const auto rep = model.simulate(draws.draw(static_cast<int>(d / draws.iterations), static_cast<int>(d % draws.iterations)), rng);
    const auto y = Model::responses(rep);
    out.replicated.values.insert(out.replicated.values.end(), y.begin(), y.end());
    for (auto& s : out.statistics) s.replicated.push_back(ppc_statistic(s.name, rep));
  }
  for (auto& s : out.statistics) {
    double tail = 0;
    for (double v : s.replicated) tail += v > s.observed ? 1.0 : v == s.observed ? 0.5 : 0.0;
    s.tail_probability = tail / s.replicated.size();
  }
  return out;
}

Table ppc_table(const PpcResult& result) {
  Table t;
  t.title = "Posterior predictive checks";
  t.columns = {"Statistic", "Observed", "Replicated mean", "Replicated sd", "Tail probability"};
  for (const auto& s : result.statistics) {
    const double m = std::accumulate(s.replicated.begin(), s.replicated.end(), 0.0) / s.replicated.size();
    t.add({s.name, Cell(s.observed, 3), Cell(m, 3), Cell(sample_sd(s.replicated), 3), Cell(s.tail_probability, 3)});
  }
  return t;
}

std::vector<InformativenessFlag> prior_informativeness(const PosteriorDraws& draws,
                                                       const std::vector<std::string>& names,
                                                       const std::vector<double>& prior_sds) {
  if (names.size() != prior_sds.size()) throw ValidationError("prior_informativeness: names and sds differ in length");
  std::vector<InformativenessFlag> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!(prior_sds[i] > 0) || !std::isfinite(prior_sds[i])) {
      throw ValidationError("prior sd of " + names[i] + " must be > 0");
    }
    InformativenessFlag f;
    f.name = names[i];
    f.prior_sd = prior_sds[i];
    f.posterior_sd = sample_sd(draws.flat(draws.index_of(names[i])));
    f.informative = f.posterior_sd > 0.1 * f.prior_sd;
    out.push_back(f);
  }
  return out;
}

std::vector<InformativenessFlag> prior_informativeness(const Model& model, const PosteriorDraws& draws) {
  return prior_informativeness(draws, model.names(), model.prior_sd());
}

bool SensitivityReport::robust() const {
  for (const auto& v : variants) {
    if (!v.converged) return false;
  }
  return max_shift_sd < 0.1;
}

SensitivityReport sensitivity_analysis(const ModelInput& input, const PriorOptions& base,
                                       const SensitivityOptions& options) {
  if (options.multipliers.empty()) throw ValidationError("sensitivity: no multipliers");
  for (double m : options.multipliers) {
    if (!(m > 0) || !std::isfinite(m)) throw ValidationError("sensitivity multipliers must be > 0");
  }
  options.sampler.validate();

  SensitivityReport report;
  std::vector<double> multipliers = options.multipliers;
  if (std::find(multipliers.begin(), multipliers.end(), 1.0) == multipliers.end()) multipliers.push_back(1.0);
  report.baseline = std::find(multipliers.begin(), multipliers.end(), 1.0) - multipliers.begin();

  for (double m : multipliers) {
    SensitivityVariant v;
    v.multiplier = m;
    v.priors = base;
    if (options.blocks.empty()) {
      v.priors.scale = base.scale * m;
    } else {
      for (const auto& b : options.blocks) {
        const auto it = base.block.find(b);
        v.priors.block[b] = (it == base.block.end() ? 1.0 : it->second) * m;
      }
    }
    v.priors.validate();
    report.variants.push_back(std::move(v));
  }

  const auto baseline_model = make_model(input, base);
  std::vector<int> summarized;
  for (const auto& b : baseline_model->blocks()) {
    if (b.kind == BlockKind::Effect) continue;
    for (int i = b.offset; i < b.offset + b.size; ++i) {
      summarized.push_back(i);
      report.names.push_back(baseline_model->names()[i]);
    }
  }

  const int jobs = std::min<int>(resolve_jobs(options.jobs), static_cast<int>(report.variants.size()));
  SamplerConfig sampler = options.sampler;
  if (jobs > 1) sampler.jobs = 1;
  std::vector<PosteriorDraws> fits(report.variants.size());
  std::vector<std::exception_ptr> errors(report.variants.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < report.variants.size();) {
      try {
        auto& v = report.variants[i];
        const auto model = make_model(input, v.priors);
        fits[i] = nuts_sample(model->target(), sampler);
        const auto diag = diagnose(fits[i], options.rhat_threshold);
        v.max_rhat = diag.max_rhat();
        v.divergences = diag.divergences;
        v.problems = diag.problems();
        v.converged = v.problems.empty();
        for (int p : summarized) v.params.push_back(interval_summary(model->names()[p], fits[i].flat(p), options.mass));
        if (i == report.baseline) {
          for (const auto& f : prior_informativeness(*model, fits[i])) {
            if (std::find(report.names.begin(), report.names.end(), f.name) != report.names.end()) {
              report.informative.push_back(f.informative);
            }
          }
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const auto& base_params = report.variants[report.baseline].params;
  for (std::size_t p = 0; p < report.names.size(); ++p) {
    double shift = 0;
    for (const auto& v : report.variants) shift = std::max(shift, std::abs(v.params[p].mean - base_params[p].mean));
    report.max_shift.push_back(shift);
    const double sd = base_params[p].sd;
    report.shift_in_sd.push_back(sd > 0 ? shift / sd : (shift > 0 ? INFINITY : 0.0));
    report.max_shift_sd = std::max(report.max_shift_sd, report.shift_in_sd.back());
  }
  return report;
}

Table sensitivity_table(const SensitivityReport& report) {
  Table t;
  t.title = "Prior sensitivity";
  t.columns = {"Parameter"};
  for (const auto& v : report.variants) t.columns.push_back("Mean x" + format_shortest(v.multiplier));
  t.columns.insert(t.columns.end(), {"Max shift", "Shift / sd", "Informative prior"});
  for (std::size_t p = 0; p < report.names.size(); ++p) {
    std::vector<Cell> row{report.names[p]};
    for (const auto& v : report.variants) row.emplace_back(v.params[p].mean, 3);
    row.emplace_back(report.max_shift[p], 3);
    row.emplace_back(report.shift_in_sd[p], 3);
    row.emplace_back(p < report.informative.size() && report.informative[p] ? "yes" : "no");
    t.add(std::move(row));
  }
  return t;
}

}  // namespace bayesbench
