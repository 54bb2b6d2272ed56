#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bayesbench/error.hpp"
#include "bayesbench/posterior.hpp"
#include "bayesbench/random.hpp"

namespace bayesbench {
namespace {

void check_mass(double mass) {
  if (!(mass > 0 && mass < 1)) throw ValidationError("interval mass must be in (0, 1)");
}

void check_samples(std::span<const double> samples, std::size_t minimum) {
  if (samples.size() < minimum) {
    throw ValidationError("interval needs at least " + std::to_string(minimum) + " samples, got " +
                          std::to_string(samples.size()));
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw ValidationError("interval samples must be finite");
  }
}

double sorted_quantile(const std::vector<double>& x, double p) {
  const double h = (x.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - lo) * (x[hi] - x[lo]);
}

std::vector<double> mapped(std::span<const double> x, double (*f)(double)) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), f);
  return out;
}

double reciprocal_exp(double v) { return std::exp(-v); }
double plain_exp(double v) { return std::exp(v); }

TransformSummary transform_summary(const std::string& name, std::span<const double> x, double mass) {
  const auto s = interval_summary(name, x, mass);
  return {name, s.mean, s.hpd};
}

std::vector<Cell> interval_cells(const IntervalSummary& s) {
  std::vector<Cell> row{s.parameter, Cell(s.mean), Cell(s.hpd.low), Cell(s.hpd.high)};
  return row;
}

}  // namespace

Interval hpd_interval(std::span<const double> samples, double mass) {
  check_mass(mass);
  check_samples(samples, 100);
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  // Guard against mass * n landing a hair above an integer.
  const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(mass * n - 1e-9)), 1, n);
  std::size_t best = 0;
  double width = x[k - 1] - x[0];
  for (std::size_t i = 1; i + k <= n; ++i) {
    const double w = x[i + k - 1] - x[i];
    if (w < width) {
      width = w;
      best = i;
    }
  }
  return {x[best], x[best + k - 1]};
}

double quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw ValidationError("quantile of an empty sample");
  if (!(p >= 0 && p <= 1)) throw ValidationError("quantile probability must be in [0, 1]");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  return sorted_quantile(x, p);
}

Interval equal_tail_interval(std::span<const double> samples, double mass) {
  check_mass(mass);
  check_samples(samples, 100);
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  return {sorted_quantile(x, 0.5 * (1 - mass)), sorted_quantile(x, 0.5 * (1 + mass))};
}

IntervalSummary interval_summary(const std::string& name, std::span<const double> samples, double mass) {
  IntervalSummary s;
  s.parameter = name;
  s.hpd = hpd_interval(samples, mass);
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
  double ss = 0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / (samples.size() - 1));
  return s;
}

IntervalSummary odds_ratio_summary(const PosteriorDraws& draws, const std::string& param, double mass) {
  const auto x = draws.flat(draws.index_of(param));
  auto s = interval_summary(param, x, mass);
  s.transform = transform_summary("OR", mapped(x, plain_exp), mass);
  return s;
}

std::vector<HazardRow> hazard_summary(const PosteriorDraws& draws, const std::vector<std::string>& algorithms,
                                      double mass) {
  std::vector<HazardRow> out;
  for (const auto& alg : algorithms) {
    const auto a = draws.flat(draws.index_of("a_alg[" + alg + "]"));
    const auto b = draws.flat(draws.index_of("b_noise[" + alg + "]"));
    HazardRow row;
    row.algorithm = alg;
    row.baseline = interval_summary("baseline hazard", mapped(a, plain_exp), mass);
    row.hazard_ratio = interval_summary("hazard ratio", mapped(b, plain_exp), mass);
    row.expected_feval = interval_summary("expected FEval", mapped(a, reciprocal_exp), mass);
    out.push_back(std::move(row));
  }
  return out;
}

RankSummary rank_posterior(const PosteriorDraws& draws, const std::vector<std::string>& algorithms,
                           const std::vector<std::string>& benchmarks, const RankOptions& options) {
  if (options.samples < 1) throw ValidationError("rank samples must be >= 1");
  if (algorithms.empty() || benchmarks.empty()) throw ValidationError("rank_posterior: no algorithms or benchmarks");
  if (draws.total_draws() == 0) throw ValidationError("rank_posterior: no draws");
  const std::size_t k = algorithms.size();
  std::vector<int> a_idx(k);
  std::vector<std::vector<int>> bm_idx(k, std::vector<int>(benchmarks.size()));
  for (std::size_t i = 0; i < k; ++i) {
    a_idx[i] = draws.index_of("a_alg[" + algorithms[i] + "]");
    for (std::size_t j = 0; j < benchmarks.size(); ++j) {
      bm_idx[i][j] = draws.index_of("a_bm[" + algorithms[i] + "," + benchmarks[j] + "]");
    }
  }

  auto rng = SeedSequence(options.seed).child("ranks").rng();
  std::uniform_int_distribution<std::size_t> pick_draw(0, draws.total_draws() - 1);
  std::uniform_int_distribution<std::size_t> pick_bm(0, benchmarks.size() - 1);

  RankSummary out;
  out.algorithms = algorithms;
  out.distribution.assign(k, std::vector<double>(k, 0.0));
  std::vector<double> strength(k);
  std::vector<std::size_t> order(k);
  for (int s = 0; s < options.samples; ++s) {
    const std::size_t d = pick_draw(rng);
    const int chain = static_cast<int>(d / draws.iterations), iter = static_cast<int>(d % draws.iterations);
    const std::size_t j = options.average_benchmarks ? 0 : pick_bm(rng);
    for (std::size_t i = 0; i < k; ++i) {
      double effect = 0;
      if (options.average_benchmarks) {
        for (int idx : bm_idx[i]) effect += draws.at(chain, iter, idx);
        effect /= benchmarks.size();
      } else {
        effect = draws.at(chain, iter, bm_idx[i][j]);
      }
      strength[i] = draws.at(chain, iter, a_idx[i]) + effect;
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return strength[x] > strength[y]; });
    std::vector<int> rank(k);
    for (std::size_t r = 0; r < k; ++r) rank[order[r]] = static_cast<int>(r) + 1;
    for (std::size_t i = 0; i < k; ++i) out.distribution[i][rank[i] - 1] += 1.0 / options.samples;
    out.samples.push_back(std::move(rank));
  }

  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> r(options.samples);
    for (int s = 0; s < options.samples; ++s) r[s] = out.samples[s][i];
    std::sort(r.begin(), r.end());
    out.median.push_back(sorted_quantile(r, 0.5));
    const double m = std::accumulate(r.begin(), r.end(), 0.0) / r.size();
    double ss = 0;
    for (double v : r) ss += (v - m) * (v - m);
    out.variance.push_back(r.size() > 1 ? ss / (r.size() - 1) : 0.0);
  }
  return out;
}

IntervalSummary group_difference(std::span<const double> a, std::span<const double> b, int n, std::uint64_t seed,
                                 double mass) {
  if (a.size() != b.size() || a.empty()) throw ValidationError("group_difference: draw vectors must match in length");
  if (n < 100) throw ValidationError("group_difference: n must be >= 100");
  auto rng = SeedSequence(seed).child("difference").rng();
  std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
  std::vector<double> diff(n);
  for (auto& d : diff) {
    const std::size_t i = pick(rng);
    d = a[i] - b[i];
  }
  return interval_summary("difference", diff, mass);
}

std::string to_string(RopeDecision d) {
  switch (d) {
    case RopeDecision::AcceptNegligible:
      return "accept-negligible";
    case RopeDecision::RejectAbove:
      return "reject-above";
    case RopeDecision::RejectBelow:
      return "reject-below";
    case RopeDecision::Undecided:
      return "undecided";
  }
  return "undecided";
}

RopeResult rope_fraction(Interval hpd, double rope_low, double rope_high) {
  if (!(rope_low < rope_high)) throw ValidationError("ROPE low must be < high");
  if (!(hpd.low <= hpd.high)) throw ValidationError("HPD low must be <= high");
  RopeResult r;
  r.hpd = hpd;
  const double overlap = std::max(0.0, std::min(hpd.high, rope_high) - std::max(hpd.low, rope_low));
  if (hpd.width() > 0) {
    r.fraction = overlap / hpd.width();
  } else {
    r.fraction = hpd.low >= rope_low && hpd.low <= rope_high ? 1.0 : 0.0;
  }
  if (r.fraction >= 0.95) {
    r.decision = RopeDecision::AcceptNegligible;
  } else if (hpd.low >= rope_high) {
    r.decision = RopeDecision::RejectAbove;
  } else if (hpd.high <= rope_low) {
    r.decision = RopeDecision::RejectBelow;
  } else {
    r.decision = RopeDecision::Undecided;
  }
  return r;
}

RopeResult rope_fraction(std::span<const double> samples, double rope_low, double rope_high, double mass) {
  return rope_fraction(hpd_interval(samples, mass), rope_low, rope_high);
}

Table parameter_table(const Model& model, const PosteriorDraws& draws, double mass, bool include_effects) {
  const std::string transform = model.kind() == ModelKind::Binomial ? "OR" : model.kind() == ModelKind::Cox ? "HR" : "";
  Table t;
  t.title = to_string(model.kind()) + " parameters";
  t.columns = {"Parameter", "Mean", "HPD low", "HPD high"};
  if (!transform.empty()) {
    for (const char* c : {" mean", " HPD low", " HPD high"}) t.columns.push_back(transform + c);
  }
  for (const auto& b : model.blocks()) {
    if (b.kind == BlockKind::Effect && !include_effects) continue;
    for (int i = b.offset; i < b.offset + b.size; ++i) {
      const auto& name = model.names()[i];
      const auto x = draws.flat(draws.index_of(name));
      auto s = interval_summary(name, x, mass);
      auto row = interval_cells(s);
      if (!transform.empty()) {
        const bool applies = transform == "OR" ? b.kind == BlockKind::Real : b.name == "b_noise";
        if (applies) {
          const auto e = transform_summary(transform, mapped(x, plain_exp), mass);
          const int d = transform == "HR" ? 3 : 2;
          row.insert(row.end(), {Cell(e.mean, d), Cell(e.hpd.low, d), Cell(e.hpd.high, d)});
        } else {
          row.insert(row.end(), {Cell(""), Cell(""), Cell("")});
        }
      }
      t.add(std::move(row));
    }
  }
  return t;
}

Table rank_table(const RankSummary& ranks) {
  Table t;
  t.title = "Rank posterior";
  t.columns = {"Algorithm", "Median rank", "Rank variance"};
  std::vector<std::size_t> order(ranks.algorithms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks.median[a] != ranks.median[b] ? ranks.median[a] < ranks.median[b]
                                              : ranks.variance[a] < ranks.variance[b];
  });
  for (auto i : order) t.add({ranks.algorithms[i], Cell(ranks.median[i], 1), Cell(ranks.variance[i], 2)});
  return t;
}

Table hazard_table(const std::vector<HazardRow>& rows) {
  Table t;
  t.title = "Expected function evaluations and hazard ratios";
  t.columns = {"Algorithm",          "Avg FEval",        "FEval HPD low", "FEval HPD high", "Baseline hazard",
               "Hazard ratio (noise)", "HR HPD low", "HR HPD high"};
  for (const auto& r : rows) {
    t.add({r.algorithm, Cell(r.expected_feval.mean, 0), Cell(r.expected_feval.hpd.low, 0),
           Cell(r.expected_feval.hpd.high, 0), Cell(r.baseline.mean, 3), Cell(r.hazard_ratio.mean, 3),
           Cell(r.hazard_ratio.hpd.low, 3), Cell(r.hazard_ratio.hpd.high, 3)});
  }
  return t;
}

Table difference_table(const PosteriorDraws& draws, const std::vector<std::string>& algorithms, int n,
                       std::uint64_t seed, double mass) {
  Table t;
  t.title = "Pairwise intercept differences";
  t.columns = {"Comparison", "Mean", "HPD low", "HPD high"};
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    for (std::size_t j = i + 1; j < algorithms.size(); ++j) {
      const auto a = draws.flat(draws.index_of("a_alg[" + algorithms[i] + "]"));
      const auto b = draws.flat(draws.index_of("a_alg[" + algorithms[j] + "]"));
      const auto pair_seed = SeedSequence(seed).child(algorithms[i]).child(algorithms[j]).seed();
      auto s = group_difference(a, b, n, pair_seed, mass);
      s.parameter = algorithms[i] + " - " + algorithms[j];
      t.add(interval_cells(s));
    }
  }
  return t;
}

}  // namespace bayesbench
