#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bayesbench/error.hpp"
#include "bayesbench/modelcheck.hpp"
#include "synthetic.hpp"

using namespace bayesbench;

namespace {

SamplerConfig quick(std::uint64_t seed, int warmup = 300, int iterations = 300) {
  SamplerConfig c;
  c.chains = 2;
  c.warmup = warmup;
  c.iterations = iterations;
  c.seed = seed;
  return c;
}

std::vector<double> theta_for(const Model& m, const std::vector<std::pair<std::string, double>>& values,
                              double fill = 0) {
  std::vector<double> theta(m.dimension(), fill);
  for (const auto& [name, v] : values) {
    const auto it = std::find(m.names().begin(), m.names().end(), name);
    REQUIRE(it != m.names().end());
    theta[it - m.names().begin()] = v;
  }
  return theta;
}

PosteriorDraws repeated(const Model& m, const std::vector<double>& theta, int iterations) {
  PosteriorDraws d;
  d.names = m.names();
  d.chains = 2;
  d.iterations = iterations;
  d.dimension = m.dimension();
  for (int i = 0; i < 2 * iterations; ++i) d.values.insert(d.values.end(), theta.begin(), theta.end());
  return d;
}

}  // namespace

TEST_CASE("WAIC hand-computed oracle") {
  Matrix ll{2, 1, {std::log(0.5), std::log(0.25)}};
  const auto r = waic(ll);
  const double lppd = std::log(0.375);
  const double d = std::log(0.5) - std::log(0.25);
  const double p = d * d / 2;
  CHECK(r.lppd == doctest::Approx(lppd).epsilon(1e-12));
  CHECK(r.p_waic == doctest::Approx(p).epsilon(1e-12));
  CHECK(std::abs(r.waic - (-2 * (lppd - p))) < 1e-9);
  CHECK(std::abs(r.waic - 2.442) < 5e-4);
  CHECK(std::abs(r.lppd + 0.9808) < 1e-4);
  CHECK(std::abs(r.p_waic - 0.2402) < 1e-4);

  Matrix same{3, 1, {-1.2, -1.2, -1.2}};
  CHECK(waic(same).p_waic == 0);
  CHECK(waic(same).waic == doctest::Approx(2.4));

  CHECK_THROWS_AS(waic(Matrix{1, 1, {-1}}), ValidationError);
  CHECK_THROWS_AS(waic(Matrix{2, 1, {-1, NAN}}), ValidationError);
}

TEST_CASE("WAIC invariances") {
  Rng rng(3);
  std::normal_distribution<double> z(-2, 0.7);
  const std::size_t S = 50, N = 7;
  Matrix ll{S, N, std::vector<double>(S * N)};
  for (auto& v : ll.values) v = z(rng);
  const auto base = waic(ll);

  double sum = 0;
  for (double w : base.waic_i) sum += w;
  CHECK(sum == doctest::Approx(base.waic).epsilon(1e-12));
  CHECK(base.p_waic >= 0);

  // Reverse draw order and observation order.
  Matrix flipped{S, N, std::vector<double>(S * N)};
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t c = 0; c < N; ++c) flipped(S - 1 - s, N - 1 - c) = ll(s, c);
  }
  CHECK(waic(flipped).waic == doctest::Approx(base.waic).epsilon(1e-12));

  // Every draw twice: lppd unchanged, each variance scaled by 2(S-1)/(2S-1).
  Matrix doubled{2 * S, N, ll.values};
  doubled.values.insert(doubled.values.end(), ll.values.begin(), ll.values.end());
  const auto dup = waic(doubled);
  CHECK(dup.lppd == doctest::Approx(base.lppd).epsilon(1e-12));
  CHECK(dup.p_waic == doctest::Approx(base.p_waic * 2.0 * (S - 1) / (2.0 * S - 1)).epsilon(1e-12));
}

TEST_CASE("WAIC prefers a model with a real predictor") {
  auto in = synthetic::skeleton(ModelKind::Binomial, 2, 6, 4);
  const auto truth_model = make_model(in);
  Rng rng(10);
  const auto data =
      truth_model->simulate(theta_for(*truth_model, {{"a_alg[alg0]", -1.5}, {"a_alg[alg1]", 1.5}, {"s", 0.3}}), rng);

  auto null_data = data;
  null_data.algorithms = {"pooled"};
  std::fill(null_data.alg.begin(), null_data.alg.end(), 0);

  const auto full = make_model(data);
  const auto null = make_model(null_data);
  const auto w_full = waic(pointwise_loglik(*full, nuts_sample(full->target(), quick(1))));
  const auto w_null = waic(pointwise_loglik(*null, nuts_sample(null->target(), quick(1))));
  CHECK(w_full.waic < w_null.waic);
  CHECK(waic_table({{"full", w_full}, {"null", w_null}}).rows.size() == 2);
}

TEST_CASE("predictive checks are calibrated on self-simulated data") {
  int inside = 0, total = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto in = synthetic::skeleton(ModelKind::RelativeImprovement, 2, 3, 5);
    const auto gen = make_model(in);
    Rng rng(100 + trial);
    const auto data = gen->simulate(
        theta_for(*gen, {{"a_alg[alg0]", 0.2}, {"a_alg[alg1]", -0.1}, {"s", 0.2}, {"sigma", 0.5}}), rng);
    const auto model = make_model(data);
    const auto draws = nuts_sample(model->target(), quick(trial, 200, 200));
    const auto ppc = posterior_predictive_check(*model, draws, {.replications = 200, .seed = 7});
    for (const auto& s : ppc.statistics) {
      ++total;
      inside += s.tail_probability > 0.05 && s.tail_probability < 0.95;
    }
  }
  CAPTURE(inside);
  CHECK(inside >= 0.8 * total);
}

TEST_CASE("predictive checks flag a misfit and are reproducible") {
  auto in = synthetic::skeleton(ModelKind::RelativeImprovement, 2, 3, 4);
  std::fill(in.y.begin(), in.y.end(), 0.25);
  const auto model = make_model(in);
  const auto draws = repeated(*model, theta_for(*model, {{"s", 1}, {"sigma", 1}}), 100);
  const auto ppc = posterior_predictive_check(*model, draws, {.replications = 50, .seed = 3});
  CHECK(ppc.replicated.rows == 50);
  CHECK(ppc.replicated.cols == in.rows());
  for (const auto& s : ppc.statistics) {
    CAPTURE(s.name);
    if (s.name == "sd" || s.name == "max") CHECK(s.tail_probability == 1);
    if (s.name == "min") CHECK(s.tail_probability == 0);
  }
  const auto again = posterior_predictive_check(*model, draws, {.replications = 50, .seed = 3});
  CHECK(again.replicated.values == ppc.replicated.values);
  CHECK(ppc_table(ppc).rows.size() == 4);

  CHECK_THROWS_AS(posterior_predictive_check(*model, draws, {.replications = 5, .statistics = {"tie_rate"}}),
                  ValidationError);
}

TEST_CASE("model-specific predictive statistics") {
  auto pairs = synthetic::skeleton(ModelKind::Davidson, 3, 2, 1);
  pairs.outcome = {PairOutcome::Tie, PairOutcome::Alg1Wins, PairOutcome::Alg0Wins,
                   PairOutcome::Tie, PairOutcome::Tie,      PairOutcome::Alg1Wins};
  CHECK(ppc_statistic("tie_rate", pairs) == doctest::Approx(0.5));
  CHECK(ppc_statistic("rate", pairs) == doctest::Approx(1.0 / 3));
  auto bin = synthetic::skeleton(ModelKind::Binomial, 1, 1, 2);
  bin.y = {3, 7};
  CHECK(ppc_statistic("rate", bin) == doctest::Approx(0.5));
  CHECK(ppc_statistics(ModelKind::Cox).back() == "rate");
}

TEST_CASE("prior informativeness rule") {
  PosteriorDraws d;
  d.names = {"a", "b"};
  d.chains = 2;
  d.iterations = 500;
  d.dimension = 2;
  Rng rng(1);
  std::normal_distribution<double> z(0, 1);
  std::vector<double> a(1000), b(1000);
  for (auto& v : a) v = z(rng);
  for (auto& v : b) v = z(rng);
  // Rescale to exact sample sds 0.6 and 0.4.
  auto rescale = [](std::vector<double>& x, double target) {
    double m = 0, ss = 0;
    for (double v : x) m += v;
    m /= x.size();
    for (double v : x) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / (x.size() - 1));
    for (auto& v : x) v = (v - m) * target / sd;
  };
  rescale(a, 0.6);
  rescale(b, 0.4);
  for (int i = 0; i < 1000; ++i) d.values.insert(d.values.end(), {a[i], b[i]});
  const auto flags = prior_informativeness(d, {"a", "b"}, {5, 5});
  CHECK(flags[0].posterior_sd == doctest::Approx(0.6));
  CHECK(flags[0].informative);
  CHECK_FALSE(flags[1].informative);
  CHECK_THROWS_AS(prior_informativeness(d, {"a"}, {0}), ValidationError);
}

TEST_CASE("sensitivity with abundant data is robust") {
  auto in = synthetic::skeleton(ModelKind::Binomial, 2, 20, 10);
  const auto gen = make_model(in);
  Rng rng(4);
  const auto data = gen->simulate(
      theta_for(*gen, {{"a_alg[alg0]", -0.5}, {"a_alg[alg1]", 0.8}, {"b_noise[alg0]", -0.4}, {"s", 0.5}}), rng);
  SensitivityOptions opt;
  opt.sampler = quick(12, 300, 500);
  opt.jobs = 1;
  const auto report = sensitivity_analysis(data, {}, opt);
  REQUIRE(report.variants.size() == 3);
  CHECK(report.variants[report.baseline].multiplier == 1);
  CAPTURE(report.max_shift_sd);
  CHECK(report.max_shift_sd < 0.1);
  for (const auto& v : report.variants) CHECK(v.converged);
  CHECK(report.robust());
  CHECK(report.names.size() == 5);
  CHECK(std::none_of(report.informative.begin(), report.informative.end(), [](bool b) { return b; }));

  // The multiplier-1 variant is the baseline fit itself.
  const auto model = make_model(data);
  const auto direct = nuts_sample(model->target(), opt.sampler);
  const auto& base = report.variants[report.baseline].params;
  for (std::size_t p = 0; p < report.names.size(); ++p) {
    CHECK(base[p].mean == interval_summary("", direct.flat(direct.index_of(report.names[p]))).mean);
  }
  const auto table = sensitivity_table(report);
  CHECK(table.columns[1] == "Mean x0.5");
}

TEST_CASE("sensitivity with two observations shows prior dependence") {
  auto in = synthetic::skeleton(ModelKind::Binomial, 1, 1, 2);
  in.y = {4, 6};
  SensitivityOptions opt;
  opt.sampler = quick(5, 300, 300);
  opt.sampler.target_accept = 0.95;
  opt.multipliers = {0.5, 2};
  const auto report = sensitivity_analysis(in, {}, opt);
  CHECK(report.variants.size() == 3);
  CHECK(report.max_shift_sd > 0.1);
  CHECK(std::any_of(report.informative.begin(), report.informative.end(), [](bool b) { return b; }));
  CHECK_FALSE(report.robust());

  opt.multipliers = {0};
  CHECK_THROWS_AS(sensitivity_analysis(in, {}, opt), ValidationError);
}
