#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bayesbench/diagnostics.hpp"
#include "bayesbench/error.hpp"
#include "bayesbench/math.hpp"
#include "bayesbench/random.hpp"
#include "bayesbench/sampler.hpp"

using namespace bayesbench;

namespace {

Target standard_normal(int d) {
  Target t;
  t.dimension = d;
  for (int i = 0; i < d; ++i) t.names.push_back("x[" + std::to_string(i) + "]");
  t.log_density_grad = [](std::span<const double> q, std::span<double> g) {
    double lp = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      lp -= 0.5 * q[i] * q[i];
      g[i] = -q[i];
    }
    return lp;
  };
  return t;
}

// Beta(3, 5) sampled on the logit scale with the Jacobian folded in.
Target beta35() {
  Target t;
  t.dimension = 1;
  t.names = {"theta"};
  t.log_density_grad = [](std::span<const double> q, std::span<double> g) {
    const double theta = math::inv_logit(q[0]);
    g[0] = 3 * (1 - theta) - 5 * theta;
    return 3 * std::log(theta) + 5 * std::log1p(-theta);
  };
  t.constrain = [](std::span<const double> q, std::span<double> out) { out[0] = math::inv_logit(q[0]); };
  return t;
}

// Beta(3, 5) CDF = P(Binomial(7, x) >= 3).
double beta35_cdf(double x) {
  double p = 0;
  for (int k = 3; k <= 7; ++k) p += std::exp(math::lchoose(7, k)) * std::pow(x, k) * std::pow(1 - x, 7 - k);
  return p;
}

double beta35_quantile(double u) {
  double lo = 0, hi = 1;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (beta35_cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = (x.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  return x[lo] + (h - lo) * (x[std::min(lo + 1, x.size() - 1)] - x[lo]);
}

double sd(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= x.size();
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / (x.size() - 1));
}

}  // namespace

TEST_CASE("standard normal oracle") {
  SamplerConfig cfg;
  cfg.chains = 4;
  cfg.warmup = 1000;
  cfg.iterations = 1000;
  cfg.seed = 11;
  const auto draws = nuts_sample(standard_normal(5), cfg);
  CHECK(draws.divergences() == 0);
  const auto diag = diagnose(draws);
  for (int k = 0; k < 5; ++k) {
    const auto x = draws.flat(k);
    double m = 0;
    for (double v : x) m += v;
    m /= x.size();
    CAPTURE(k);
    CHECK(std::abs(m) < 0.05);
    CHECK(std::abs(sd(x) - 1) < 0.05);
    CHECK(diag.params[k].rhat.value < 1.01);
    CHECK(diag.params[k].ess.value > 400);
    CHECK(diag.params[k].ess.value <= 4000);
  }
}

TEST_CASE("Beta(3,5) through a logit transform") {
  SamplerConfig cfg;
  cfg.seed = 5;
  const auto draws = nuts_sample(beta35(), cfg);
  const auto theta = draws.flat(0);
  for (int i = 1; i <= 9; ++i) {
    const double p = i / 10.0;
    CAPTURE(p);
    CHECK(std::abs(quantile(theta, p) - beta35_quantile(p)) < 0.02);
  }
  CHECK(split_rhat(draws, 0).value < 1.01);
}

TEST_CASE("sampling is deterministic and respects the chain count") {
  SamplerConfig cfg;
  cfg.chains = 3;
  cfg.warmup = 100;
  cfg.iterations = 50;
  cfg.seed = 99;
  const auto a = nuts_sample(standard_normal(3), cfg);
  cfg.jobs = 1;
  const auto b = nuts_sample(standard_normal(3), cfg);
  CHECK(a.values == b.values);
  CHECK(a.values.size() == 3u * 50u * 3u);
  cfg.seed = 100;
  CHECK(nuts_sample(standard_normal(3), cfg).values != a.values);
}

TEST_CASE("funnel with an oversized fixed step diverges") {
  Target funnel;
  funnel.dimension = 3;
  funnel.names = {"v", "x1", "x2"};
  funnel.log_density_grad = [](std::span<const double> q, std::span<double> g) {
    const double v = q[0];
    double lp = -v * v / 18;
    g[0] = -v / 9;
    for (int i = 1; i < 3; ++i) {
      const double e = std::exp(-v);
      lp += -0.5 * q[i] * q[i] * e - 0.5 * v;
      g[i] = -q[i] * e;
      g[0] += 0.5 * q[i] * q[i] * e - 0.5;
    }
    return lp;
  };
  SamplerConfig cfg;
  cfg.adapt = false;
  cfg.step_size = 1.5;
  cfg.warmup = 0;
  cfg.iterations = 500;
  cfg.seed = 3;
  const auto draws = nuts_sample(funnel, cfg);
  CHECK(divergence_count(draws) > 0);
  CHECK_FALSE(diagnose(draws).converged());

  cfg.adapt = true;
  cfg.step_size = 0;
  cfg.warmup = 500;
  const auto smooth = nuts_sample(standard_normal(3), cfg);
  CHECK(divergence_count(smooth) == 0);
}

TEST_CASE("split R-hat") {
  std::vector<double> h{0.3, -1.2, 0.8, 2.1, -0.4, 0.0, 1.7, -0.9};
  std::vector<double> chain = h;
  chain.insert(chain.end(), h.begin(), h.end());
  const double n = h.size();
  const auto r = split_rhat({chain, chain});
  REQUIRE(r.defined);
  CHECK(r.value == doctest::Approx(std::sqrt((n - 1) / n)).epsilon(1e-12));

  Rng rng(1);
  std::normal_distribution<double> z(0, 1);
  std::vector<double> a(500), b(500);
  for (auto& v : a) v = z(rng);
  for (auto& v : b) v = 10 + z(rng);
  CHECK(split_rhat({a, b}).value > 1.05);

  const auto flat = split_rhat({std::vector<double>(10, 1.0), std::vector<double>(10, 1.0)});
  CHECK_FALSE(flat.defined);
  CHECK_FALSE(flat.note.empty());
  CHECK_THROWS_AS(split_rhat({a}), ValidationError);
  CHECK_THROWS_AS(split_rhat({{1, 2, 3}, {1, 2, 3}}), ValidationError);
}

TEST_CASE("effective sample size") {
  Rng rng(21);
  std::normal_distribution<double> z(0, 1);
  std::vector<std::vector<double>> iid(4, std::vector<double>(1000));
  for (auto& c : iid) {
    for (auto& v : c) v = z(rng);
  }
  const double total = 4000;
  const auto e = ess(iid);
  CHECK(std::abs(e.value - total) / total < 0.15);
  CHECK(e.value <= total);

  const double rho = 0.9;
  std::vector<std::vector<double>> ar(4, std::vector<double>(5000));
  for (auto& c : ar) {
    double x = z(rng) / std::sqrt(1 - rho * rho);
    for (auto& v : c) {
      x = rho * x + z(rng);
      v = x;
    }
  }
  const double expected = 20000 * (1 - rho) / (1 + rho);
  CHECK(std::abs(ess(ar).value - expected) / expected < 0.25);

  // Anti-correlated draws would exceed N without the cap.
  std::vector<std::vector<double>> anti(2, std::vector<double>(1000));
  for (auto& c : anti) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (i % 2 ? 1 : -1) + 0.01 * z(rng);
  }
  CHECK(ess(anti).value <= 2000);

  const auto flat = ess({std::vector<double>(10, 2.0), std::vector<double>(10, 2.0)});
  CHECK(flat.value == 0);
  CHECK_FALSE(flat.defined);
}

TEST_CASE("gradient check catches a wrong gradient") {
  auto t = standard_normal(4);
  const std::vector<double> q{0.5, -1, 2, 0.1};
  CHECK(gradient_check(t, q) < 1e-6);
  t.log_density_grad = [](std::span<const double> x, std::span<double> g) {
    double lp = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      lp -= 0.5 * x[i] * x[i];
      g[i] = -2 * x[i];
    }
    return lp;
  };
  CHECK(gradient_check(t, q) > 0.1);
}

TEST_CASE("bad targets and configs") {
  SamplerConfig cfg;
  cfg.target_accept = 1.2;
  CHECK_THROWS_AS(nuts_sample(standard_normal(2), cfg), ValidationError);
  Target nowhere = standard_normal(1);
  nowhere.log_density_grad = [](std::span<const double>, std::span<double> g) {
    g[0] = 0;
    return -INFINITY;
  };
  CHECK_THROWS_AS(nuts_sample(nowhere, SamplerConfig{}), ValidationError);
}
