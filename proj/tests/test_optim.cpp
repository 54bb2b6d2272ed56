#include <doctest.h>

#include <algorithm>
#include <map>
#include <memory>

#include "bayesbench/benchfns.hpp"
#include "bayesbench/error.hpp"
#include "bayesbench/optim.hpp"

using namespace bayesbench;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("default parameters") {
  const auto pso = default_params(AlgorithmId::PSO);
  CHECK(pso.param("C1") == 2);
  CHECK(pso.param("C2") == 2);
  CHECK(pso.param("w") == 0.7);
  CHECK(pso.param("population") == 30);
  const auto de = default_params("DifferentialEvolution");
  CHECK(de.param("F") == 1);
  CHECK(de.param("CR") == 0.8);
  CHECK(default_params(AlgorithmId::CMAES).param("sigma0") == 0.5);
  const auto nm = default_params(AlgorithmId::NelderMead);
  CHECK(nm.param("alpha") == 0.1);
  CHECK(nm.param("gamma") == 0.3);
  CHECK(nm.param("rho") == -0.2);
  CHECK(nm.param("sigma") == -0.2);
  const auto sa = default_params(AlgorithmId::SimulatedAnnealing);
  CHECK(sa.param("delta") == 0.5);
  CHECK(sa.param("T") == 2000);
  CHECK(sa.param("delta_T") == 0.8);
  const auto cs = default_params(AlgorithmId::CuckooSearch);
  CHECK(cs.param("pa") == 0.2);
  CHECK(cs.param("alpha") == 0.5);
  CHECK_THROWS_AS(default_params("HillClimber"), NotFoundError);
  for (auto id : all_algorithms()) CHECK(parse_algorithm(to_string(id)) == id);
}

TEST_CASE("RandomSearch2 evaluates each point twice") {
  auto calls = std::make_shared<std::vector<std::vector<double>>>();
  BenchmarkFunction fn = make_sphere(3);
  auto inner = fn.objective;
  fn.objective = [calls, inner](std::span<const double> x) {
    calls->emplace_back(x.begin(), x.end());
    return inner(x);
  };
  const long k = 25;
  const auto run = optimize(default_params(AlgorithmId::RandomSearch2), fn, NoiseSpec{3}, 2 * k, 5);
  CHECK(run.evaluations_used == 2 * k);
  REQUIRE(calls->size() == static_cast<std::size_t>(2 * k));
  std::map<std::vector<double>, int> seen;
  for (const auto& x : *calls) ++seen[x];
  CHECK(seen.size() == static_cast<std::size_t>(k));
  for (const auto& [x, n] : seen) CHECK(n == 2);
  for (long i = 0; i < k; ++i) CHECK((*calls)[2 * i] == (*calls)[2 * i + 1]);
}

TEST_CASE("trace and budget contract for every algorithm") {
  for (const auto& id : {"sphere6d", "zakharov2d", "price1"}) {
    const auto& fn = registry_get(id);
    for (auto alg : all_algorithms()) {
      CAPTURE(to_string(alg));
      CAPTURE(id);
      const long budget = 100 * fn.dimension;
      const auto run = optimize(default_params(alg), fn, NoiseSpec{3}, budget, 99);
      CHECK(run.evaluations_used <= budget);
      CHECK(run.trace.size() <= static_cast<std::size_t>(budget));
      REQUIRE(!run.trace.empty());
      for (std::size_t i = 1; i < run.trace.size(); ++i) {
        CHECK(run.trace[i].delta_f <= run.trace[i - 1].delta_f);
        CHECK(run.trace[i].evaluation > run.trace[i - 1].evaluation);
      }
      CHECK(run.trace.back().evaluation <= budget);
      CHECK(run.best_x.size() == static_cast<std::size_t>(fn.dimension));
      CHECK(run.best_f_true - fn.f_min >= -1e-9);
      CHECK(std::abs(evaluate(fn, run.best_x) - run.best_f_true) == 0.0);
    }
  }
}

TEST_CASE("same seed gives identical runs") {
  const auto& fn = registry_get("whitley6d");
  for (auto alg : all_algorithms()) {
    CAPTURE(to_string(alg));
    const auto a = optimize(default_params(alg), fn, NoiseSpec{3}, 600, 42, false);
    const auto b = optimize(default_params(alg), fn, NoiseSpec{3}, 600, 42, false);
    CHECK(a.best_x == b.best_x);
    CHECK(a.best_f_true == b.best_f_true);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].evaluation == b.trace[i].evaluation);
      CHECK(a.trace[i].delta_f == b.trace[i].delta_f);
    }
    const auto c = optimize(default_params(alg), fn, NoiseSpec{3}, 600, 43, false);
    CHECK(c.best_x != a.best_x);
  }
}

TEST_CASE("budget below the initial population is rejected") {
  const auto& fn = registry_get("sphere6d");
  CHECK_THROWS_AS(optimize(default_params(AlgorithmId::PSO), fn, NoiseSpec{}, 10, 1), ValidationError);
  CHECK_THROWS_AS(optimize(default_params(AlgorithmId::NelderMead), fn, NoiseSpec{}, 6, 1), ValidationError);
  CHECK_NOTHROW(optimize(default_params(AlgorithmId::NelderMead), fn, NoiseSpec{}, 7, 1));
}

// The default coefficients shrink the simplex on every accepted step, so the
// convergence check uses the classic coefficients in the same trial-point form.
TEST_CASE("NelderMead converges on the 6-D sphere") {
  const auto& fn = registry_get("sphere6d");
  auto classic = default_params(AlgorithmId::NelderMead);
  classic.params = {{"alpha", 1}, {"gamma", 2}, {"rho", -0.5}, {"sigma", 0.5}};
  std::vector<double> finals, stalled;
  for (int seed = 0; seed < 20; ++seed) {
    finals.push_back(optimize(classic, fn, NoiseSpec{}, 10000 * 6, seed, false).best_f_true);
    stalled.push_back(
        optimize(default_params(AlgorithmId::NelderMead), fn, NoiseSpec{}, 10000 * 6, seed, false).best_f_true);
  }
  CHECK(median(finals) <= 1e-6);
  CHECK(median(stalled) > 1.0);
}

TEST_CASE("PSO, DE and CMA-ES reach the sphere floor") {
  const auto& fn = registry_get("sphere6d");
  for (auto alg : {AlgorithmId::PSO, AlgorithmId::DifferentialEvolution, AlgorithmId::CMAES}) {
    CAPTURE(to_string(alg));
    int hits = 0;
    for (int seed = 0; seed < 20; ++seed) {
      hits += optimize(default_params(alg), fn, NoiseSpec{}, 1000 * 6, seed, false).best_f_true < 0.1;
    }
    CHECK(hits >= 18);
  }
}

TEST_CASE("cpu time is measured only on request") {
  const auto& fn = registry_get("sphere6d");
  const auto off = optimize(default_params(AlgorithmId::DifferentialEvolution), fn, NoiseSpec{}, 3000, 1, false);
  CHECK(off.cpu_seconds == 0.0);
  const auto on = optimize(default_params(AlgorithmId::DifferentialEvolution), fn, NoiseSpec{}, 30000, 1, true);
  CHECK(on.cpu_seconds > 0.0);
}
