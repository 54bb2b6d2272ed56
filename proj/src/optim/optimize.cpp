#include <cmath>
#include <ctime>

#include "bayesbench/error.hpp"
#include "bayesbench/optim.hpp"
#include "evaluator.hpp"

namespace bayesbench {
namespace {

struct AlgorithmName {
  AlgorithmId id;
  const char* name;
};

constexpr AlgorithmName kNames[] = {
    {AlgorithmId::PSO, "PSO"},
    {AlgorithmId::DifferentialEvolution, "DifferentialEvolution"},
    {AlgorithmId::SimulatedAnnealing, "SimulatedAnnealing"},
    {AlgorithmId::NelderMead, "NelderMead"},
    {AlgorithmId::CuckooSearch, "CuckooSearch"},
    {AlgorithmId::CMAES, "CMAES"},
    {AlgorithmId::RandomSearch1, "RandomSearch1"},
    {AlgorithmId::RandomSearch2, "RandomSearch2"},
};

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return double(ts.tv_sec) + 1e-9 * double(ts.tv_nsec);
}

}  // namespace

std::string to_string(AlgorithmId id) {
  for (const auto& n : kNames) {
    if (n.id == id) return n.name;
  }
  throw ValidationError("invalid algorithm id");
}

AlgorithmId parse_algorithm(const std::string& name) {
  for (const auto& n : kNames) {
    if (name == n.name) return n.id;
  }
  throw NotFoundError("unknown algorithm '" + name + "'");
}

std::vector<AlgorithmId> all_algorithms() {
  std::vector<AlgorithmId> ids;
  for (const auto& n : kNames) ids.push_back(n.id);
  return ids;
}

double AlgorithmSpec::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw ValidationError(to_string(id) + ": missing parameter '" + name + "'");
  return it->second;
}

AlgorithmSpec default_params(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::PSO:
      return {id, {{"C1", 2.0}, {"C2", 2.0}, {"w", 0.7}, {"v_min", -1.5}, {"v_max", 1.5}, {"population", 30}}};
    case AlgorithmId::CuckooSearch:
      return {id, {{"pa", 0.2}, {"alpha", 0.5}, {"population", 30}}};
    case AlgorithmId::SimulatedAnnealing:
      return {id, {{"delta", 0.5}, {"T", 2000}, {"delta_T", 0.8}, {"epsilon", 1e-23}}};
    case AlgorithmId::DifferentialEvolution:
      return {id, {{"F", 1.0}, {"CR", 0.8}, {"population", 30}}};
    case AlgorithmId::NelderMead:
      return {id, {{"alpha", 0.1}, {"gamma", 0.3}, {"rho", -0.2}, {"sigma", -0.2}}};
    case AlgorithmId::CMAES:
      return {id, {{"sigma0", 0.5}}};
    case AlgorithmId::RandomSearch1:
      return {id, {{"repeats", 1}}};
    case AlgorithmId::RandomSearch2:
      return {id, {{"repeats", 2}}};
  }
  throw ValidationError("invalid algorithm id");
}

AlgorithmSpec default_params(const std::string& name) { return default_params(parse_algorithm(name)); }

long minimum_budget(const AlgorithmSpec& alg, int dimension) {
  switch (alg.id) {
    case AlgorithmId::PSO:
    case AlgorithmId::DifferentialEvolution:
    case AlgorithmId::CuckooSearch:
      return static_cast<long>(alg.param("population"));
    case AlgorithmId::NelderMead:
      return dimension + 1;
    case AlgorithmId::CMAES:
      return 4 + static_cast<long>(std::floor(3 * std::log(double(dimension))));
    case AlgorithmId::SimulatedAnnealing:
      return 1;
    case AlgorithmId::RandomSearch1:
    case AlgorithmId::RandomSearch2:
      return static_cast<long>(alg.param("repeats"));
  }
  return 1;
}

namespace {

void validate(const AlgorithmSpec& alg) {
  auto prob = [&](const char* name) {
    const double p = alg.param(name);
    if (!(p >= 0 && p <= 1)) throw ValidationError(to_string(alg.id) + ": " + name + " must lie in [0, 1]");
  };
  auto positive = [&](const char* name) {
    if (!(alg.param(name) >= 1)) throw ValidationError(to_string(alg.id) + ": " + name + " must be >= 1");
  };
  switch (alg.id) {
    case AlgorithmId::PSO:
      positive("population");
      if (alg.param("v_min") > alg.param("v_max")) throw ValidationError("PSO: v_min > v_max");
      break;
    case AlgorithmId::DifferentialEvolution:
      prob("CR");
      if (alg.param("population") < 4) throw ValidationError("DifferentialEvolution: population must be >= 4");
      break;
    case AlgorithmId::CuckooSearch:
      prob("pa");
      if (alg.param("population") < 2) throw ValidationError("CuckooSearch: population must be >= 2");
      break;
    case AlgorithmId::SimulatedAnnealing:
      if (!(alg.param("T") > 0)) throw ValidationError("SimulatedAnnealing: T must be positive");
      break;
    case AlgorithmId::CMAES:
      if (!(alg.param("sigma0") > 0)) throw ValidationError("CMAES: sigma0 must be positive");
      break;
    case AlgorithmId::RandomSearch1:
    case AlgorithmId::RandomSearch2:
      positive("repeats");
      break;
    case AlgorithmId::NelderMead:
      break;
  }
}

}  // namespace

OptRun optimize(const AlgorithmSpec& alg, const BenchmarkFunction& fn, const NoiseSpec& noise, long budget,
                std::uint64_t seed, bool measure_cpu) {
  validate(alg);
  if (noise.sd < 0) throw ValidationError("noise sd must be nonnegative");
  if (budget < 1) throw ValidationError("budget must be positive");
  const long min_budget = minimum_budget(alg, fn.dimension);
  if (budget < min_budget) {
    throw ValidationError(to_string(alg.id) + " on " + fn.id + ": budget " + std::to_string(budget) +
                          " is below the minimum viable " + std::to_string(min_budget));
  }

  const SeedSequence seeds(seed);
  Rng rng = seeds.child("algorithm").rng();
  detail::Evaluator eval(fn, noise, budget, seeds.child("noise").rng());

  const double cpu_start = measure_cpu ? thread_cpu_seconds() : 0.0;
  try {
    switch (alg.id) {
      case AlgorithmId::PSO: detail::run_pso(alg, eval, rng); break;
      case AlgorithmId::DifferentialEvolution: detail::run_differential_evolution(alg, eval, rng); break;
      case AlgorithmId::SimulatedAnnealing: detail::run_simulated_annealing(alg, eval, rng); break;
      case AlgorithmId::NelderMead: detail::run_nelder_mead(alg, eval, rng); break;
      case AlgorithmId::CuckooSearch: detail::run_cuckoo_search(alg, eval, rng); break;
      case AlgorithmId::CMAES: detail::run_cmaes(alg, eval, rng); break;
      case AlgorithmId::RandomSearch1:
      case AlgorithmId::RandomSearch2: detail::run_random_search(alg, eval, rng); break;
    }
  } catch (const detail::BudgetExhausted&) {
  }
  const double cpu_end = measure_cpu ? thread_cpu_seconds() : 0.0;

  OptRun run;
  run.best_x = eval.best_x();
  run.best_f_true = eval.best_true();
  run.trace = eval.trace();
  run.evaluations_used = eval.used();
  run.cpu_seconds = cpu_end - cpu_start;
  return run;
}

}  // namespace bayesbench
