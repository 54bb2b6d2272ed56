#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bayesbench/benchfns.hpp"

namespace bayesbench {

enum class AlgorithmId {
  PSO,
  DifferentialEvolution,
  SimulatedAnnealing,
  NelderMead,
  CuckooSearch,
  CMAES,
  RandomSearch1,
  RandomSearch2,
};

std::string to_string(AlgorithmId id);
AlgorithmId parse_algorithm(const std::string& name);
std::vector<AlgorithmId> all_algorithms();

struct AlgorithmSpec {
  AlgorithmId id;
  std::map<std::string, double> params;

  double param(const std::string& name) const;
};

struct TracePoint {
  long evaluation;  // 1-based index of the objective call
  double delta_f;   // running best noiseless f - f_min
};

struct OptRun {
  std::vector<double> best_x;
  double best_f_true = 0;
  std::vector<TracePoint> trace;  // change points only
  long evaluations_used = 0;
  double cpu_seconds = 0;
};

/// Default parameters of the algorithm roster (population sizes, coefficients).
AlgorithmSpec default_params(AlgorithmId id);
AlgorithmSpec default_params(const std::string& name);

/// Smallest budget the algorithm can run with (one full initial population).
long minimum_budget(const AlgorithmSpec& alg, int dimension);

/// Runs one optimization with `budget` total objective calls. The algorithm
/// only sees noisy values; the trace and best_f_true use the noiseless
/// objective. Proposals outside the box are clamped onto it.
OptRun optimize(const AlgorithmSpec& alg, const BenchmarkFunction& fn, const NoiseSpec& noise, long budget,
                std::uint64_t seed, bool measure_cpu = true);

}  // namespace bayesbench
