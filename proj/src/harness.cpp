#include "bayesbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "bayesbench/error.hpp"
#include "bayesbench/random.hpp"

namespace bayesbench {
namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config.") + key + ": " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ValidationError("config.algorithms: must be nonempty");
  if (benchmarks.empty()) throw ValidationError("config.benchmarks: must be nonempty");
  if (noise_levels.empty()) throw ValidationError("config.noise_levels: must be nonempty");
  if (budgets_per_dim.empty()) throw ValidationError("config.budgets_per_dim: must be nonempty");
  if (epsilons.empty()) throw ValidationError("config.epsilons: must be nonempty");
  if (repetitions < 1) throw ValidationError("config.repetitions: must be >= 1");
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    try {
      parse_algorithm(algorithms[i]);
    } catch (const NotFoundError& e) {
      throw NotFoundError("config.algorithms[" + std::to_string(i) + "]: " + e.what());
    }
  }
  for (std::size_t i = 0; i < benchmarks.size(); ++i) {
    try {
      registry_get(benchmarks[i]);
    } catch (const NotFoundError& e) {
      throw NotFoundError("config.benchmarks[" + std::to_string(i) + "]: " + e.what());
    }
  }
  for (std::size_t i = 0; i < noise_levels.size(); ++i) {
    if (!(noise_levels[i] >= 0)) {
      throw ValidationError("config.noise_levels[" + std::to_string(i) + "]: must be >= 0");
    }
  }
  for (std::size_t i = 0; i < budgets_per_dim.size(); ++i) {
    if (budgets_per_dim[i] < 1) {
      throw ValidationError("config.budgets_per_dim[" + std::to_string(i) + "]: must be >= 1");
    }
  }
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    if (!(epsilons[i] < epsilons[i - 1])) throw ValidationError("config.epsilons: must be strictly decreasing");
  }
  if (!(epsilons.back() > 0)) throw ValidationError("config.epsilons: must be positive");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  static const std::set<std::string> known{"algorithms",  "benchmarks", "noise_levels", "budgets_per_dim",
                                           "repetitions", "epsilons",   "master_seed",  "measure_cpu"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ValidationError("config." + key + ": unknown field");
  }
  ExperimentConfig c;
  c.algorithms = field(j, "algorithms", c.algorithms);
  c.benchmarks = field(j, "benchmarks", c.benchmarks);
  c.noise_levels = field(j, "noise_levels", c.noise_levels);
  c.budgets_per_dim = field(j, "budgets_per_dim", c.budgets_per_dim);
  c.repetitions = field(j, "repetitions", c.repetitions);
  c.epsilons = field(j, "epsilons", c.epsilons);
  c.master_seed = field(j, "master_seed", c.master_seed);
  c.measure_cpu = field(j, "measure_cpu", c.measure_cpu);
  c.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"algorithms", algorithms},   {"benchmarks", benchmarks},   {"noise_levels", noise_levels},
          {"budgets_per_dim", budgets_per_dim}, {"repetitions", repetitions}, {"epsilons", epsilons},
          {"master_seed", master_seed}, {"measure_cpu", measure_cpu}};
}

std::size_t Dataset::epsilon_index(double eps) const {
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (std::abs(epsilons[i] - eps) <= 1e-12 * std::max(1.0, std::abs(eps))) return i;
  }
  throw ValidationError("epsilon " + epsilon_label(eps) + " is not in the logged grid");
}

void metrics_from_run(const OptRun& run, const BenchmarkFunction& fn, const std::vector<double>& epsilons,
                      RunRecord& record) {
  record.dimension = fn.dimension;
  record.delta_f = run.best_f_true - fn.f_min;
  record.euclid = distance_to_nearest_minimum(fn, run.best_x);
  record.cpu_seconds = run.cpu_seconds;
  record.solved.assign(epsilons.size(), false);
  record.feval.assign(epsilons.size(), std::nullopt);
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    if (!(record.delta_f < epsilons[e])) continue;
    record.solved[e] = true;
    // The incumbent is an evaluated point, so the noiseless running best
    // reached this level no later than the end of the run.
    for (const auto& tp : run.trace) {
      if (tp.delta_f < epsilons[e]) {
        record.feval[e] = tp.evaluation;
        break;
      }
    }
  }
}

std::uint64_t run_seed(std::uint64_t master_seed, const std::string& algorithm, const std::string& benchmark,
                       double noise, long budget_per_dim, int repetition) {
  std::uint64_t noise_bits;
  static_assert(sizeof(noise_bits) == sizeof(noise));
  std::memcpy(&noise_bits, &noise, sizeof(noise));
  return SeedSequence(master_seed)
      .child(algorithm)
      .child(benchmark)
      .child(noise_bits)
      .child(static_cast<std::uint64_t>(budget_per_dim))
      .child(static_cast<std::uint64_t>(repetition))
      .seed();
}

Dataset run_experiment(const ExperimentConfig& config, int jobs) {
  config.validate();
  Dataset data;
  data.epsilons = config.epsilons;
  for (const auto& a : config.algorithms) {
    for (const auto& b : config.benchmarks) {
      for (double noise : config.noise_levels) {
        for (long budget : config.budgets_per_dim) {
          for (int rep = 0; rep < config.repetitions; ++rep) {
            RunRecord r;
            r.algorithm = a;
            r.benchmark = b;
            r.noise = noise;
            r.budget_per_dim = budget;
            r.repetition = rep;
            data.rows.push_back(std::move(r));
          }
        }
      }
    }
  }
  // Fail fast on budgets that some algorithm cannot start with.
  for (const auto& a : config.algorithms) {
    const auto spec = default_params(a);
    for (const auto& b : config.benchmarks) {
      const auto& fn = registry_get(b);
      for (long budget : config.budgets_per_dim) {
        if (budget * fn.dimension < minimum_budget(spec, fn.dimension)) {
          throw ValidationError("config.budgets_per_dim: " + std::to_string(budget) + " is too small for " + a +
                                " on " + b);
        }
      }
    }
  }

  const int workers = std::max(1, jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= data.rows.size()) return;
      RunRecord& r = data.rows[i];
      try {
        const auto& fn = registry_get(r.benchmark);
        const auto run = optimize(default_params(r.algorithm), fn, NoiseSpec{r.noise}, r.budget_per_dim * fn.dimension,
                                  run_seed(config.master_seed, r.algorithm, r.benchmark, r.noise, r.budget_per_dim,
                                           r.repetition),
                                  config.measure_cpu);
        metrics_from_run(run, fn, config.epsilons, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = data.rows.size();
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(data.rows.begin(), data.rows.end(), [](const RunRecord& x, const RunRecord& y) {
    return std::tie(x.algorithm, x.benchmark, x.noise, x.budget_per_dim, x.repetition) <
           std::tie(y.algorithm, y.benchmark, y.noise, y.budget_per_dim, y.repetition);
  });
  return data;
}

}  // namespace bayesbench
