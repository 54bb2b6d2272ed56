#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bayesbench/benchfns.hpp"
#include "bayesbench/model_input.hpp"
#include "bayesbench/optim.hpp"

namespace bayesbench {

struct ExperimentConfig {
  std::vector<std::string> algorithms;
  std::vector<std::string> benchmarks;
  std::vector<double> noise_levels{0.0, 3.0};
  std::vector<long> budgets_per_dim{20, 100, 1000, 10000, 100000};
  int repetitions = 10;
  std::vector<double> epsilons{1.0, 0.1, 1e-3, 1e-6};
  std::uint64_t master_seed = 0;
  /// When false cpu_seconds is written as 0 so the dataset is byte-reproducible.
  bool measure_cpu = true;

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RunRecord {
  std::string algorithm;
  std::string benchmark;
  int dimension = 0;
  double noise = 0;
  long budget_per_dim = 0;
  int repetition = 0;
  double delta_f = 0;
  double euclid = 0;
  std::vector<bool> solved;               // aligned with Dataset::epsilons
  std::vector<std::optional<long>> feval; // empty = censored
  double cpu_seconds = 0;

  bool operator==(const RunRecord&) const = default;
};

struct Dataset {
  std::vector<double> epsilons{1.0, 0.1, 1e-3, 1e-6};
  std::vector<RunRecord> rows;

  /// Index of `eps` in the logged grid; throws ValidationError if absent.
  std::size_t epsilon_index(double eps) const;
  bool operator==(const Dataset&) const = default;
};

/// Fills the metric fields of a RunRecord from one optimizer run.
void metrics_from_run(const OptRun& run, const BenchmarkFunction& fn, const std::vector<double>& epsilons,
                      RunRecord& record);

/// Per-run seed from the labelled cell coordinates.
std::uint64_t run_seed(std::uint64_t master_seed, const std::string& algorithm, const std::string& benchmark,
                       double noise, long budget_per_dim, int repetition);

/// Full factorial run; rows sorted by (algorithm, benchmark, noise, budget, repetition).
/// `jobs` <= 0 uses the hardware concurrency.
Dataset run_experiment(const ExperimentConfig& config, int jobs = 0);

std::string epsilon_label(double eps);
std::vector<std::string> csv_header(const std::vector<double>& epsilons);

void write_csv(const Dataset& data, std::ostream& out);
void write_csv(const Dataset& data, const std::string& path);
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::string& path);

/// Row selection: every key must match one of its listed values.
/// Keys: algorithm, benchmark, noise, budget_per_dim, dimension, repetition.
class Filters {
 public:
  Filters() = default;
  /// Accepts "key=value" or "key=v1,v2".
  void add(const std::string& expression);
  void add(const std::string& key, const std::string& value);
  bool matches(const RunRecord& r) const;
  bool empty() const { return terms_.empty(); }
  const std::map<std::string, std::set<std::string>>& terms() const { return terms_; }

  static Filters from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  std::map<std::string, std::set<std::string>> terms_;
};

enum class TieMode { RandomWinner, KeepTies };

ModelInput prepare_binomial(const Dataset& data, double epsilon, const Filters& filters);
ModelInput prepare_relative_improvement(const Dataset& data, const Filters& filters);
ModelInput prepare_pairs(const Dataset& data, const Filters& filters, TieMode mode, std::uint64_t seed = 0);
ModelInput prepare_survival(const Dataset& data, double epsilon, const Filters& filters);
ModelInput prepare_cpu(const Dataset& data, const Filters& filters);

}  // namespace bayesbench
