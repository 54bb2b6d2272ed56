#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bayesbench {

enum class ModelKind { Binomial, RelativeImprovement, BradleyTerry, Davidson, Cox, StudentT };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

enum class PairOutcome : int { Alg0Wins = 0, Alg1Wins = 1, Tie = 2 };

/// Design data for one model. Which vectors are populated depends on `kind`:
///
///   Binomial             alg, bm, x_noise, trials, y (successes)
///   RelativeImprovement  alg, bm, y
///   BradleyTerry/Davidson alg0, alg1, bm, outcome
///   Cox                  alg, bm, x_noise, y, event, censor_time
///   StudentT             alg, bm, y
///
/// Indices are 0-based into `algorithms` / `benchmarks`.
struct ModelInput {
  ModelKind kind = ModelKind::Binomial;
  std::vector<std::string> algorithms;
  std::vector<std::string> benchmarks;

  std::vector<int> alg;
  std::vector<int> bm;
  std::vector<double> y;
  std::vector<int> trials;
  std::vector<double> x_noise;
  std::vector<int> event;
  std::vector<double> censor_time;
  std::vector<int> alg0;
  std::vector<int> alg1;
  std::vector<PairOutcome> outcome;

  std::vector<std::string> warnings;

  std::size_t rows() const;
  /// Throws ValidationError on inconsistent lengths, out-of-range indices,
  /// y > N, self-pairs or kind-specific violations.
  void validate() const;
};

}  // namespace bayesbench
