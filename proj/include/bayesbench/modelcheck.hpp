#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bayesbench/models.hpp"
#include "bayesbench/posterior.hpp"
#include "bayesbench/sampler.hpp"
#include "bayesbench/table.hpp"

namespace bayesbench {

struct WaicReport {
  double lppd = 0;
  double p_waic = 0;
  double waic = 0;  // -2 (lppd - p_waic)
  std::vector<double> lppd_i;
  std::vector<double> p_waic_i;
  std::vector<double> waic_i;
};

/// WAIC from a draws x observations log-likelihood matrix. The per-observation
/// variance uses the n - 1 denominator.
WaicReport waic(const Matrix& loglik);
Table waic_table(const std::vector<std::pair<std::string, WaicReport>>& fits);

struct PpcStatistic {
  std::string name;
  double observed = 0;
  std::vector<double> replicated;
  /// P(T_rep > T_obs) + P(T_rep = T_obs) / 2.
  double tail_probability = 0;
};

struct PpcOptions {
  int replications = 200;
  std::uint64_t seed = 0;
  /// Subset of the model's statistics; empty means all of them.
  std::vector<std::string> statistics;
};

struct PpcResult {
  std::vector<PpcStatistic> statistics;
  Matrix replicated;  // replications x observations
};

/// Statistic names available for a model kind: mean, sd, max, min for
/// continuous responses, plus "rate" (success, event or second-algorithm win
/// fraction) and "tie_rate" where they apply.
std::vector<std::string> ppc_statistics(ModelKind kind);
double ppc_statistic(const std::string& name, const ModelInput& data);

PpcResult posterior_predictive_check(const Model& model, const PosteriorDraws& draws, const PpcOptions& options);
Table ppc_table(const PpcResult& result);

struct InformativenessFlag {
  std::string name;
  double posterior_sd = 0;
  double prior_sd = 0;
  bool informative = false;  // posterior sd > 0.1 x prior sd
};

std::vector<InformativenessFlag> prior_informativeness(const PosteriorDraws& draws,
                                                       const std::vector<std::string>& names,
                                                       const std::vector<double>& prior_sds);
std::vector<InformativenessFlag> prior_informativeness(const Model& model, const PosteriorDraws& draws);

struct SensitivityOptions {
  std::vector<double> multipliers{0.5, 1.0, 2.0};
  /// Blocks to rescale; empty rescales every prior jointly.
  std::vector<std::string> blocks;
  SamplerConfig sampler;
  double mass = 0.95;
  double rhat_threshold = 1.05;
  /// Variant fits running at once (<= 0: hardware concurrency).
  int jobs = 0;
};

struct SensitivityVariant {
  double multiplier = 1;
  PriorOptions priors;
  std::vector<IntervalSummary> params;
  double max_rhat = 0;
  int divergences = 0;
  bool converged = true;
  std::vector<std::string> problems;
};

struct SensitivityReport {
  std::vector<std::string> names;  // parameters other than benchmark effects
  std::vector<SensitivityVariant> variants;
  std::size_t baseline = 0;
  std::vector<double> max_shift;     // per parameter, largest |mean - baseline mean|
  std::vector<double> shift_in_sd;   // max_shift / baseline posterior sd
  std::vector<bool> informative;     // from the baseline fit
  double max_shift_sd = 0;

  /// Every variant converged and no mean moved by 0.1 posterior sd or more.
  bool robust() const;
};

SensitivityReport sensitivity_analysis(const ModelInput& input, const PriorOptions& base,
                                       const SensitivityOptions& options);
Table sensitivity_table(const SensitivityReport& report);

}  // namespace bayesbench
