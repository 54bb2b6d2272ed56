#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bayesbench/sampler.hpp"

namespace bayesbench {

/// A diagnostic that can be undefined (e.g. zero within-chain variance).
struct Diagnostic {
  double value = 0;
  bool defined = false;
  std::string note;
};

/// Split-chain potential scale reduction. Each chain is cut in half (the
/// middle draw is dropped for odd lengths). Needs >= 2 chains of >= 4 draws.
Diagnostic split_rhat(const std::vector<std::vector<double>>& chains);
Diagnostic split_rhat(const PosteriorDraws& draws, int param);

/// Effective sample size from split chains with Geyer's initial positive and
/// monotone sequence truncation, capped at the total draw count.
Diagnostic ess(const std::vector<std::vector<double>>& chains);
Diagnostic ess(const PosteriorDraws& draws, int param);

int divergence_count(const PosteriorDraws& draws);

struct ParamDiagnostics {
  std::string name;
  double mean = 0;
  double sd = 0;
  Diagnostic rhat;
  Diagnostic ess;
};

struct FitDiagnostics {
  std::vector<ParamDiagnostics> params;
  int divergences = 0;
  int treedepth_hits = 0;
  std::size_t total_draws = 0;
  double rhat_threshold = 1.05;

  double max_rhat() const;
  double min_ess() const;
  /// Reasons the fit fails the convergence criteria; empty when it passes.
  std::vector<std::string> problems() const;
  bool converged() const { return problems().empty(); }
  nlohmann::json to_json() const;
};

FitDiagnostics diagnose(const PosteriorDraws& draws, double rhat_threshold = 1.05);

}  // namespace bayesbench
