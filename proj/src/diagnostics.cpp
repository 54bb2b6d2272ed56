#include "bayesbench/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "bayesbench/error.hpp"

namespace bayesbench {
namespace {

using Chains = std::vector<std::vector<double>>;

void check_shape(const Chains& chains) {
  if (chains.size() < 2) throw ValidationError("diagnostics need at least 2 chains");
  for (const auto& c : chains) {
    if (c.size() < 4) throw ValidationError("diagnostics need at least 4 draws per chain");
    if (c.size() != chains.front().size()) throw ValidationError("chains differ in length");
  }
}

Chains split(const Chains& chains) {
  Chains out;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + half);
    out.emplace_back(c.end() - half, c.end());
  }
  return out;
}

double mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double sample_variance(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

bool constant(const Chains& chains) {
  for (const auto& c : chains) {
    for (double v : c) {
      if (v != c.front()) return false;
    }
  }
  return true;
}

}  // namespace

Diagnostic split_rhat(const Chains& chains) {
  check_shape(chains);
  const Chains halves = split(chains);
  const double n = static_cast<double>(halves.front().size());
  std::vector<double> means, vars;
  for (const auto& h : halves) {
    means.push_back(mean(h));
    vars.push_back(sample_variance(h));
  }
  const double w = mean(vars);
  if (!(w > 0)) return {0, false, "zero within-chain variance"};
  const double b = n * sample_variance(means);
  const double var_plus = (n - 1) / n * w + b / n;
  return {std::sqrt(var_plus / w), true, ""};
}

Diagnostic ess(const Chains& chains) {
  check_shape(chains);
  if (constant(chains)) return {0, false, "constant chain: effective sample size set to 0"};
  const Chains halves = split(chains);
  const std::size_t m = halves.size();
  const std::size_t n = halves.front().size();

  std::vector<double> chain_mean(m), chain_var(m);
  for (std::size_t j = 0; j < m; ++j) {
    chain_mean[j] = mean(halves[j]);
    double s = 0;
    for (double v : halves[j]) s += (v - chain_mean[j]) * (v - chain_mean[j]);
    chain_var[j] = s / (n - 1);
  }
  // Mean over chains of the biased autocovariance at `lag`.
  auto acov = [&](std::size_t lag) {
    double total = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0;
      for (std::size_t t = 0; t + lag < n; ++t) s += (halves[j][t] - chain_mean[j]) * (halves[j][t + lag] - chain_mean[j]);
      total += s / n;
    }
    return total / m;
  };

  const double mean_var = mean(chain_var);
  const double var_plus = mean_var * (n - 1.0) / n + sample_variance(chain_mean);
  if (!(var_plus > 0)) return {0, false, "zero posterior variance: effective sample size set to 0"};

  std::vector<double> rho(n + 1, 0.0);
  rho[0] = 1;
  double rho_even = 1;
  double rho_odd = 1 - (mean_var - acov(1)) / var_plus;
  rho[1] = rho_odd;
  std::size_t t = 1;
  while (t + 5 < n && rho_even + rho_odd > 0) {
    rho_even = 1 - (mean_var - acov(t + 1)) / var_plus;
    rho_odd = 1 - (mean_var - acov(t + 2)) / var_plus;
    if (rho_even + rho_odd >= 0) {
      rho[t + 1] = rho_even;
      rho[t + 2] = rho_odd;
    }
    t += 2;
  }
  const std::size_t max_t = t;
  if (rho_even > 0) rho[max_t + 1] = rho_even;

  // Initial monotone sequence.
  for (std::size_t k = 1; k + 3 <= max_t; k += 2) {
    if (rho[k + 1] + rho[k + 2] > rho[k - 1] + rho[k]) {
      rho[k + 1] = (rho[k - 1] + rho[k]) / 2;
      rho[k + 2] = rho[k + 1];
    }
  }

  const double total = static_cast<double>(m * n);
  double tau = -1;
  for (std::size_t k = 0; k <= max_t; ++k) tau += 2 * rho[k];
  tau += rho[max_t + 1];
  tau = std::max(tau, 1 / std::log10(total));
  const double draws = static_cast<double>(chains.size() * chains.front().size());
  return {std::min(total / tau, draws), true, ""};
}

Diagnostic split_rhat(const PosteriorDraws& draws, int param) { return split_rhat(draws.chain_values(param)); }

Diagnostic ess(const PosteriorDraws& draws, int param) { return ess(draws.chain_values(param)); }

int divergence_count(const PosteriorDraws& draws) { return draws.divergences(); }

double FitDiagnostics::max_rhat() const {
  double worst = 0;
  for (const auto& p : params) {
    if (p.rhat.defined) worst = std::max(worst, p.rhat.value);
  }
  return worst;
}

double FitDiagnostics::min_ess() const {
  double least = static_cast<double>(total_draws);
  for (const auto& p : params) least = std::min(least, p.ess.value);
  return least;
}

std::vector<std::string> FitDiagnostics::problems() const {
  std::vector<std::string> out;
  if (divergences > 0) out.push_back(std::to_string(divergences) + " divergent post-warmup iterations");
  for (const auto& p : params) {
    if (!p.rhat.defined) {
      out.push_back(p.name + ": R-hat undefined (" + p.rhat.note + ")");
    } else if (!(p.rhat.value < rhat_threshold)) {
      out.push_back(p.name + ": R-hat " + std::to_string(p.rhat.value));
    }
  }
  return out;
}

nlohmann::json FitDiagnostics::to_json() const {
  nlohmann::json ps = nlohmann::json::array();
  for (const auto& p : params) {
    nlohmann::json e{{"name", p.name}, {"mean", p.mean}, {"sd", p.sd}};
    e["rhat"] = p.rhat.defined ? nlohmann::json(p.rhat.value) : nlohmann::json(nullptr);
    e["ess"] = p.ess.value;
    if (!p.rhat.note.empty()) e["rhat_note"] = p.rhat.note;
    if (!p.ess.note.empty()) e["ess_note"] = p.ess.note;
    ps.push_back(std::move(e));
  }
  return {{"divergences", divergences},
          {"treedepth_hits", treedepth_hits},
          {"total_draws", total_draws},
          {"rhat_threshold", rhat_threshold},
          {"max_rhat", max_rhat()},
          {"min_ess", min_ess()},
          {"converged", converged()},
          {"problems", problems()},
          {"parameters", ps}};
}

FitDiagnostics diagnose(const PosteriorDraws& draws, double rhat_threshold) {
  FitDiagnostics out;
  out.divergences = draws.divergences();
  out.treedepth_hits = draws.treedepth_hits();
  out.total_draws = draws.total_draws();
  out.rhat_threshold = rhat_threshold;
  for (int k = 0; k < draws.dimension; ++k) {
    const auto chains = draws.chain_values(k);
    const auto all = draws.flat(k);
    ParamDiagnostics p;
    p.name = draws.names[k];
    p.mean = mean(all);
    p.sd = all.size() > 1 ? std::sqrt(sample_variance(all)) : 0.0;
    p.rhat = split_rhat(chains);
    p.ess = ess(chains);
    out.params.push_back(std::move(p));
  }
  return out;
}

}  // namespace bayesbench
