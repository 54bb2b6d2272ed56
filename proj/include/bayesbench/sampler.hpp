#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bayesbench {

/// Log density over an unconstrained parameter vector.
struct Target {
  int dimension = 0;
  std::vector<std::string> names;
  /// Returns log p(q) (up to a constant) and writes its gradient into `grad`.
  /// Must be safe to call from several threads at once.
  std::function<double(std::span<const double> q, std::span<double> grad)> log_density_grad;
  /// Maps an unconstrained point onto the reported scale. Identity when empty.
  std::function<void(std::span<const double> q, std::span<double> out)> constrain;
};

struct SamplerConfig {
  int chains = 4;
  int warmup = 1000;
  int iterations = 1000;  // post-warmup draws per chain
  double target_accept = 0.8;
  int max_depth = 10;
  std::uint64_t seed = 0;
  int jobs = 0;              // concurrent chains; <= 0 means one thread per chain
  bool adapt = true;         // step size and metric adaptation during warmup
  double step_size = 0;      // initial step size; 0 runs the search heuristic
  double init_radius = 2.0;  // inits drawn from U(-r, r)

  void validate() const;
};

/// Post-warmup draws on the constrained scale, chain-major.
struct PosteriorDraws {
  std::vector<std::string> names;
  int chains = 0;
  int iterations = 0;
  int dimension = 0;
  std::vector<double> values;          // [chain][iteration][param]
  std::vector<std::uint8_t> divergent; // [chain][iteration]
  std::vector<int> treedepth;          // [chain][iteration]
  std::vector<double> accept_stat;     // [chain][iteration]
  std::vector<double> step_size;       // per chain, after adaptation
  std::vector<std::vector<double>> inv_metric;  // per chain
  int max_depth = 10;

  double at(int chain, int iteration, int param) const {
    return values[(static_cast<std::size_t>(chain) * iterations + iteration) * dimension + param];
  }
  std::span<const double> draw(int chain, int iteration) const {
    return {values.data() + (static_cast<std::size_t>(chain) * iterations + iteration) * dimension,
            static_cast<std::size_t>(dimension)};
  }
  std::size_t total_draws() const { return static_cast<std::size_t>(chains) * iterations; }
  /// Draws of one parameter, one vector per chain.
  std::vector<std::vector<double>> chain_values(int param) const;
  /// Draws of one parameter, all chains concatenated.
  std::vector<double> flat(int param) const;
  /// Throws NotFoundError if absent.
  int index_of(const std::string& name) const;
  int divergences() const;
  int treedepth_hits() const;
};

PosteriorDraws nuts_sample(const Target& target, const SamplerConfig& config);

/// Largest relative error |a - b| / max(1, |a|, |b|) between the analytic
/// gradient and central differences at `q`.
double gradient_check(const Target& target, std::span<const double> q, double h = 1e-6);

}  // namespace bayesbench
