#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bayesbench/model_input.hpp"
#include "bayesbench/random.hpp"
#include "bayesbench/sampler.hpp"

namespace bayesbench {

/// Prior-scale multipliers. Normal priors have their sd multiplied, exponential
/// priors their mean (rate divided). `block` entries apply on top of `scale`
/// for a single block: a_alg, b_noise, s, sigma, nu, nu_tie.
struct PriorOptions {
  double scale = 1.0;
  std::map<std::string, double> block;

  double multiplier(const std::string& name) const;
  void validate() const;
  static PriorOptions from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

enum class BlockKind {
  Real,      // Normal(0, sd) prior
  Positive,  // Exponential(rate) prior, sampled on the log scale
  Effect,    // benchmark effect s * z with z ~ Normal(0, 1)
};

struct ParameterBlock {
  std::string name;  // a_alg, b_noise, a_bm, s, sigma, nu, nu_tie
  BlockKind kind = BlockKind::Real;
  int offset = 0;
  int size = 0;
  double prior = 0;  // sd for Real, rate for Positive, unused for Effect
};

/// Row-major draws x observations.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

/// A hierarchical model over one ModelInput. The unconstrained vector holds
/// log-scale positives and raw benchmark effects; the constrained vector holds
/// the reported parameters (a_bm = s * z) in the same order.
class Model {
 public:
  virtual ~Model() = default;

  ModelKind kind() const { return input_.kind; }
  const ModelInput& input() const { return input_; }
  int dimension() const { return dimension_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ParameterBlock>& blocks() const { return blocks_; }
  const ParameterBlock& block(const std::string& name) const;
  const PriorOptions& priors() const { return priors_; }

  /// Joint log posterior and its gradient on the unconstrained scale.
  double log_density_grad(std::span<const double> u, std::span<double> grad) const;
  void constrain(std::span<const double> u, std::span<double> theta) const;
  void unconstrain(std::span<const double> theta, std::span<double> u) const;
  Target target() const;

  /// Total log likelihood at constrained parameters; adds d/dtheta into
  /// `grad` when it is non-empty.
  virtual double loglik(std::span<const double> theta, std::span<double> grad) const = 0;
  /// One log-likelihood term per observation row.
  virtual void pointwise(std::span<const double> theta, std::span<double> out) const = 0;
  /// Replicated data set drawn from the likelihood at `theta`.
  virtual ModelInput simulate(std::span<const double> theta, Rng& rng) const = 0;

  /// Prior sd of every constrained parameter (1/rate for exponentials,
  /// sqrt(2)/rate_s for benchmark effects).
  std::vector<double> prior_sd() const;
  /// Per-row response in a numeric form suited to predictive checks.
  static std::vector<double> responses(const ModelInput& in);

 protected:
  Model(ModelInput input, PriorOptions priors);
  void add_real(const std::string& name, const std::vector<std::string>& labels, double sd);
  void add_positive(const std::string& name, const std::vector<std::string>& labels, double rate);
  void add_effect(const std::vector<std::string>& labels);
  void finish();

  int offset(const std::string& name) const { return block(name).offset; }

  ModelInput input_;
  PriorOptions priors_;

 private:
  std::vector<ParameterBlock> blocks_;
  std::vector<std::string> names_;
  int dimension_ = 0;
  int scale_offset_ = -1;
};

std::unique_ptr<Model> make_model(const ModelInput& input, const PriorOptions& priors = {});

/// Per-draw per-observation log likelihood: total_draws x rows.
Matrix pointwise_loglik(const Model& model, const PosteriorDraws& draws);

/// Run lengths used for each model when the caller does not override them.
SamplerConfig default_sampler_config(ModelKind kind);

/// Davidson outcome probabilities (alg0 wins, alg1 wins, tie).
std::array<double, 3> davidson_probabilities(double strength0, double strength1, double nu_tie);

}  // namespace bayesbench
