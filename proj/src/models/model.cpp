#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "bayesbench/error.hpp"
#include "bayesbench/math.hpp"
#include "bayesbench/models.hpp"
#include "models_impl.hpp"

namespace bayesbench {

double PriorOptions::multiplier(const std::string& name) const {
  const auto it = block.find(name);
  return scale * (it == block.end() ? 1.0 : it->second);
}

void PriorOptions::validate() const {
  if (!(scale > 0) || !std::isfinite(scale)) throw ValidationError("priors.scale must be > 0");
  static const std::set<std::string> known{"a_alg", "b_noise", "s", "sigma", "nu", "nu_tie"};
  for (const auto& [name, m] : block) {
    if (!known.count(name)) throw ValidationError("priors.blocks: unknown block '" + name + "'");
    if (!(m > 0) || !std::isfinite(m)) throw ValidationError("priors.blocks." + name + " must be > 0");
  }
}

PriorOptions PriorOptions::from_json(const nlohmann::json& j) {
  PriorOptions p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw ValidationError("priors: expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "scale") {
      if (!value.is_number()) throw ValidationError("priors.scale: expected a number");
      p.scale = value.get<double>();
    } else if (key == "blocks") {
      if (!value.is_object()) throw ValidationError("priors.blocks: expected an object");
      for (const auto& [name, m] : value.items()) {
        if (!m.is_number()) throw ValidationError("priors.blocks." + name + ": expected a number");
        p.block[name] = m.get<double>();
      }
    } else {
      throw ValidationError("priors." + key + ": unknown field");
    }
  }
  p.validate();
  return p;
}

nlohmann::json PriorOptions::to_json() const { return {{"scale", scale}, {"blocks", block}}; }

Model::Model(ModelInput input, PriorOptions priors) : input_(std::move(input)), priors_(std::move(priors)) {
  input_.validate();
  priors_.validate();
}

const ParameterBlock& Model::block(const std::string& name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw NotFoundError("model has no parameter block '" + name + "'");
}

void Model::add_real(const std::string& name, const std::vector<std::string>& labels, double sd) {
  blocks_.push_back({name, BlockKind::Real, dimension_, static_cast<int>(labels.size()), sd});
  for (const auto& l : labels) names_.push_back(l.empty() ? name : name + "[" + l + "]");
  dimension_ += static_cast<int>(labels.size());
}

void Model::add_positive(const std::string& name, const std::vector<std::string>& labels, double rate) {
  blocks_.push_back({name, BlockKind::Positive, dimension_, static_cast<int>(labels.size()), rate});
  for (const auto& l : labels) names_.push_back(l.empty() ? name : name + "[" + l + "]");
  dimension_ += static_cast<int>(labels.size());
}

void Model::add_effect(const std::vector<std::string>& labels) {
  blocks_.push_back({"a_bm", BlockKind::Effect, dimension_, static_cast<int>(labels.size()), 0});
  for (const auto& l : labels) names_.push_back("a_bm[" + l + "]");
  dimension_ += static_cast<int>(labels.size());
}

void Model::finish() {
  for (const auto& b : blocks_) {
    if (b.name == "s") scale_offset_ = b.offset;
  }
  for (const auto& b : blocks_) {
    if (b.kind == BlockKind::Effect && scale_offset_ < 0) throw std::logic_error("benchmark effect without scale");
  }
}

void Model::constrain(std::span<const double> u, std::span<double> theta) const {
  for (const auto& b : blocks_) {
    for (int i = b.offset; i < b.offset + b.size; ++i) theta[i] = b.kind == BlockKind::Positive ? std::exp(u[i]) : u[i];
  }
  for (const auto& b : blocks_) {
    if (b.kind != BlockKind::Effect) continue;
    const double s = theta[scale_offset_];
    for (int i = b.offset; i < b.offset + b.size; ++i) theta[i] = s * u[i];
  }
}

void Model::unconstrain(std::span<const double> theta, std::span<double> u) const {
  for (const auto& b : blocks_) {
    for (int i = b.offset; i < b.offset + b.size; ++i) {
      switch (b.kind) {
        case BlockKind::Real:
          u[i] = theta[i];
          break;
        case BlockKind::Positive:
          if (!(theta[i] > 0)) throw ValidationError(names_[i] + " must be > 0");
          u[i] = std::log(theta[i]);
          break;
        case BlockKind::Effect:
          u[i] = theta[i] / theta[scale_offset_];
          break;
      }
    }
  }
}

double Model::log_density_grad(std::span<const double> u, std::span<double> grad) const {
  std::vector<double> theta(dimension_), g_theta(dimension_, 0.0);
  constrain(u, theta);
  for (double t : theta) {
    if (!std::isfinite(t)) {
      std::fill(grad.begin(), grad.end(), 0.0);
      return -std::numeric_limits<double>::infinity();
    }
  }
  double lp = loglik(theta, g_theta);

  for (const auto& b : blocks_) {
    const double m = b.kind == BlockKind::Effect ? 1.0 : priors_.multiplier(b.name);
    for (int i = b.offset; i < b.offset + b.size; ++i) {
      switch (b.kind) {
        case BlockKind::Real: {
          const double sd = b.prior * m;
          lp += math::normal_lpdf(theta[i], 0, sd);
          grad[i] = g_theta[i] - theta[i] / (sd * sd);
          break;
        }
        case BlockKind::Positive: {
          const double rate = b.prior / m;
          lp += math::exponential_lpdf(theta[i], rate) + u[i];
          grad[i] = (g_theta[i] - rate) * theta[i] + 1;
          break;
        }
        case BlockKind::Effect:
          lp += math::normal_lpdf(u[i], 0, 1);
          grad[i] = g_theta[i] * theta[scale_offset_] - u[i];
          break;
      }
    }
  }
  // d theta_bm / d log s = theta_bm.
  for (const auto& b : blocks_) {
    if (b.kind != BlockKind::Effect) continue;
    for (int i = b.offset; i < b.offset + b.size; ++i) grad[scale_offset_] += g_theta[i] * theta[i];
  }
  return lp;
}

Target Model::target() const {
  Target t;
  t.dimension = dimension_;
  t.names = names_;
  t.log_density_grad = [this](std::span<const double> u, std::span<double> g) { return log_density_grad(u, g); };
  t.constrain = [this](std::span<const double> u, std::span<double> theta) { constrain(u, theta); };
  return t;
}

std::vector<double> Model::prior_sd() const {
  std::vector<double> out(dimension_);
  for (const auto& b : blocks_) {
    for (int i = b.offset; i < b.offset + b.size; ++i) {
      switch (b.kind) {
        case BlockKind::Real:
          out[i] = b.prior * priors_.multiplier(b.name);
          break;
        case BlockKind::Positive:
          out[i] = priors_.multiplier(b.name) / b.prior;
          break;
        case BlockKind::Effect: {
          const auto& s = block("s");
          out[i] = std::sqrt(2.0) * priors_.multiplier("s") / s.prior;
          break;
        }
      }
    }
  }
  return out;
}

std::vector<double> Model::responses(const ModelInput& in) {
  if (in.kind == ModelKind::BradleyTerry || in.kind == ModelKind::Davidson) {
    std::vector<double> out;
    for (auto o : in.outcome) out.push_back(static_cast<int>(o));
    return out;
  }
  return in.y;
}

std::unique_ptr<Model> make_model(const ModelInput& input, const PriorOptions& priors) {
  switch (input.kind) {
    case ModelKind::Binomial:
      return detail::make_binomial(input, priors);
    case ModelKind::RelativeImprovement:
      return detail::make_relative_improvement(input, priors);
    case ModelKind::BradleyTerry:
      return detail::make_bradley_terry(input, priors);
    case ModelKind::Davidson:
      return detail::make_davidson(input, priors);
    case ModelKind::Cox:
      return detail::make_cox(input, priors);
    case ModelKind::StudentT:
      return detail::make_student_t(input, priors);
  }
  throw ValidationError("unknown model kind");
}

Matrix pointwise_loglik(const Model& model, const PosteriorDraws& draws) {
  if (draws.dimension != model.dimension()) throw ValidationError("draws do not match the model dimension");
  Matrix m;
  m.rows = draws.total_draws();
  m.cols = model.input().rows();
  m.values.resize(m.rows * m.cols);
  std::size_t r = 0;
  for (int c = 0; c < draws.chains; ++c) {
    for (int i = 0; i < draws.iterations; ++i, ++r) {
      model.pointwise(draws.draw(c, i), std::span<double>(m.values.data() + r * m.cols, m.cols));
    }
  }
  return m;
}

SamplerConfig default_sampler_config(ModelKind kind) {
  SamplerConfig c;
  c.chains = 4;
  c.warmup = 200;
  switch (kind) {
    case ModelKind::RelativeImprovement:
      c.iterations = 1800;
      break;
    case ModelKind::BradleyTerry:
    case ModelKind::Davidson:
      c.iterations = 3800;
      break;
    default:
      c.iterations = 2800;
      break;
  }
  return c;
}

std::array<double, 3> davidson_probabilities(double strength0, double strength1, double nu_tie) {
  const double l[3] = {strength0, strength1, nu_tie + 0.5 * (strength0 + strength1)};
  const double lse = math::log_sum_exp(std::span<const double>(l, 3));
  return {std::exp(l[0] - lse), std::exp(l[1] - lse), std::exp(l[2] - lse)};
}

}  // namespace bayesbench
