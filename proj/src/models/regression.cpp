// Models with one row per (algorithm, benchmark) observation: binomial
// success counts, relative improvement, exponential survival and Student-t
// CPU time.

#include <cmath>
#include <random>

#include "bayesbench/error.hpp"
#include "bayesbench/math.hpp"
#include "models_impl.hpp"

namespace bayesbench::detail {
namespace {

std::vector<std::string> none() { return {""}; }

class BinomialModel : public Model {
 public:
  BinomialModel(const ModelInput& in, const PriorOptions& p) : Model(in, p) {
    add_real("a_alg", in.algorithms, 5);
    add_real("b_noise", in.algorithms, 5);
    add_effect(in.benchmarks);
    add_positive("s", none(), 0.1);
    finish();
    a_ = offset("a_alg");
    b_ = offset("b_noise");
    bm_ = offset("a_bm");
    for (std::size_t r = 0; r < in.rows(); ++r) log_choose_.push_back(math::lchoose(in.trials[r], in.y[r]));
  }

  double eta(std::span<const double> t, std::size_t r) const {
    const auto& in = input_;
    return t[a_ + in.alg[r]] + t[bm_ + in.bm[r]] + t[b_ + in.alg[r]] * in.x_noise[r];
  }

  double loglik(std::span<const double> t, std::span<double> grad) const override {
    const auto& in = input_;
    double ll = 0;
    for (std::size_t r = 0; r < in.rows(); ++r) {
      const double e = eta(t, r);
      ll += log_choose_[r] + in.y[r] * e - in.trials[r] * math::log1p_exp(e);
      if (grad.empty()) continue;
      const double g = in.y[r] - in.trials[r] * math::inv_logit(e);
      grad[a_ + in.alg[r]] += g;
      grad[bm_ + in.bm[r]] += g;
      grad[b_ + in.alg[r]] += g * in.x_noise[r];
    }
    return ll;
  }

  void pointwise(std::span<const double> t, std::span<double> out) const override {
    const auto& in = input_;
    for (std::size_t r = 0; r < in.rows(); ++r) {
      const double e = eta(t, r);
      out[r] = log_choose_[r] + in.y[r] * e - in.trials[r] * math::log1p_exp(e);
    }
  }

  ModelInput simulate(std::span<const double> t, Rng& rng) const override {
    ModelInput rep = input_;
    for (std::size_t r = 0; r < rep.rows(); ++r) {
      rep.y[r] = std::binomial_distribution<int>(rep.trials[r], math::inv_logit(eta(t, r)))(rng);
    }
    return rep;
  }

 private:
  int a_, b_, bm_;
  std::vector<double> log_choose_;
};

class RelativeImprovementModel : public Model {
 public:
  RelativeImprovementModel(const ModelInput& in, const PriorOptions& p) : Model(in, p) {
    add_real("a_alg", in.algorithms, 1);
    add_effect(in.benchmarks);
    add_positive("s", none(), 0.1);
    add_positive("sigma", none(), 1);
    finish();
    a_ = offset("a_alg");
    bm_ = offset("a_bm");
    sigma_ = offset("sigma");
  }

  double mu(std::span<const double> t, std::size_t r) const { return t[a_ + input_.alg[r]] + t[bm_ + input_.bm[r]]; }

  double loglik(std::span<const double> t, std::span<double> grad) const override {
    const double sigma = t[sigma_];
    double ll = 0;
    for (std::size_t r = 0; r < input_.rows(); ++r) {
      const double z = (input_.y[r] - mu(t, r)) / sigma;
      ll += -0.5 * z * z - std::log(sigma) - math::kLogSqrtTwoPi;
      if (grad.empty()) continue;
      grad[a_ + input_.alg[r]] += z / sigma;
      grad[bm_ + input_.bm[r]] += z / sigma;
      grad[sigma_] += (z * z - 1) / sigma;
    }
    return ll;
  }

  void pointwise(std::span<const double> t, std::span<double> out) const override {
    for (std::size_t r = 0; r < input_.rows(); ++r) out[r] = math::normal_lpdf(input_.y[r], mu(t, r), t[sigma_]);
  }

  ModelInput simulate(std::span<const double> t, Rng& rng) const override {
    if (!(t[sigma_] > 0)) throw ValidationError("simulate: sigma must be > 0");
    ModelInput rep = input_;
    for (std::size_t r = 0; r < rep.rows(); ++r) rep.y[r] = std::normal_distribution<double>(mu(t, r), t[sigma_])(rng);
    return rep;
  }

 private:
  int a_, bm_, sigma_;
};

class CoxModel : public Model {
 public:
  CoxModel(const ModelInput& in, const PriorOptions& p) : Model(in, p) {
    add_real("a_alg", in.algorithms, 10);
    add_real("b_noise", in.algorithms, 2);
    add_effect(in.benchmarks);
    add_positive("s", none(), 0.1);
    finish();
    a_ = offset("a_alg");
    b_ = offset("b_noise");
    bm_ = offset("a_bm");
  }

  double log_rate(std::span<const double> t, std::size_t r) const {
    const auto& in = input_;
    return t[a_ + in.alg[r]] + t[bm_ + in.bm[r]] + t[b_ + in.alg[r]] * in.x_noise[r];
  }

  // Event rows use the exponential density, censored rows its survival function.
  double term(double log_lambda, std::size_t r) const {
    const double hazard = std::exp(log_lambda) * input_.y[r];
    return input_.event[r] ? log_lambda - hazard : -hazard;
  }

  double loglik(std::span<const double> t, std::span<double> grad) const override {
    const auto& in = input_;
    double ll = 0;
    for (std::size_t r = 0; r < in.rows(); ++r) {
      const double eta = log_rate(t, r);
      ll += term(eta, r);
      if (grad.empty()) continue;
      const double g = in.event[r] - std::exp(eta) * in.y[r];
      grad[a_ + in.alg[r]] += g;
      grad[bm_ + in.bm[r]] += g;
      grad[b_ + in.alg[r]] += g * in.x_noise[r];
    }
    return ll;
  }

  void pointwise(std::span<const double> t, std::span<double> out) const override {
    for (std::size_t r = 0; r < input_.rows(); ++r) out[r] = term(log_rate(t, r), r);
  }

  ModelInput simulate(std::span<const double> t, Rng& rng) const override {
    ModelInput rep = input_;
    for (std::size_t r = 0; r < rep.rows(); ++r) {
      const double time = std::exponential_distribution<double>(std::exp(log_rate(t, r)))(rng);
      if (!rep.censor_time.empty() && time >= rep.censor_time[r]) {
        rep.y[r] = rep.censor_time[r];
        rep.event[r] = 0;
      } else {
        rep.y[r] = std::max(time, std::numeric_limits<double>::min());
        rep.event[r] = 1;
      }
    }
    return rep;
  }

 private:
  int a_, b_, bm_;
};

class StudentTModel : public Model {
 public:
  StudentTModel(const ModelInput& in, const PriorOptions& p) : Model(in, p) {
    add_real("a_alg", in.algorithms, 1);
    add_effect(in.benchmarks);
    add_positive("s", none(), 1);
    add_positive("sigma", in.algorithms, 1);
    add_positive("nu", none(), 1.0 / 30);
    finish();
    a_ = offset("a_alg");
    bm_ = offset("a_bm");
    sigma_ = offset("sigma");
    nu_ = offset("nu");
  }

  double mu(std::span<const double> t, std::size_t r) const { return t[a_ + input_.alg[r]] + t[bm_ + input_.bm[r]]; }

  double loglik(std::span<const double> t, std::span<double> grad) const override {
    const auto& in = input_;
    const double nu = t[nu_];
    const double norm = std::lgamma(0.5 * (nu + 1)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * math::kPi);
    const double dnorm = grad.empty() ? 0 : 0.5 * math::digamma(0.5 * (nu + 1)) - 0.5 * math::digamma(0.5 * nu) - 0.5 / nu;
    double ll = 0;
    for (std::size_t r = 0; r < in.rows(); ++r) {
      const int k = in.alg[r];
      const double sigma = t[sigma_ + k];
      const double z = (in.y[r] - mu(t, r)) / sigma;
      const double q = 1 + z * z / nu;
      ll += norm - std::log(sigma) - 0.5 * (nu + 1) * std::log(q);
      if (grad.empty()) continue;
      const double dz = -(nu + 1) * z / (nu * q);  // d/dz of the kernel
      grad[a_ + k] -= dz / sigma;
      grad[bm_ + in.bm[r]] -= dz / sigma;
      grad[sigma_ + k] += (-1 - dz * z) / sigma;
      grad[nu_] += dnorm - 0.5 * std::log(q) + 0.5 * (nu + 1) * z * z / (nu * nu * q);
    }
    return ll;
  }

  void pointwise(std::span<const double> t, std::span<double> out) const override {
    const double nu = t[nu_];
    const double norm = std::lgamma(0.5 * (nu + 1)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * math::kPi);
    for (std::size_t r = 0; r < input_.rows(); ++r) {
      const double sigma = t[sigma_ + input_.alg[r]];
      const double z = (input_.y[r] - mu(t, r)) / sigma;
      out[r] = norm - std::log(sigma) - 0.5 * (nu + 1) * std::log1p(z * z / nu);
    }
  }

  ModelInput simulate(std::span<const double> t, Rng& rng) const override {
    if (!(t[nu_] > 0)) throw ValidationError("simulate: nu must be > 0");
    ModelInput rep = input_;
    std::student_t_distribution<double> student(t[nu_]);
    for (std::size_t r = 0; r < rep.rows(); ++r) {
      const double sigma = t[sigma_ + rep.alg[r]];
      if (!(sigma > 0)) throw ValidationError("simulate: sigma must be > 0");
      rep.y[r] = mu(t, r) + sigma * student(rng);
    }
    return rep;
  }

 private:
  int a_, bm_, sigma_, nu_;
};

}  // namespace

std::unique_ptr<Model> make_binomial(const ModelInput& input, const PriorOptions& priors) {
  return std::make_unique<BinomialModel>(input, priors);
}
std::unique_ptr<Model> make_relative_improvement(const ModelInput& input, const PriorOptions& priors) {
  return std::make_unique<RelativeImprovementModel>(input, priors);
}
std::unique_ptr<Model> make_cox(const ModelInput& input, const PriorOptions& priors) {
  return std::make_unique<CoxModel>(input, priors);
}
std::unique_ptr<Model> make_student_t(const ModelInput& input, const PriorOptions& priors) {
  return std::make_unique<StudentTModel>(input, priors);
}

}  // namespace bayesbench::detail
