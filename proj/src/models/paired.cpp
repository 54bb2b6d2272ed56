// Paired-comparison models. Strength of algorithm k on benchmark j is
// a_alg[k] + a_bm[k, j]; the effect matrix is stored row-major by algorithm.

#include <random>

#include "bayesbench/math.hpp"
#include "models_impl.hpp"

namespace bayesbench::detail {
namespace {

std::vector<std::string> pair_labels(const ModelInput& in) {
  std::vector<std::string> out;
  for (const auto& a : in.algorithms) {
    for (const auto& b : in.benchmarks) out.push_back(a + "," + b);
  }
  return out;
}

class PairModel : public Model {
 public:
  PairModel(const ModelInput& in, const PriorOptions& p, bool ties) : Model(in, p), ties_(ties) {
    add_real("a_alg", in.algorithms, 2);
    add_effect(pair_labels(in));
    add_positive("s", {""}, 0.1);
    if (ties_) add_real("nu_tie", {""}, 2);
    finish();
    a_ = offset("a_alg");
    bm_ = offset("a_bm");
    if (ties_) nu_ = offset("nu_tie");
  }

  int effect_index(int k, std::size_t r) const {
    return bm_ + k * static_cast<int>(input_.benchmarks.size()) + input_.bm[r];
  }
  double strength(std::span<const double> t, int k, std::size_t r) const { return t[a_ + k] + t[effect_index(k, r)]; }

  double term(std::span<const double> t, std::size_t r, double* d0, double* d1, double* dnu) const {
    const double s0 = strength(t, input_.alg0[r], r);
    const double s1 = strength(t, input_.alg1[r], r);
    const auto o = input_.outcome[r];
    if (!ties_) {
      const double eta = s1 - s0;
      const double won = o == PairOutcome::Alg1Wins ? 1 : 0;
      if (d1) {
        const double g = won - math::inv_logit(eta);
        *d1 = g;
        *d0 = -g;
      }
      return won * eta - math::log1p_exp(eta);
    }
    const double l[3] = {s0, s1, t[nu_] + 0.5 * (s0 + s1)};
    const double lse = math::log_sum_exp(std::span<const double>(l, 3));
    const int idx = static_cast<int>(o);
    if (d1) {
      const double p0 = std::exp(l[0] - lse), p1 = std::exp(l[1] - lse), pt = std::exp(l[2] - lse);
      const double tie = o == PairOutcome::Tie ? 1 : 0;
      *d0 = (idx == 0) + 0.5 * tie - (p0 + 0.5 * pt);
      *d1 = (idx == 1) + 0.5 * tie - (p1 + 0.5 * pt);
      *dnu = tie - pt;
    }
    return l[idx] - lse;
  }

  double loglik(std::span<const double> t, std::span<double> grad) const override {
    double ll = 0;
    for (std::size_t r = 0; r < input_.rows(); ++r) {
      if (grad.empty()) {
        ll += term(t, r, nullptr, nullptr, nullptr);
        continue;
      }
      double d0 = 0, d1 = 0, dnu = 0;
      ll += term(t, r, &d0, &d1, &dnu);
      const int k0 = input_.alg0[r], k1 = input_.alg1[r];
      grad[a_ + k0] += d0;
      grad[effect_index(k0, r)] += d0;
      grad[a_ + k1] += d1;
      grad[effect_index(k1, r)] += d1;
      if (ties_) grad[nu_] += dnu;
    }
    return ll;
  }

  void pointwise(std::span<const double> t, std::span<double> out) const override {
    for (std::size_t r = 0; r < input_.rows(); ++r) out[r] = term(t, r, nullptr, nullptr, nullptr);
  }

  ModelInput simulate(std::span<const double> t, Rng& rng) const override {
    ModelInput rep = input_;
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t r = 0; r < rep.rows(); ++r) {
      const double s0 = strength(t, rep.alg0[r], r);
      const double s1 = strength(t, rep.alg1[r], r);
      const double x = u(rng);
      if (!ties_) {
        rep.outcome[r] = x < math::inv_logit(s1 - s0) ? PairOutcome::Alg1Wins : PairOutcome::Alg0Wins;
        continue;
      }
      const auto p = davidson_probabilities(s0, s1, t[nu_]);
      rep.outcome[r] = x < p[0] ? PairOutcome::Alg0Wins : x < p[0] + p[1] ? PairOutcome::Alg1Wins : PairOutcome::Tie;
    }
    return rep;
  }

 private:
  bool ties_;
  int a_ = 0, bm_ = 0, nu_ = -1;
};

}  // namespace

std::unique_ptr<Model> make_bradley_terry(const ModelInput& input, const PriorOptions& priors) {
  return std::make_unique<PairModel>(input, priors, false);
}
std::unique_ptr<Model> make_davidson(const ModelInput& input, const PriorOptions& priors) {
  return std::make_unique<PairModel>(input, priors, true);
}

}  // namespace bayesbench::detail
