// Population-based searchers: particle swarm, differential evolution and
// cuckoo search. All of them keep the incumbent on noisy readings.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bayesbench/math.hpp"
#include "evaluator.hpp"

namespace bayesbench::detail {
namespace {

using Point = std::vector<double>;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

void run_pso(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng) {
  const int n = static_cast<int>(spec.param("population"));
  const int d = eval.dimension();
  const double c1 = spec.param("C1"), c2 = spec.param("C2"), w = spec.param("w");
  const double v_min = spec.param("v_min"), v_max = spec.param("v_max");

  std::vector<Point> x(n), v(n, Point(d, 0.0)), pbest(n);
  std::vector<double> pbest_f(n);
  Point gbest;
  double gbest_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    x[i] = eval.uniform_point(rng);
    pbest[i] = x[i];
    pbest_f[i] = eval(x[i]);
    if (pbest_f[i] < gbest_f) {
      gbest_f = pbest_f[i];
      gbest = x[i];
    }
  }
  for (;;) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) {
        const double vel = w * v[i][k] + c1 * uniform01(rng) * (pbest[i][k] - x[i][k]) +
                           c2 * uniform01(rng) * (gbest[k] - x[i][k]);
        v[i][k] = std::clamp(vel, v_min, v_max);
        x[i][k] += v[i][k];
      }
      eval.clamp(x[i]);
      const double f = eval(x[i]);
      if (f < pbest_f[i]) {
        pbest_f[i] = f;
        pbest[i] = x[i];
      }
      if (f < gbest_f) {
        gbest_f = f;
        gbest = x[i];
      }
    }
  }
}

// rand/1/bin with generation-synchronous greedy selection.
void run_differential_evolution(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng) {
  const int n = static_cast<int>(spec.param("population"));
  const int d = eval.dimension();
  const double f_scale = spec.param("F"), cr = spec.param("CR");

  std::vector<Point> pop(n);
  std::vector<double> fit(n);
  for (int i = 0; i < n; ++i) {
    pop[i] = eval.uniform_point(rng);
    fit[i] = eval(pop[i]);
  }
  std::vector<Point> trial(n, Point(d));
  std::vector<double> trial_f(n);
  std::uniform_int_distribution<int> pick(0, n - 1), pick_dim(0, d - 1);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      int r1, r2, r3;
      do r1 = pick(rng); while (r1 == i);
      do r2 = pick(rng); while (r2 == i || r2 == r1);
      do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
      const int j_rand = pick_dim(rng);
      for (int k = 0; k < d; ++k) {
        trial[i][k] = (uniform01(rng) < cr || k == j_rand) ? pop[r1][k] + f_scale * (pop[r2][k] - pop[r3][k])
                                                            : pop[i][k];
      }
      eval.clamp(trial[i]);
      trial_f[i] = eval(trial[i]);
    }
    for (int i = 0; i < n; ++i) {
      if (trial_f[i] <= fit[i]) {
        pop[i] = trial[i];
        fit[i] = trial_f[i];
      }
    }
  }
}

namespace {

// Mantegna's algorithm for a Levy-stable step with exponent beta.
double levy_step(Rng& rng, double beta) {
  const double num = std::tgamma(1 + beta) * std::sin(math::kPi * beta / 2);
  const double den = std::tgamma((1 + beta) / 2) * beta * std::pow(2.0, (beta - 1) / 2);
  const double sigma_u = std::pow(num / den, 1 / beta);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double u = normal(rng) * sigma_u;
  const double v = normal(rng);
  return u / std::pow(std::abs(v), 1 / beta);
}

}  // namespace

void run_cuckoo_search(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng) {
  const int n = static_cast<int>(spec.param("population"));
  const int d = eval.dimension();
  const double pa = spec.param("pa"), alpha = spec.param("alpha");
  constexpr double kBeta = 1.5;

  std::vector<Point> nest(n);
  std::vector<double> fit(n);
  for (int i = 0; i < n; ++i) {
    nest[i] = eval.uniform_point(rng);
    fit[i] = eval(nest[i]);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  Point candidate(d);
  for (;;) {
    const int best = static_cast<int>(std::min_element(fit.begin(), fit.end()) - fit.begin());
    const Point best_nest = nest[best];
    // Levy flights; a new egg replaces a randomly chosen nest if it is better.
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) {
        const double step = alpha * levy_step(rng, kBeta) * (nest[i][k] - best_nest[k]);
        candidate[k] = nest[i][k] + step * normal(rng);
      }
      eval.clamp(candidate);
      const double f = eval(candidate);
      const int j = pick(rng);
      if (f < fit[j]) {
        nest[j] = candidate;
        fit[j] = f;
      }
    }
    // A fraction pa of each nest's coordinates is rebuilt by a biased random walk.
    std::vector<int> perm1(n), perm2(n);
    std::iota(perm1.begin(), perm1.end(), 0);
    std::iota(perm2.begin(), perm2.end(), 0);
    std::shuffle(perm1.begin(), perm1.end(), rng);
    std::shuffle(perm2.begin(), perm2.end(), rng);
    for (int i = 0; i < n; ++i) {
      const double r = uniform01(rng);
      for (int k = 0; k < d; ++k) {
        const bool discovered = uniform01(rng) < pa;
        candidate[k] = nest[i][k] + (discovered ? r * (nest[perm1[i]][k] - nest[perm2[i]][k]) : 0.0);
      }
      eval.clamp(candidate);
      const double f = eval(candidate);
      if (f < fit[i]) {
        nest[i] = candidate;
        fit[i] = f;
      }
    }
  }
}

}  // namespace bayesbench::detail
