// Single-trajectory searchers: simulated annealing, Nelder-Mead and the two
// random-search baselines.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evaluator.hpp"

namespace bayesbench::detail {

// Neighbour = uniform box of width delta around the current point.
// Cooling is linear: T drops by delta_T * T0 / steps each step, so after the
// whole budget T has fallen by a fraction delta_T of T0.
void run_simulated_annealing(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng) {
  const int d = eval.dimension();
  const double delta = spec.param("delta");
  const double t0 = spec.param("T");
  const double t_floor = spec.param("epsilon");
  const double steps = std::max(1.0, double(eval.budget() - 1));
  const double cooling = spec.param("delta_T") * t0 / steps;

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> x = eval.uniform_point(rng);
  double fx = eval(x);
  double temperature = t0;
  std::vector<double> c(d);
  for (;;) {
    for (int k = 0; k < d; ++k) c[k] = x[k] - delta / 2 + u01(rng) * delta;
    eval.clamp(c);
    const double fc = eval(c);
    const double diff = fc - fx;
    if (diff < 0 || u01(rng) < std::exp(-diff / temperature)) {
      x = c;
      fx = fc;
    }
    temperature = std::max(temperature - cooling, t_floor);
  }
}

// Nelder-Mead with the package-default coefficients. Trial points are
// centroid + coef * (centroid - worst); negative rho/sigma give an inside
// contraction and a flipped shrink towards the best vertex.
void run_nelder_mead(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng) {
  const int d = eval.dimension();
  const double alpha = spec.param("alpha"), gamma = spec.param("gamma");
  const double rho = spec.param("rho"), sigma = spec.param("sigma");

  using Point = std::vector<double>;
  std::vector<Point> simplex(d + 1);
  std::vector<double> f(d + 1);
  simplex[0] = eval.uniform_point(rng);
  for (int i = 1; i <= d; ++i) {
    simplex[i] = simplex[0];
    const double step = 0.1 * eval.width(i - 1);
    // Step inwards when the vertex would leave the box.
    simplex[i][i - 1] += simplex[0][i - 1] + step <= eval.bound(i - 1).high ? step : -step;
    eval.clamp(simplex[i]);
  }
  for (int i = 0; i <= d; ++i) f[i] = eval(simplex[i]);

  std::vector<int> order(d + 1);
  Point centroid(d), trial(d), expanded(d);
  auto toward = [&](Point& out, double coef, const Point& from) {
    for (int k = 0; k < d; ++k) out[k] = centroid[k] + coef * (centroid[k] - from[k]);
    eval.clamp(out);
  };
  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
    const int best = order.front(), worst = order.back(), second_worst = order[d - 1];
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (int i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (int k = 0; k < d; ++k) centroid[k] += simplex[i][k] / d;
    }

    toward(trial, alpha, simplex[worst]);
    const double f_r = eval(trial);
    if (f_r >= f[best] && f_r < f[second_worst]) {
      simplex[worst] = trial;
      f[worst] = f_r;
      continue;
    }
    if (f_r < f[best]) {
      toward(expanded, gamma, simplex[worst]);
      const double f_e = eval(expanded);
      if (f_e < f_r) {
        simplex[worst] = expanded;
        f[worst] = f_e;
      } else {
        simplex[worst] = trial;
        f[worst] = f_r;
      }
      continue;
    }
    toward(trial, rho, simplex[worst]);
    const double f_c = eval(trial);
    if (f_c < f[worst]) {
      simplex[worst] = trial;
      f[worst] = f_c;
      continue;
    }
    const Point anchor = simplex[best];
    for (int i = 0; i <= d; ++i) {
      if (i == best) continue;
      for (int k = 0; k < d; ++k) simplex[i][k] = anchor[k] + sigma * (simplex[i][k] - anchor[k]);
      eval.clamp(simplex[i]);
      f[i] = eval(simplex[i]);
    }
  }
}

// RandomSearch1 evaluates each uniform sample once; RandomSearch2 evaluates it
// twice and the evaluator's incumbent keeps the lower reading.
void run_random_search(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng) {
  const int repeats = static_cast<int>(spec.param("repeats"));
  for (;;) {
    const auto x = eval.uniform_point(rng);
    for (int r = 0; r < repeats; ++r) eval(x);
  }
}

}  // namespace bayesbench::detail
