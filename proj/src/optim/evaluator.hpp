#pragma once

#include <algorithm>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "bayesbench/benchfns.hpp"
#include "bayesbench/optim.hpp"
#include "bayesbench/random.hpp"

namespace bayesbench::detail {

/// Thrown by Evaluator when an algorithm asks for one call past its budget.
struct BudgetExhausted {};

/// Budgeted objective wrapper shared by all algorithms. Owns the noise stream,
/// the noiseless trace and the incumbent (best noisy reading).
class Evaluator {
 public:
  Evaluator(const BenchmarkFunction& fn, NoiseSpec noise, long budget, Rng noise_rng)
      : fn_(fn), noise_(noise), budget_(budget), noise_rng_(noise_rng) {}

  double operator()(std::span<const double> x) {
    if (used_ >= budget_) throw BudgetExhausted{};
    const double f_true = evaluate(fn_, x);
    double f = f_true;
    if (noise_.sd > 0) f += noise_.sd * normal_(noise_rng_);
    ++used_;
    const double delta = f_true - fn_.f_min;
    if (trace_.empty() || delta < trace_.back().delta_f) trace_.push_back({used_, delta});
    if (f < best_noisy_) {
      best_noisy_ = f;
      best_true_ = f_true;
      best_x_.assign(x.begin(), x.end());
    }
    return f;
  }

  int dimension() const { return fn_.dimension; }
  long budget() const { return budget_; }
  long used() const { return used_; }
  long remaining() const { return budget_ - used_; }

  void clamp(std::span<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], fn_.bounds[i].low, fn_.bounds[i].high);
  }

  double width(std::size_t i) const { return fn_.bounds[i].high - fn_.bounds[i].low; }
  const Interval& bound(std::size_t i) const { return fn_.bounds[i]; }

  std::vector<double> uniform_point(Rng& rng) const {
    std::vector<double> x(fn_.dimension);
    for (int i = 0; i < fn_.dimension; ++i) {
      x[i] = std::uniform_real_distribution<double>(fn_.bounds[i].low, fn_.bounds[i].high)(rng);
    }
    clamp(x);
    return x;
  }

  const std::vector<double>& best_x() const { return best_x_; }
  double best_true() const { return best_true_; }
  const std::vector<TracePoint>& trace() const { return trace_; }

 private:
  const BenchmarkFunction& fn_;
  NoiseSpec noise_;
  long budget_;
  long used_ = 0;
  Rng noise_rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double best_noisy_ = std::numeric_limits<double>::infinity();
  double best_true_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_x_;
  std::vector<TracePoint> trace_;
};

void run_pso(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng);
void run_differential_evolution(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng);
void run_simulated_annealing(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng);
void run_nelder_mead(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng);
void run_cuckoo_search(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng);
void run_cmaes(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng);
void run_random_search(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng);

}  // namespace bayesbench::detail
