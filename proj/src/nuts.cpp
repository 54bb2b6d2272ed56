// Multinomial NUTS with a diagonal metric. Trajectory building, the extra
// sub-tree U-turn checks and biased progressive sampling at the top level
// follow the usual Stan design; warmup uses dual averaging on the step size
// and doubling windows for the metric.

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "bayesbench/error.hpp"
#include "bayesbench/math.hpp"
#include "bayesbench/random.hpp"
#include "bayesbench/sampler.hpp"

namespace bayesbench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxDeltaH = 1000;

using Vec = std::vector<double>;

struct PhasePoint {
  Vec q, p, grad;
  double logp = 0;
};

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

class DualAveraging {
 public:
  void restart(double step) {
    mu_ = std::log(10 * step);
    counter_ = 0;
    s_bar_ = 0;
    x_bar_ = 0;
  }

  double learn(double adapt_stat, double delta) {
    ++counter_;
    adapt_stat = std::min(1.0, adapt_stat);
    const double eta = 1.0 / (counter_ + kT0);
    s_bar_ = (1 - eta) * s_bar_ + eta * (delta - adapt_stat);
    const double x = mu_ - s_bar_ * std::sqrt(counter_) / kGamma;
    const double x_eta = std::pow(counter_, -kKappa);
    x_bar_ = (1 - x_eta) * x_bar_ + x_eta * x;
    return std::exp(x);
  }

  double final_step() const { return std::exp(x_bar_); }

 private:
  static constexpr double kGamma = 0.05, kT0 = 10, kKappa = 0.75;
  double mu_ = 0, s_bar_ = 0, x_bar_ = 0;
  double counter_ = 0;
};

// Welford variance over the current window.
class VarianceWindow {
 public:
  explicit VarianceWindow(int d) : mean_(d, 0.0), m2_(d, 0.0) {}

  void add(const Vec& q) {
    ++n_;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double delta = q[i] - mean_[i];
      mean_[i] += delta / n_;
      m2_[i] += delta * (q[i] - mean_[i]);
    }
  }

  // Shrinks towards 1e-3 like the usual regularised estimator.
  Vec regularised() const {
    Vec v(mean_.size());
    const double n = n_;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double var = n > 1 ? m2_[i] / (n - 1) : 1.0;
      v[i] = (n / (n + 5)) * var + 1e-3 * (5 / (n + 5));
    }
    return v;
  }

  void reset() {
    n_ = 0;
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(m2_.begin(), m2_.end(), 0.0);
  }

 private:
  Vec mean_, m2_;
  long n_ = 0;
};

// Warmup layout: initial fast buffer, doubling slow windows, final fast buffer.
class WindowSchedule {
 public:
  WindowSchedule(int warmup, bool adapt) : warmup_(warmup) {
    if (!adapt || warmup < 20) {
      slow_ = false;
      return;
    }
    init_ = static_cast<int>(std::ceil(0.15 * warmup));
    term_ = static_cast<int>(std::ceil(0.10 * warmup));
    const int slow_span = warmup - init_ - term_;
    int start = init_;
    int width = std::min(25, slow_span);
    while (start < init_ + slow_span) {
      int end = start + width;
      // Stretch the last window if the next one would not fit.
      if (end + 2 * width > init_ + slow_span) end = init_ + slow_span;
      window_ends_.push_back(end);
      start = end;
      width *= 2;
    }
  }

  bool in_slow(int iteration) const { return slow_ && iteration >= init_ && iteration < warmup_ - term_; }
  bool window_ends_at(int iteration) const {
    return slow_ && std::find(window_ends_.begin(), window_ends_.end(), iteration + 1) != window_ends_.end();
  }

 private:
  int warmup_;
  bool slow_ = true;
  int init_ = 0, term_ = 0;
  std::vector<int> window_ends_;
};

class Chain {
 public:
  Chain(const Target& target, const SamplerConfig& config, Rng rng)
      : target_(target), config_(config), d_(target.dimension), rng_(rng), inv_metric_(d_, 1.0) {}

  void initialise() {
    std::uniform_real_distribution<double> init(-config_.init_radius, config_.init_radius);
    z_.q.resize(d_);
    z_.p.assign(d_, 0.0);
    z_.grad.resize(d_);
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (auto& v : z_.q) v = init(rng_);
      z_.logp = target_.log_density_grad(z_.q, z_.grad);
      if (std::isfinite(z_.logp) && std::all_of(z_.grad.begin(), z_.grad.end(), [](double g) {
            return std::isfinite(g);
          })) {
        return;
      }
    }
    throw ValidationError("sampler: no initial point with finite log density and gradient after 100 attempts");
  }

  void run(PosteriorDraws& out, int chain_index) {
    initialise();
    step_ = config_.step_size > 0 ? config_.step_size : 1.0;
    if (config_.step_size <= 0) find_reasonable_step();
    DualAveraging da;
    da.restart(step_);
    WindowSchedule schedule(config_.warmup, config_.adapt);
    VarianceWindow window(d_);

    for (int it = 0; it < config_.warmup; ++it) {
      transition();
      if (!config_.adapt) continue;
      step_ = da.learn(accept_stat_, config_.target_accept);
      if (schedule.in_slow(it)) {
        window.add(z_.q);
        if (schedule.window_ends_at(it)) {
          inv_metric_ = window.regularised();
          window.reset();
          find_reasonable_step();
          da.restart(step_);
        }
      }
    }
    if (config_.adapt && config_.warmup > 0) step_ = da.final_step();

    const int iters = config_.iterations;
    const std::size_t base = static_cast<std::size_t>(chain_index) * iters;
    Vec constrained(d_);
    for (int it = 0; it < iters; ++it) {
      transition();
      const std::size_t row = base + it;
      if (target_.constrain) {
        target_.constrain(z_.q, constrained);
      } else {
        constrained = z_.q;
      }
      std::copy(constrained.begin(), constrained.end(), out.values.begin() + row * d_);
      out.divergent[row] = divergent_ ? 1 : 0;
      out.treedepth[row] = depth_;
      out.accept_stat[row] = accept_stat_;
    }
    out.step_size[chain_index] = step_;
    out.inv_metric[chain_index] = inv_metric_;
  }

 private:
  double hamiltonian(const PhasePoint& z) const {
    double k = 0;
    for (int i = 0; i < d_; ++i) k += z.p[i] * z.p[i] * inv_metric_[i];
    return -z.logp + 0.5 * k;
  }

  void sample_momentum(PhasePoint& z) {
    for (int i = 0; i < d_; ++i) z.p[i] = normal_(rng_) / std::sqrt(inv_metric_[i]);
  }

  void leapfrog(PhasePoint& z, double eps) {
    for (int i = 0; i < d_; ++i) z.p[i] += 0.5 * eps * z.grad[i];
    for (int i = 0; i < d_; ++i) z.q[i] += eps * inv_metric_[i] * z.p[i];
    z.logp = target_.log_density_grad(z.q, z.grad);
    if (!std::isfinite(z.logp)) z.logp = -kInf;
    for (int i = 0; i < d_; ++i) z.p[i] += 0.5 * eps * z.grad[i];
  }

  Vec sharp(const Vec& p) const {
    Vec out(d_);
    for (int i = 0; i < d_; ++i) out[i] = inv_metric_[i] * p[i];
    return out;
  }

  void find_reasonable_step() {
    const PhasePoint start = z_;
    PhasePoint z = start;
    sample_momentum(z);
    double h0 = hamiltonian(z);
    leapfrog(z, step_);
    double h = hamiltonian(z);
    if (std::isnan(h)) h = kInf;
    double delta_h = h0 - h;
    const int direction = delta_h > std::log(0.8) ? 1 : -1;
    for (;;) {
      z = start;
      sample_momentum(z);
      h0 = hamiltonian(z);
      leapfrog(z, step_);
      h = hamiltonian(z);
      if (std::isnan(h)) h = kInf;
      delta_h = h0 - h;
      if (direction == 1 && !(delta_h > std::log(0.8))) break;
      if (direction == -1 && !(delta_h < std::log(0.8))) break;
      step_ = direction == 1 ? 2 * step_ : 0.5 * step_;
      if (step_ > 1e7) throw ValidationError("sampler: posterior is improper, step size search diverged");
      if (step_ == 0) throw ValidationError("sampler: no acceptable step size; the gradient may be wrong");
    }
  }

  bool criterion(const Vec& p_sharp_minus, const Vec& p_sharp_plus, const Vec& rho) const {
    return dot(p_sharp_plus, rho) > 0 && dot(p_sharp_minus, rho) > 0;
  }

  // Extends the trajectory from z_ by 2^depth leapfrog steps in direction
  // `sign`. Returns false on divergence or an internal U-turn.
  bool build_tree(int depth, PhasePoint& z_propose, Vec& p_sharp_beg, Vec& p_sharp_end, Vec& rho, Vec& p_beg,
                  Vec& p_end, double h0, double sign, int& n_leapfrog, double& log_sum_weight,
                  double& sum_metro_prob) {
    if (depth == 0) {
      leapfrog(z_, sign * step_);
      ++n_leapfrog;
      double h = hamiltonian(z_);
      if (std::isnan(h)) h = kInf;
      if (h - h0 > kMaxDeltaH) divergent_ = true;
      log_sum_weight = math::log_sum_exp(log_sum_weight, h0 - h);
      sum_metro_prob += h0 - h > 0 ? 1 : std::exp(h0 - h);
      z_propose = z_;
      p_sharp_beg = sharp(z_.p);
      p_sharp_end = p_sharp_beg;
      for (int i = 0; i < d_; ++i) rho[i] += z_.p[i];
      p_beg = z_.p;
      p_end = p_beg;
      return !divergent_;
    }

    Vec rho_init(d_, 0.0), p_init_end(d_), p_sharp_init_end(d_);
    double lsw_init = -kInf;
    if (!build_tree(depth - 1, z_propose, p_sharp_beg, p_sharp_init_end, rho_init, p_beg, p_init_end, h0, sign,
                    n_leapfrog, lsw_init, sum_metro_prob)) {
      return false;
    }

    PhasePoint z_propose_final = z_;
    Vec rho_final(d_, 0.0), p_final_beg(d_), p_sharp_final_beg(d_);
    double lsw_final = -kInf;
    if (!build_tree(depth - 1, z_propose_final, p_sharp_final_beg, p_sharp_end, rho_final, p_final_beg, p_end, h0,
                    sign, n_leapfrog, lsw_final, sum_metro_prob)) {
      return false;
    }

    const double lsw_subtree = math::log_sum_exp(lsw_init, lsw_final);
    log_sum_weight = math::log_sum_exp(log_sum_weight, lsw_subtree);
    if (lsw_final > lsw_subtree || uniform_(rng_) < std::exp(lsw_final - lsw_subtree)) {
      z_propose = std::move(z_propose_final);
    }

    Vec rho_subtree(d_);
    for (int i = 0; i < d_; ++i) rho_subtree[i] = rho_init[i] + rho_final[i];
    for (int i = 0; i < d_; ++i) rho[i] += rho_subtree[i];

    bool persist = criterion(p_sharp_beg, p_sharp_end, rho_subtree);
    Vec rho_extended(d_);
    for (int i = 0; i < d_; ++i) rho_extended[i] = rho_init[i] + p_final_beg[i];
    persist = persist && criterion(p_sharp_beg, p_sharp_final_beg, rho_extended);
    for (int i = 0; i < d_; ++i) rho_extended[i] = rho_final[i] + p_init_end[i];
    persist = persist && criterion(p_sharp_init_end, p_sharp_end, rho_extended);
    return persist;
  }

  void transition() {
    sample_momentum(z_);
    PhasePoint z_fwd = z_, z_bck = z_, z_sample = z_, z_propose = z_;

    Vec p_fwd_fwd = z_.p, p_fwd_bck = z_.p, p_bck_fwd = z_.p, p_bck_bck = z_.p;
    Vec p_sharp_fwd_fwd = sharp(z_.p), p_sharp_fwd_bck = p_sharp_fwd_fwd;
    Vec p_sharp_bck_fwd = p_sharp_fwd_fwd, p_sharp_bck_bck = p_sharp_fwd_fwd;
    Vec rho = z_.p;
    double log_sum_weight = 0;
    const double h0 = hamiltonian(z_);
    int n_leapfrog = 0;
    double sum_metro_prob = 0;
    depth_ = 0;
    divergent_ = false;

    while (depth_ < config_.max_depth) {
      Vec rho_fwd(d_, 0.0), rho_bck(d_, 0.0);
      bool valid_subtree;
      double lsw_subtree = -kInf;
      if (uniform_(rng_) > 0.5) {
        z_ = z_fwd;
        rho_bck = rho;
        p_bck_fwd = p_fwd_bck;
        p_sharp_bck_fwd = p_sharp_fwd_bck;
        valid_subtree = build_tree(depth_, z_propose, p_sharp_fwd_bck, p_sharp_fwd_fwd, rho_fwd, p_fwd_bck,
                                   p_fwd_fwd, h0, 1, n_leapfrog, lsw_subtree, sum_metro_prob);
        z_fwd = z_;
      } else {
        z_ = z_bck;
        rho_fwd = rho;
        p_fwd_bck = p_bck_fwd;
        p_sharp_fwd_bck = p_sharp_bck_fwd;
        valid_subtree = build_tree(depth_, z_propose, p_sharp_bck_fwd, p_sharp_bck_bck, rho_bck, p_bck_fwd,
                                   p_bck_bck, h0, -1, n_leapfrog, lsw_subtree, sum_metro_prob);
        z_bck = z_;
      }
      if (!valid_subtree) break;
      ++depth_;

      if (lsw_subtree > log_sum_weight || uniform_(rng_) < std::exp(lsw_subtree - log_sum_weight)) {
        z_sample = z_propose;
      }
      log_sum_weight = math::log_sum_exp(log_sum_weight, lsw_subtree);

      for (int i = 0; i < d_; ++i) rho[i] = rho_bck[i] + rho_fwd[i];
      bool persist = criterion(p_sharp_bck_bck, p_sharp_fwd_fwd, rho);
      Vec rho_extended(d_);
      for (int i = 0; i < d_; ++i) rho_extended[i] = rho_bck[i] + p_fwd_bck[i];
      persist = persist && criterion(p_sharp_bck_bck, p_sharp_fwd_bck, rho_extended);
      for (int i = 0; i < d_; ++i) rho_extended[i] = rho_fwd[i] + p_bck_fwd[i];
      persist = persist && criterion(p_sharp_bck_fwd, p_sharp_fwd_fwd, rho_extended);
      if (!persist) break;
    }

    accept_stat_ = n_leapfrog > 0 ? sum_metro_prob / n_leapfrog : 0.0;
    z_ = z_sample;
  }

  const Target& target_;
  const SamplerConfig& config_;
  int d_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  Vec inv_metric_;
  PhasePoint z_;
  double step_ = 1;
  double accept_stat_ = 0;
  int depth_ = 0;
  bool divergent_ = false;
};

}  // namespace

void SamplerConfig::validate() const {
  if (chains < 1) throw ValidationError("sampler: chains must be >= 1");
  if (warmup < 0) throw ValidationError("sampler: warmup must be >= 0");
  if (iterations < 1) throw ValidationError("sampler: iterations must be >= 1");
  if (!(target_accept > 0 && target_accept < 1)) throw ValidationError("sampler: target_accept must be in (0, 1)");
  if (max_depth < 1) throw ValidationError("sampler: max_depth must be >= 1");
  if (!(init_radius > 0)) throw ValidationError("sampler: init_radius must be > 0");
}

std::vector<std::vector<double>> PosteriorDraws::chain_values(int param) const {
  std::vector<std::vector<double>> out(chains, std::vector<double>(iterations));
  for (int c = 0; c < chains; ++c) {
    for (int i = 0; i < iterations; ++i) out[c][i] = at(c, i, param);
  }
  return out;
}

std::vector<double> PosteriorDraws::flat(int param) const {
  std::vector<double> out;
  out.reserve(total_draws());
  for (int c = 0; c < chains; ++c) {
    for (int i = 0; i < iterations; ++i) out.push_back(at(c, i, param));
  }
  return out;
}

int PosteriorDraws::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  throw NotFoundError("no parameter named '" + name + "'");
}

int PosteriorDraws::divergences() const {
  int n = 0;
  for (auto d : divergent) n += d;
  return n;
}

int PosteriorDraws::treedepth_hits() const {
  int n = 0;
  for (int t : treedepth) n += t >= max_depth;
  return n;
}

PosteriorDraws nuts_sample(const Target& target, const SamplerConfig& config) {
  config.validate();
  if (target.dimension < 1 || !target.log_density_grad) throw ValidationError("sampler: empty target");
  if (static_cast<int>(target.names.size()) != target.dimension) {
    throw ValidationError("sampler: target has " + std::to_string(target.names.size()) + " names for dimension " +
                          std::to_string(target.dimension));
  }

  PosteriorDraws out;
  out.names = target.names;
  out.chains = config.chains;
  out.iterations = config.iterations;
  out.dimension = target.dimension;
  out.max_depth = config.max_depth;
  const std::size_t rows = static_cast<std::size_t>(config.chains) * config.iterations;
  out.values.assign(rows * target.dimension, 0.0);
  out.divergent.assign(rows, 0);
  out.treedepth.assign(rows, 0);
  out.accept_stat.assign(rows, 0.0);
  out.step_size.assign(config.chains, 0.0);
  out.inv_metric.assign(config.chains, {});

  const SeedSequence seeds = SeedSequence(config.seed).child("nuts");
  std::vector<std::exception_ptr> errors(config.chains);
  auto run_chain = [&](int c) {
    try {
      Chain chain(target, config, seeds.child(static_cast<std::uint64_t>(c)).rng());
      chain.run(out, c);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  const int jobs = config.jobs > 0 ? std::min(config.jobs, config.chains) : config.chains;
  if (jobs <= 1) {
    for (int c = 0; c < config.chains; ++c) run_chain(c);
  } else {
    for (int first = 0; first < config.chains; first += jobs) {
      std::vector<std::thread> pool;
      for (int c = first; c < std::min(config.chains, first + jobs); ++c) pool.emplace_back(run_chain, c);
      for (auto& t : pool) t.join();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double gradient_check(const Target& target, std::span<const double> q, double h) {
  const int d = target.dimension;
  std::vector<double> x(q.begin(), q.end()), grad(d), scratch(d);
  target.log_density_grad(x, grad);
  double worst = 0;
  for (int i = 0; i < d; ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    const double saved = x[i];
    x[i] = saved + step;
    const double up = target.log_density_grad(x, scratch);
    x[i] = saved - step;
    const double down = target.log_density_grad(x, scratch);
    x[i] = saved;
    const double fd = (up - down) / (2 * step);
    const double err = std::abs(fd - grad[i]) / std::max({1.0, std::abs(fd), std::abs(grad[i])});
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace bayesbench
