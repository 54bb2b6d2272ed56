// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and
// rank-one plus rank-mu covariance updates. No restarts. Samples are clamped
// onto the box and the clamped points drive the update.

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "evaluator.hpp"

namespace bayesbench::detail {

void run_cmaes(const AlgorithmSpec& spec, Evaluator& eval, Rng& rng) {
  const int n = eval.dimension();
  const double nd = n;
  const int lambda = 4 + static_cast<int>(std::floor(3 * std::log(nd)));
  const int mu = lambda / 2;

  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double cc = (4 + mu_eff / nd) / (nd + 4 + 2 * mu_eff / nd);
  const double cs = (mu_eff + 2) / (nd + mu_eff + 5);
  const double c1 = 2 / ((nd + 1.3) * (nd + 1.3) + mu_eff);
  const double cmu = std::min(1 - c1, 2 * (mu_eff - 2 + 1 / mu_eff) / ((nd + 2) * (nd + 2) + mu_eff));
  const double damps = 1 + 2 * std::max(0.0, std::sqrt((mu_eff - 1) / (nd + 1)) - 1) + cs;
  const double chi_n = std::sqrt(nd) * (1 - 1 / (4 * nd) + 1 / (21 * nd * nd));

  const auto start = eval.uniform_point(rng);
  Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(start.data(), n);
  double sigma = spec.param("sigma0");
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd path_c = Eigen::VectorXd::Zero(n), path_s = Eigen::VectorXd::Zero(n);

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd xs(n, lambda);
  std::vector<double> fs(lambda), point(n);
  std::vector<int> order(lambda);
  long generation = 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;

  for (;;) {
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = normal(rng);
      Eigen::VectorXd x = mean + sigma * (basis * scales.cwiseProduct(z));
      for (int i = 0; i < n; ++i) point[i] = x[i];
      eval.clamp(point);
      for (int i = 0; i < n; ++i) xs(i, k) = point[i];
      fs[k] = eval(point);
    }
    ++generation;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });

    const Eigen::VectorXd old_mean = mean;
    mean.setZero();
    for (int i = 0; i < mu; ++i) mean += weights[i] * xs.col(order[i]);
    const Eigen::VectorXd y_w = (mean - old_mean) / sigma;

    const Eigen::VectorXd inv_sqrt_c_y = basis * (basis.transpose() * y_w).cwiseQuotient(scales);
    path_s = (1 - cs) * path_s + std::sqrt(cs * (2 - cs) * mu_eff) * inv_sqrt_c_y;
    const double ps_norm = path_s.norm();
    const double decay = 1 - std::pow(1 - cs, 2.0 * double(generation));
    const bool h_sig = ps_norm / std::sqrt(decay) / chi_n < 1.4 + 2 / (nd + 1);
    path_c = (1 - cc) * path_c + (h_sig ? std::sqrt(cc * (2 - cc) * mu_eff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) {
      const Eigen::VectorXd y = (xs.col(order[i]) - old_mean) / sigma;
      rank_mu += weights[i] * y * y.transpose();
    }
    const double h_corr = h_sig ? 0.0 : cc * (2 - cc);
    cov = (1 - c1 - cmu) * cov + c1 * (path_c * path_c.transpose() + h_corr * cov) + cmu * rank_mu;
    cov = 0.5 * (cov + cov.transpose());

    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1));
    sigma = std::clamp(sigma, 1e-300, 1e300);

    solver.compute(cov);
    if (solver.info() != Eigen::Success || !cov.allFinite()) {
      cov = Eigen::MatrixXd::Identity(n, n);
      basis = Eigen::MatrixXd::Identity(n, n);
      scales = Eigen::VectorXd::Ones(n);
      continue;
    }
    basis = solver.eigenvectors();
    scales = solver.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
  }
}

}  // namespace bayesbench::detail
