#include "bayesbench/benchfns.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bayesbench/error.hpp"
#include "bayesbench/math.hpp"

namespace bayesbench {
namespace {

std::vector<Interval> box(int d, double lo, double hi) { return std::vector<Interval>(d, {lo, hi}); }

double sum_squares(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

BenchmarkFunction bent_cigar(int d) {
  return {"bentcigar" + std::to_string(d) + "d", d, box(d, -5, 5), {std::vector<double>(d, 0.0)}, 0.0,
          {"unimodal", "ill-conditioned"}, [](std::span<const double> x) {
            double s = 0;
            for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
            return x[0] * x[0] + 1e6 * s;
          }};
}

BenchmarkFunction discus(int d) {
  return {"discus" + std::to_string(d) + "d", d, box(d, -5, 5), {std::vector<double>(d, 0.0)}, 0.0,
          {"unimodal", "ill-conditioned"}, [](std::span<const double> x) {
            double s = 0;
            for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
            return 1e6 * x[0] * x[0] + s;
          }};
}

BenchmarkFunction exponential(int d) {
  return {"exponential" + std::to_string(d) + "d", d, box(d, -1, 1), {std::vector<double>(d, 0.0)}, -1.0,
          {"unimodal", "non-separable"},
          [](std::span<const double> x) { return -std::exp(-0.5 * sum_squares(x)); }};
}

BenchmarkFunction price1() {
  return {"price1", 2, box(2, -500, 500), {{-5, -5}, {-5, 5}, {5, -5}, {5, 5}}, 0.0,
          {"multimodal", "separable", "multiple-minima"}, [](std::span<const double> x) {
            const double a = std::abs(x[0]) - 5, b = std::abs(x[1]) - 5;
            return a * a + b * b;
          }};
}

BenchmarkFunction qing(int d) {
  // x_i = +-sqrt(i): 2^d global minima.
  std::vector<std::vector<double>> minima;
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::vector<double> m(d);
    for (int i = 0; i < d; ++i) m[i] = ((mask >> i) & 1 ? -1.0 : 1.0) * std::sqrt(i + 1.0);
    minima.push_back(std::move(m));
  }
  return {"qing" + std::to_string(d) + "d", d, box(d, -500, 500), std::move(minima), 0.0,
          {"multimodal", "separable", "multiple-minima"}, [](std::span<const double> x) {
            double s = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
              const double t = x[i] * x[i] - double(i + 1);
              s += t * t;
            }
            return s;
          }};
}

BenchmarkFunction salomon(int d) {
  return {"salomon" + std::to_string(d) + "d", d, box(d, -100, 100), {std::vector<double>(d, 0.0)}, 0.0,
          {"multimodal", "non-separable"}, [](std::span<const double> x) {
            const double r = std::sqrt(sum_squares(x));
            return 1 - std::cos(2 * math::kPi * r) + 0.1 * r;
          }};
}

BenchmarkFunction schwefel_2_20(int d) {
  return {"schwefel2d20_" + std::to_string(d) + "d", d, box(d, -100, 100), {std::vector<double>(d, 0.0)}, 0.0,
          {"unimodal", "separable", "non-differentiable"}, [](std::span<const double> x) {
            double s = 0;
            for (double v : x) s += std::abs(v);
            return s;
          }};
}

BenchmarkFunction schwefel_2_21(int d) {
  return {"schwefel2d21_" + std::to_string(d) + "d", d, box(d, -100, 100), {std::vector<double>(d, 0.0)}, 0.0,
          {"unimodal", "non-separable", "non-differentiable"}, [](std::span<const double> x) {
            double m = 0;
            for (double v : x) m = std::max(m, std::abs(v));
            return m;
          }};
}

BenchmarkFunction three_hump_camel() {
  return {"threehumpcamel", 2, box(2, -5, 5), {{0, 0}}, 0.0, {"multimodal", "non-separable"},
          [](std::span<const double> x) {
            const double a = x[0], b = x[1];
            const double a2 = a * a;
            return 2 * a2 - 1.05 * a2 * a2 + a2 * a2 * a2 / 6 + a * b + b * b;
          }};
}

BenchmarkFunction whitley(int d) {
  return {"whitley" + std::to_string(d) + "d", d, box(d, -10.24, 10.24), {std::vector<double>(d, 1.0)}, 0.0,
          {"multimodal", "non-separable"}, [](std::span<const double> x) {
            double s = 0;
            for (double xi : x) {
              for (double xj : x) {
                const double t = xi * xi - xj;
                const double y = 100 * t * t + (1 - xj) * (1 - xj);
                s += y * y / 4000 - std::cos(y) + 1;
              }
            }
            return s;
          }};
}

BenchmarkFunction zakharov(int d) {
  return {"zakharov" + std::to_string(d) + "d", d, box(d, -5, 10), {std::vector<double>(d, 0.0)}, 0.0,
          {"unimodal", "non-separable"}, [](std::span<const double> x) {
            double lin = 0;
            for (std::size_t i = 0; i < x.size(); ++i) lin += 0.5 * double(i + 1) * x[i];
            const double l2 = lin * lin;
            return sum_squares(x) + l2 + l2 * l2;
          }};
}

std::map<std::string, BenchmarkFunction> build_registry() {
  std::map<std::string, BenchmarkFunction> reg;
  for (auto fn : {bent_cigar(6), discus(2), exponential(2), price1(), qing(2), salomon(2), schwefel_2_20(2),
                  schwefel_2_21(6), make_sphere(6), three_hump_camel(), whitley(6), zakharov(2)}) {
    reg.emplace(fn.id, std::move(fn));
  }
  return reg;
}

const std::map<std::string, BenchmarkFunction>& registry() {
  static const auto reg = build_registry();
  return reg;
}

void check_dimension(const BenchmarkFunction& fn, std::span<const double> x) {
  if (static_cast<int>(x.size()) != fn.dimension) {
    std::ostringstream os;
    os << fn.id << ": expected " << fn.dimension << " coordinates, got " << x.size();
    throw ValidationError(os.str());
  }
}

}  // namespace

BenchmarkFunction make_sphere(int dimension) {
  if (dimension < 1) throw ValidationError("sphere: dimension must be positive");
  return {"sphere" + std::to_string(dimension) + "d", dimension, box(dimension, -5.12, 5.12),
          {std::vector<double>(dimension, 0.0)}, 0.0, {"unimodal", "separable"},
          [](std::span<const double> x) { return sum_squares(x); }};
}

double evaluate(const BenchmarkFunction& fn, std::span<const double> x) {
  check_dimension(fn, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Interval& b = fn.bounds[i];
    if (!(x[i] >= b.low && x[i] <= b.high)) {
      std::ostringstream os;
      os << fn.id << ": coordinate " << i << " = " << x[i] << " outside [" << b.low << ", " << b.high << "]";
      throw ValidationError(os.str());
    }
  }
  return fn.objective(x);
}

double evaluate_noisy(const BenchmarkFunction& fn, std::span<const double> x, const NoiseSpec& noise,
                      Rng& rng) {
  if (noise.sd < 0) throw ValidationError("noise sd must be nonnegative");
  const double f = evaluate(fn, x);
  if (noise.sd == 0) return f;
  return f + noise.sd * std::normal_distribution<double>(0.0, 1.0)(rng);
}

double distance_to_nearest_minimum(const BenchmarkFunction& fn, std::span<const double> x) {
  check_dimension(fn, x);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : fn.minima) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - m[i]) * (x[i] - m[i]);
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

std::vector<std::string> registry_list() {
  std::vector<std::string> ids;
  for (const auto& [id, fn] : registry()) ids.push_back(id);
  return ids;
}

const BenchmarkFunction& registry_get(const std::string& id) {
  const auto& reg = registry();
  auto it = reg.find(id);
  if (it == reg.end()) throw NotFoundError("unknown benchmark function '" + id + "'");
  return it->second;
}

nlohmann::json catalog_entry(const BenchmarkFunction& fn) {
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : fn.bounds) bounds.push_back({b.low, b.high});
  return {{"id", fn.id},           {"dimension", fn.dimension}, {"bounds", bounds},
          {"minima", fn.minima},   {"f_min", fn.f_min},         {"properties", fn.properties}};
}

nlohmann::json registry_catalog() {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [id, fn] : registry()) out.push_back(catalog_entry(fn));
  return out;
}

}  // namespace bayesbench
