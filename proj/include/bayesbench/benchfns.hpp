#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bayesbench/interval.hpp"
#include "bayesbench/random.hpp"

namespace bayesbench {

/// A continuous test objective with a machine-readable list of global minima.
struct BenchmarkFunction {
  std::string id;
  int dimension = 0;
  std::vector<Interval> bounds;
  std::vector<std::vector<double>> minima;
  double f_min = 0;
  std::vector<std::string> properties;  // e.g. "multimodal", "separable"
  std::function<double(std::span<const double>)> objective;
};

struct NoiseSpec {
  double sd = 0;
};

/// Checked evaluation; throws ValidationError on dimension mismatch or an
/// out-of-bounds coordinate.
double evaluate(const BenchmarkFunction& fn, std::span<const double> x);

/// evaluate() plus a N(0, sd^2) draw. With sd == 0 the rng is not touched.
double evaluate_noisy(const BenchmarkFunction& fn, std::span<const double> x,
                      const NoiseSpec& noise, Rng& rng);

double distance_to_nearest_minimum(const BenchmarkFunction& fn, std::span<const double> x);

/// Sorted ids of the bundled functions.
std::vector<std::string> registry_list();

/// Throws NotFoundError for an unknown id.
const BenchmarkFunction& registry_get(const std::string& id);

/// Sphere in an arbitrary dimension on [-5.12, 5.12]^d.
BenchmarkFunction make_sphere(int dimension);

nlohmann::json catalog_entry(const BenchmarkFunction& fn);
nlohmann::json registry_catalog();

}  // namespace bayesbench
