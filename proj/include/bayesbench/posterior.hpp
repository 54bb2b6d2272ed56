#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bayesbench/interval.hpp"
#include "bayesbench/models.hpp"
#include "bayesbench/sampler.hpp"
#include "bayesbench/table.hpp"

namespace bayesbench {

/// Shortest window holding ceil(mass * n) of the sorted samples; the leftmost
/// window wins ties. Needs at least 100 samples.
Interval hpd_interval(std::span<const double> samples, double mass = 0.95);
/// Quantiles at (1 - mass) / 2 and (1 + mass) / 2 (linear interpolation).
Interval equal_tail_interval(std::span<const double> samples, double mass = 0.95);
double quantile(std::span<const double> samples, double p);

struct TransformSummary {
  std::string name;  // "OR", "HR", ...
  double mean = 0;
  Interval hpd;
};

struct IntervalSummary {
  std::string parameter;
  double mean = 0;
  double sd = 0;
  Interval hpd;
  std::optional<TransformSummary> transform;
};

IntervalSummary interval_summary(const std::string& name, std::span<const double> samples, double mass = 0.95);
/// Summary of `param` plus exp(draw) summarized as an odds ratio.
IntervalSummary odds_ratio_summary(const PosteriorDraws& draws, const std::string& param, double mass = 0.95);

struct HazardRow {
  std::string algorithm;
  IntervalSummary baseline;        // exp(a_alg)
  IntervalSummary hazard_ratio;    // exp(b_noise)
  IntervalSummary expected_feval;  // 1 / exp(a_alg), in evaluations per dimension
};

/// Per-algorithm hazard transforms of a Cox fit, applied draw-wise.
std::vector<HazardRow> hazard_summary(const PosteriorDraws& draws, const std::vector<std::string>& algorithms,
                                      double mass = 0.95);

struct RankSummary {
  std::vector<std::string> algorithms;
  /// distribution[i][r] = P(algorithm i has rank r + 1).
  std::vector<std::vector<double>> distribution;
  std::vector<double> median;
  std::vector<double> variance;
  /// Rank vectors per sample, [sample][algorithm].
  std::vector<std::vector<int>> samples;
};

struct RankOptions {
  int samples = 1000;
  std::uint64_t seed = 0;
  /// Average the benchmark effects per draw instead of sampling one benchmark.
  bool average_benchmarks = false;
};

/// Ranks strengths a_alg[i] + a_bm[i, j] of a paired-comparison fit; rank 1
/// is the strongest algorithm.
RankSummary rank_posterior(const PosteriorDraws& draws, const std::vector<std::string>& algorithms,
                           const std::vector<std::string>& benchmarks, const RankOptions& options = {});

/// Paired difference a - b, resampled with replacement to n draws.
IntervalSummary group_difference(std::span<const double> a, std::span<const double> b, int n = 10000,
                                 std::uint64_t seed = 0, double mass = 0.95);

enum class RopeDecision { AcceptNegligible, RejectAbove, RejectBelow, Undecided };
std::string to_string(RopeDecision d);

struct RopeResult {
  Interval hpd;
  double fraction = 0;  // share of the HPD length inside the ROPE
  RopeDecision decision = RopeDecision::Undecided;
};

/// Fraction of HPD inside [low, high]. At least 95% inside accepts the
/// parameter as negligible; disjoint intervals reject.
RopeResult rope_fraction(Interval hpd, double rope_low, double rope_high);
RopeResult rope_fraction(std::span<const double> samples, double rope_low, double rope_high, double mass = 0.95);

/// Parameter table (Parameter, Mean, HPD low, HPD high, plus OR or HR columns
/// where the model has a natural transform). Benchmark effects are left out
/// unless `include_effects`.
Table parameter_table(const Model& model, const PosteriorDraws& draws, double mass = 0.95,
                      bool include_effects = false);
Table rank_table(const RankSummary& ranks);
Table hazard_table(const std::vector<HazardRow>& rows);
/// Pairwise intercept differences for every ordered algorithm pair i < j.
Table difference_table(const PosteriorDraws& draws, const std::vector<std::string>& algorithms, int n,
                       std::uint64_t seed, double mass = 0.95);

}  // namespace bayesbench
