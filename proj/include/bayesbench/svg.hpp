#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bayesbench/posterior.hpp"
#include "bayesbench/sampler.hpp"

namespace bayesbench::svg {

/// One line per chain over post-warmup iterations.
std::string trace_plot(const PosteriorDraws& draws, int param);
/// Kernel density with the HPD region shaded; `marker` draws a vertical line
/// (e.g. an observed statistic).
std::string density_plot(std::span<const double> samples, Interval hpd, const std::string& title,
                         std::optional<double> marker = std::nullopt);
/// Stacked rank-probability bars, one per algorithm.
std::string rank_bars(const RankSummary& ranks);
/// Box-and-whisker plot (1.5 IQR whiskers) per group.
std::string boxplot(const std::vector<std::pair<std::string, std::vector<double>>>& groups, const std::string& title,
                    const std::string& y_label, bool log_scale);

}  // namespace bayesbench::svg
