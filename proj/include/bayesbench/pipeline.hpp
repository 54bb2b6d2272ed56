#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bayesbench/diagnostics.hpp"
#include "bayesbench/harness.hpp"
#include "bayesbench/models.hpp"
#include "bayesbench/posterior.hpp"
#include "bayesbench/sampler.hpp"
#include "bayesbench/table.hpp"

namespace bayesbench {

/// A model fit described as data: {model, data, filters, epsilon, ties,
/// priors, sampler, seed, hpd_mass}.
struct FitRequest {
  ModelKind model = ModelKind::Binomial;
  std::string data;  // dataset CSV path
  Filters filters;
  double epsilon = 0.1;
  TieMode ties = TieMode::RandomWinner;
  PriorOptions priors;
  SamplerConfig sampler;
  std::uint64_t seed = 0;
  double hpd_mass = 0.95;

  /// Defaults for a model: run lengths and tie handling.
  static FitRequest defaults(ModelKind kind);
  void validate() const;
  /// Fields absent from `j` keep the model defaults.
  static FitRequest from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const ModelInput& in);
ModelInput model_input_from_json(const nlohmann::json& j);

ModelInput prepare_input(const Dataset& data, const FitRequest& request);

struct Fit {
  FitRequest request;
  std::unique_ptr<Model> model;
  PosteriorDraws draws;
  FitDiagnostics diagnostics;
};

/// Prepares the model input and samples it. The sampler seed derives from
/// request.seed; one chain is rejected because R-hat needs two.
Fit run_fit(const FitRequest& request, const Dataset& data);
Fit run_fit(const FitRequest& request, const ModelInput& input);

void write_draws_csv(const PosteriorDraws& draws, const std::string& path);
PosteriorDraws read_draws_csv(const std::string& path);

/// Fit directory layout.
namespace fit_files {
inline constexpr const char* kRequest = "fit.json";
inline constexpr const char* kInput = "input.json";
inline constexpr const char* kDraws = "draws.csv";
inline constexpr const char* kDiagnostics = "diagnostics.json";
inline constexpr const char* kSummaryCsv = "summary.csv";
inline constexpr const char* kSummaryMd = "summary.md";
}  // namespace fit_files

/// Writes fit.json, input.json, draws.csv, diagnostics.json and the summary
/// tables. Refuses to replace existing files unless `force`.
void write_fit(const Fit& fit, const std::string& dir, bool force);
/// Loads a directory written by write_fit. Missing artifacts raise IoError
/// naming the file.
Fit load_fit(const std::string& dir);

/// Model-specific tables: parameters always; ranks for paired models, hazard
/// transforms for Cox, intercept differences for Student-t.
std::vector<std::pair<std::string, Table>> fit_tables(const Fit& fit, int rank_samples = 1000,
                                                      int difference_samples = 10000);
RankSummary fit_ranks(const Fit& fit, const RankOptions& options);
Table diagnostics_table(const FitDiagnostics& diagnostics);

/// Writes `name`.csv and `name`.md for a table.
void write_table(const Table& table, const std::string& dir, const std::string& name, bool force);
/// Writes text to `path`, refusing to replace an existing file unless `force`.
void write_text(const std::string& path, const std::string& text, bool force);
std::string read_text(const std::string& path);

}  // namespace bayesbench
