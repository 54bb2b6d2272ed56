#include "bayesbench/report.hpp"

#include <filesystem>
#include <map>
#include <sstream>

#include "bayesbench/error.hpp"
#include "bayesbench/harness.hpp"
#include "bayesbench/pipeline.hpp"
#include "bayesbench/random.hpp"
#include "bayesbench/svg.hpp"

namespace bayesbench {
namespace fs = std::filesystem;

namespace {

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

}  // namespace

std::string write_report(const ReportOptions& options) {
  if (options.fits.empty() && options.data.empty()) throw ValidationError("report: nothing to report");
  if (options.out.empty()) throw ValidationError("report: no output directory");
  const fs::path out(options.out);
  const auto report_path = (out / "report.md").string();
  if (!options.force && fs::exists(report_path)) {
    throw ValidationError("refusing to overwrite " + report_path + " (use --force)");
  }
  fs::create_directories(out);

  std::ostringstream md;
  md << "# Benchmark analysis report\n\n";
  std::map<std::string, int> used;
  for (const auto& dir : options.fits) {
    const Fit fit = load_fit(dir);
    // Two fits of the same model get distinct prefixes.
    std::string prefix = to_string(fit.request.model);
    if (used[prefix]++) prefix += "_" + std::to_string(used[prefix]);
    const auto& in = fit.model->input();

    md << "## " << prefix << "\n\n";
    // Relative to the report so the text does not depend on where it was generated.
    md << "- source: `" << fs::proximate(fs::absolute(dir), fs::absolute(out)).generic_string() << "`\n";
    md << "- observations: " << in.rows() << ", algorithms: " << in.algorithms.size()
       << ", benchmarks: " << in.benchmarks.size() << "\n";
    md << "- chains: " << fit.draws.chains << " x " << fit.draws.iterations << " draws, divergences: "
       << fit.diagnostics.divergences << ", max R-hat: " << format_fixed(fit.diagnostics.max_rhat(), 3) << "\n";
    const auto problems = fit.diagnostics.problems();
    md << "- convergence: " << (problems.empty() ? "ok" : "FAILED") << "\n";
    for (const auto& p : problems) md << "  - " << p << "\n";
    for (const auto& w : in.warnings) md << "- warning: " << w << "\n";
    md << "\n";

    for (const auto& [name, table] : fit_tables(fit)) {
      write_table(table, out.string(), prefix + "_" + name, true);
      md << table.to_markdown() << "\n";
    }

    if (fit.request.model == ModelKind::BradleyTerry || fit.request.model == ModelKind::Davidson) {
      RankOptions opt;
      opt.samples = 1000;
      opt.seed = SeedSequence(fit.request.seed).child("ranks").seed();
      const auto file = prefix + "_ranks.svg";
      write_text((out / file).string(), svg::rank_bars(fit_ranks(fit, opt)), true);
      md << "![rank distribution](" << file << ")\n\n";
    }

    int plotted = 0;
    md << "### Traces and posterior densities\n\n";
    for (const auto& b : fit.model->blocks()) {
      if (b.kind == BlockKind::Effect) continue;
      for (int i = b.offset; i < b.offset + b.size && plotted < options.max_parameter_plots; ++i, ++plotted) {
        const auto& name = fit.model->names()[i];
        const auto samples = fit.draws.flat(i);
        const auto trace = prefix + "_trace_" + slug(name) + ".svg";
        const auto density = prefix + "_density_" + slug(name) + ".svg";
        write_text((out / trace).string(), svg::trace_plot(fit.draws, i), true);
        write_text((out / density).string(),
                   svg::density_plot(samples, hpd_interval(samples, fit.request.hpd_mass),
                                     name + " (shaded: HPD " + format_shortest(fit.request.hpd_mass) + ")"),
                   true);
        md << "![trace " << name << "](" << trace << ") ![density " << name << "](" << density << ")\n\n";
      }
    }
  }

  if (!options.data.empty()) {
    const auto data = read_csv(options.data);
    const auto cpu = prepare_cpu(data, Filters{});
    std::vector<std::pair<std::string, std::vector<double>>> groups;
    for (const auto& a : cpu.algorithms) groups.emplace_back(a, std::vector<double>{});
    for (std::size_t r = 0; r < cpu.rows(); ++r) groups[cpu.alg[r]].second.push_back(cpu.y[r]);
    bool positive = true;
    for (double y : cpu.y) positive = positive && y > 0;
    write_text((out / "cpu_time.svg").string(),
               svg::boxplot(groups, "CPU time per evaluation", "seconds x 1e4 / evaluation", positive), true);
    md << "## CPU time\n\n![CPU time per evaluation](cpu_time.svg)\n\n";
  }

  write_text(report_path, md.str(), true);
  return report_path;
}

}  // namespace bayesbench
