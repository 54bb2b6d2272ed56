#pragma once

#include <string>
#include <vector>

namespace bayesbench {

struct ReportOptions {
  std::vector<std::string> fits;  // fit directories
  std::string data;               // optional dataset CSV for the CPU-time boxplot
  std::string out;
  bool force = false;
  /// Trace and density plots per fit; benchmark effects are never plotted.
  int max_parameter_plots = 16;
};

/// Writes report.md plus SVG figures and table files into `out`. The output
/// depends only on the fit artifacts, so regenerating it is byte-identical.
/// Returns the report path.
std::string write_report(const ReportOptions& options);

}  // namespace bayesbench
