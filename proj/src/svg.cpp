#include "bayesbench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bayesbench/error.hpp"
#include "bayesbench/table.hpp"

namespace bayesbench::svg {
namespace {

constexpr double kWidth = 640, kHeight = 360;
constexpr double kLeft = 60, kRight = 20, kTop = 30, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) { return format_fixed(v, 2); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Maps data ranges onto the plot area and writes the frame.
class Canvas {
 public:
  Canvas(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1;
    if (!(y1_ > y0_)) y1_ = y0_ + 1;
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
         << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  double x(double v) const { return kLeft + (v - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double y(double v) const { return kHeight - kBottom - (v - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

  void title(const std::string& t) {
    out_ << "<text x=\"" << num(kWidth / 2) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << escape(t)
         << "</text>\n";
  }

  void axes(const std::string& x_label, const std::string& y_label, bool x_ticks = true) {
    out_ << "<g stroke=\"#333\" fill=\"none\"><line x1=\"" << num(kLeft) << "\" y1=\"" << num(y(y0_)) << "\" x2=\""
         << num(kWidth - kRight) << "\" y2=\"" << num(y(y0_)) << "\"/><line x1=\"" << num(kLeft) << "\" y1=\""
         << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\"" << num(y(y0_)) << "\"/></g>\n";
    for (int i = 0; i <= 4; ++i) {
      const double yv = y0_ + (y1_ - y0_) * i / 4;
      out_ << "<text x=\"" << num(kLeft - 4) << "\" y=\"" << num(y(yv) + 4) << "\" text-anchor=\"end\">"
           << tick(yv) << "</text>\n";
      if (!x_ticks) continue;
      const double xv = x0_ + (x1_ - x0_) * i / 4;
      out_ << "<text x=\"" << num(x(xv)) << "\" y=\"" << num(kHeight - kBottom + 14) << "\" text-anchor=\"middle\">"
           << tick(xv) << "</text>\n";
    }
    out_ << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight - 8) << "\" text-anchor=\"middle\">"
         << escape(x_label) << "</text>\n";
    out_ << "<text transform=\"translate(14," << num(kHeight / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
         << escape(y_label) << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double width = 1,
                double opacity = 1) {
    out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(width)
         << "\" stroke-opacity=\"" << num(opacity) << "\" points=\"";
    for (const auto& [a, b] : pts) out_ << num(x(a)) << ',' << num(y(b)) << ' ';
    out_ << "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& color, double opacity) {
    out_ << "<polygon fill=\"" << color << "\" fill-opacity=\"" << num(opacity) << "\" stroke=\"none\" points=\"";
    for (const auto& [a, b] : pts) out_ << num(x(a)) << ',' << num(y(b)) << ' ';
    out_ << "\"/>\n";
  }

  void rect(double xa, double ya, double xb, double yb, const std::string& color, const std::string& stroke = "none") {
    const double left = std::min(x(xa), x(xb)), top = std::min(y(ya), y(yb));
    out_ << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(std::abs(x(xb) - x(xa)))
         << "\" height=\"" << num(std::abs(y(yb) - y(ya))) << "\" fill=\"" << color << "\" stroke=\"" << stroke
         << "\"/>\n";
  }

  void line(double xa, double ya, double xb, double yb, const std::string& color, const std::string& dash = "") {
    out_ << "<line x1=\"" << num(x(xa)) << "\" y1=\"" << num(y(ya)) << "\" x2=\"" << num(x(xb)) << "\" y2=\""
         << num(y(yb)) << "\" stroke=\"" << color << '"';
    if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << '"';
    out_ << "/>\n";
  }

  void dot(double xv, double yv) {
    out_ << "<circle cx=\"" << num(x(xv)) << "\" cy=\"" << num(y(yv)) << "\" r=\"2\" fill=\"none\" stroke=\"#333\"/>\n";
  }

  void text(double xv, double yv, const std::string& t, const std::string& anchor = "middle", double dy = 0) {
    out_ << "<text x=\"" << num(x(xv)) << "\" y=\"" << num(y(yv) + dy) << "\" text-anchor=\"" << anchor << "\">"
         << escape(t) << "</text>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

  std::string (*tick)(double) = [](double v) { return format_shortest(std::round(v * 1000) / 1000); };

 private:
  double x0_, x1_, y0_, y1_;
  std::ostringstream out_;
};

double sd_of(std::span<const double> x) {
  double m = 0;
  for (double v : x) m += v;
  m /= x.size();
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return x.size() > 1 ? std::sqrt(ss / (x.size() - 1)) : 0;
}

double sorted_quantile(const std::vector<double>& x, double p) {
  const double h = (x.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  return x[lo] + (h - lo) * (x[std::min(lo + 1, x.size() - 1)] - x[lo]);
}

}  // namespace

std::string trace_plot(const PosteriorDraws& draws, int param) {
  if (param < 0 || param >= draws.dimension) throw ValidationError("trace_plot: parameter index out of range");
  double lo = INFINITY, hi = -INFINITY;
  for (int c = 0; c < draws.chains; ++c) {
    for (int i = 0; i < draws.iterations; ++i) {
      lo = std::min(lo, draws.at(c, i, param));
      hi = std::max(hi, draws.at(c, i, param));
    }
  }
  const double pad = hi > lo ? 0.05 * (hi - lo) : 0.5;
  Canvas canvas(1, std::max(2, draws.iterations), lo - pad, hi + pad);
  canvas.title("Trace: " + draws.names[param]);
  canvas.axes("iteration", draws.names[param]);
  // Thin long chains to about 1000 points each.
  const int stride = std::max(1, draws.iterations / 1000);
  for (int c = 0; c < draws.chains; ++c) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < draws.iterations; i += stride) pts.emplace_back(i + 1, draws.at(c, i, param));
    canvas.polyline(pts, kPalette[c % 10], 0.8, 0.7);
  }
  return canvas.finish();
}

std::string density_plot(std::span<const double> samples, Interval hpd, const std::string& title,
                         std::optional<double> marker) {
  if (samples.empty()) throw ValidationError("density_plot: no samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double sd = sd_of(x);
  const double iqr = sorted_quantile(x, 0.75) - sorted_quantile(x, 0.25);
  double bw = 0.9 * std::min(sd, iqr > 0 ? iqr / 1.34 : sd) * std::pow(static_cast<double>(x.size()), -0.2);
  double lo = x.front(), hi = x.back();
  if (marker) {
    lo = std::min(lo, *marker);
    hi = std::max(hi, *marker);
  }
  if (!(bw > 0)) bw = std::max(1e-3, 0.01 * std::abs(lo));
  lo -= 3 * bw;
  hi += 3 * bw;

  constexpr int kGrid = 200;
  std::vector<std::pair<double, double>> curve;
  double peak = 0;
  const double norm = 1 / (x.size() * bw * std::sqrt(2 * M_PI));
  for (int g = 0; g <= kGrid; ++g) {
    const double at = lo + (hi - lo) * g / kGrid;
    // Only samples within 5 bandwidths contribute noticeably.
    const auto first = std::lower_bound(x.begin(), x.end(), at - 5 * bw);
    const auto last = std::upper_bound(x.begin(), x.end(), at + 5 * bw);
    double dens = 0;
    for (auto it = first; it != last; ++it) {
      const double z = (at - *it) / bw;
      dens += std::exp(-0.5 * z * z);
    }
    dens *= norm;
    peak = std::max(peak, dens);
    curve.emplace_back(at, dens);
  }
  Canvas canvas(lo, hi, 0, peak * 1.05);
  canvas.title(title);
  canvas.axes("value", "density");
  std::vector<std::pair<double, double>> shade{{std::max(lo, hpd.low), 0}};
  for (const auto& p : curve) {
    if (p.first >= hpd.low && p.first <= hpd.high) shade.push_back(p);
  }
  shade.emplace_back(std::min(hi, hpd.high), 0);
  canvas.polygon(shade, "#1f77b4", 0.3);
  canvas.polyline(curve, "#1f77b4", 1.5);
  if (marker) canvas.line(*marker, 0, *marker, peak * 1.05, "#d62728", "4,3");
  return canvas.finish();
}

std::string rank_bars(const RankSummary& ranks) {
  const std::size_t k = ranks.algorithms.size();
  if (k == 0) throw ValidationError("rank_bars: no algorithms");
  Canvas canvas(0, static_cast<double>(k), 0, 1);
  canvas.title("Rank distribution (bottom segment = rank 1, strongest)");
  canvas.axes("", "probability", false);
  for (std::size_t i = 0; i < k; ++i) {
    double bottom = 0;
    for (std::size_t r = 0; r < k; ++r) {
      const double p = ranks.distribution[i][r];
      if (p <= 0) continue;
      canvas.rect(i + 0.15, bottom, i + 0.85, bottom + p, kPalette[r % 10], "white");
      bottom += p;
    }
    canvas.text(i + 0.5, 0, ranks.algorithms[i], "middle", 14);
  }
  return canvas.finish();
}

std::string boxplot(const std::vector<std::pair<std::string, std::vector<double>>>& groups, const std::string& title,
                    const std::string& y_label, bool log_scale) {
  if (groups.empty()) throw ValidationError("boxplot: no groups");
  auto t = [&](double v) { return log_scale ? std::log10(v) : v; };
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [name, values] : groups) {
    for (double v : values) {
      if (log_scale && !(v > 0)) throw ValidationError("boxplot: log scale needs positive values");
      lo = std::min(lo, t(v));
      hi = std::max(hi, t(v));
    }
  }
  if (!std::isfinite(lo)) throw ValidationError("boxplot: no values");
  const double pad = hi > lo ? 0.05 * (hi - lo) : 0.5;
  Canvas canvas(0, static_cast<double>(groups.size()), lo - pad, hi + pad);
  if (log_scale) canvas.tick = [](double v) { return format_shortest(std::round(std::pow(10.0, v) * 1000) / 1000); };
  canvas.title(title);
  canvas.axes("", y_label, false);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> v;
    for (double x : groups[g].second) v.push_back(t(x));
    std::sort(v.begin(), v.end());
    const double q1 = sorted_quantile(v, 0.25), q2 = sorted_quantile(v, 0.5), q3 = sorted_quantile(v, 0.75);
    const double reach = 1.5 * (q3 - q1);
    const double wlo = *std::lower_bound(v.begin(), v.end(), q1 - reach);
    const double whi = *(std::upper_bound(v.begin(), v.end(), q3 + reach) - 1);
    const double mid = g + 0.5;
    canvas.line(mid, wlo, mid, q1, "#333");
    canvas.line(mid, q3, mid, whi, "#333");
    canvas.rect(g + 0.25, q1, g + 0.75, q3, "#aec7e8", "#333");
    canvas.line(g + 0.25, q2, g + 0.75, q2, "#d62728");
    for (double x : v) {
      if (x < wlo || x > whi) canvas.dot(mid, x);
    }
    canvas.text(mid, lo - pad, groups[g].first, "middle", 14);
  }
  return canvas.finish();
}

}  // namespace bayesbench::svg
