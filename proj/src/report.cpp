#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "boltdis/experiment.hpp"

namespace boltdis {

namespace {

std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_csv(const SweepResult& result) {
  std::string out = "sigma,episodes,successes,sr,mean_steps,mean_replans,push_freq\n";
  for (const auto& r : result.rows) {
    out += g6(r.sigma) + ',' + std::to_string(r.episodes) + ',' +
           std::to_string(r.successes) + ',' + g6(r.sr) + ',' + g6(r.mean_steps) + ',' +
           g6(r.mean_replans) + ',' + g6(r.push_frequency) + '\n';
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  write_file(path, format_csv(result));
}

std::string render_plot(const SweepResult& neurosymbolic, const SweepResult& baseline,
                        PlotKind kind) {
  if (neurosymbolic.rows.size() != baseline.rows.size()) {
    throw std::invalid_argument("sweeps have different sigma lists");
  }
  for (std::size_t i = 0; i < baseline.rows.size(); ++i) {
    if (neurosymbolic.rows[i].sigma != baseline.rows[i].sigma) {
      throw std::invalid_argument("sweeps have different sigma lists");
    }
  }

  auto value = [kind](const SweepRow& r) {
    return kind == PlotKind::kSuccessRate ? r.sr : r.mean_steps;
  };
  double x_max = 0.0, y_max = 1.0;
  for (const auto* sweep : {&neurosymbolic, &baseline}) {
    for (const auto& r : sweep->rows) {
      x_max = std::max(x_max, r.sigma);
      if (kind == PlotKind::kMeanSteps) y_max = std::max(y_max, std::ceil(value(r)));
    }
  }
  if (x_max <= 0.0) x_max = 1.0;

  const double width = 480, height = 360, left = 60, right = 20, top = 20, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + x / x_max * pw; };
  auto py = [&](double y) { return top + ph - y / y_max * ph; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) +
         "\" height=\"" + fixed(height, 0) + "\" viewBox=\"0 0 " + fixed(width, 0) + " " +
         fixed(height, 0) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fixed(width, 0) + "\" height=\"" +
         fixed(height, 0) + "\" fill=\"white\"/>\n";
  // Axes and ticks.
  svg += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<line x1=\"" + fixed(px(0)) + "\" y1=\"" + fixed(py(0)) + "\" x2=\"" +
         fixed(px(x_max)) + "\" y2=\"" + fixed(py(0)) + "\"/>\n";
  svg += "<line x1=\"" + fixed(px(0)) + "\" y1=\"" + fixed(py(0)) + "\" x2=\"" +
         fixed(px(0)) + "\" y2=\"" + fixed(py(y_max)) + "\"/>\n";
  svg += "</g>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double x = x_max * i / 5.0, y = y_max * i / 5.0;
    svg += "<text x=\"" + fixed(px(x)) + "\" y=\"" + fixed(py(0) + 15) +
           "\" text-anchor=\"middle\">" + g6(x) + "</text>\n";
    svg += "<text x=\"" + fixed(px(0) - 6) + "\" y=\"" + fixed(py(y) + 4) +
           "\" text-anchor=\"end\">" + g6(y) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(height - 10) +
         "\" text-anchor=\"middle\">sigma (mm)</text>\n";
  svg += "<text x=\"15\" y=\"" + fixed(top + ph / 2) + "\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 15 " + fixed(top + ph / 2) + ")\">" +
         (kind == PlotKind::kSuccessRate ? "success rate" : "mean steps") + "</text>\n";
  svg += "</g>\n";

  struct Series {
    const SweepResult* sweep;
    const char* label;
    const char* color;
  };
  const Series series[] = {{&neurosymbolic, "neurosymbolic", "#1f77b4"},
                           {&baseline, "baseline", "#d62728"}};
  for (const auto& s : series) {
    std::string points;
    for (const auto& r : s.sweep->rows) {
      if (!points.empty()) points += ' ';
      points += fixed(px(r.sigma)) + ',' + fixed(py(value(r)));
    }
    svg += std::string("<polyline fill=\"none\" stroke=\"") + s.color +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
  }
  // Legend.
  double ly = top + 12;
  svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& s : series) {
    const double lx = left + pw - 120;
    svg += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(lx + 20) +
           "\" y2=\"" + fixed(ly) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed(lx + 26) + "\" y=\"" + fixed(ly + 4) + "\">" + s.label +
           "</text>\n";
    ly += 16;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void emit_plot(const SweepResult& neurosymbolic, const SweepResult& baseline, PlotKind kind,
               const std::filesystem::path& path) {
  write_file(path, render_plot(neurosymbolic, baseline, kind));
}

}  // namespace boltdis
