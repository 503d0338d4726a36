#include "dipolesim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dipolesim/errors.hpp"

namespace dipolesim {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 780.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 480.0;

// Fixed two-decimal coordinates keep the byte output independent of locale
// and shortest-repr quirks.
void append_fixed(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  out += buf;
}

void append_sig(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  out += buf;
}

}  // namespace

std::string render_plot_svg(const std::vector<ExperimentRecord>& records,
                            const std::optional<ScalingFit>& fit) {
  if (records.empty()) throw parameter_error("plot: no records");

  double xmin = records[0].n, xmax = records[0].n;
  double ymax = 1.0;
  for (const ExperimentRecord& r : records) {
    xmin = std::min(xmin, r.n);
    xmax = std::max(xmax, r.n);
    ymax = std::max(ymax, static_cast<double>(r.eta_n));
  }
  bool single_n = xmin == xmax;
  double xlo = single_n ? xmin - 1.0 : xmin;
  double xhi = single_n ? xmax + 1.0 : xmax;
  if (fit.has_value() && !single_n) {
    for (int s = 0; s <= 128; ++s) {
      double n = xlo + (xhi - xlo) * static_cast<double>(s) / 128.0;
      ymax = std::max(ymax, fit->c1 + fit->amplitude * std::pow(n, fit->exponent));
    }
  }
  double ylo = 0.0;
  double yhi = ymax * 1.05;

  auto sx = [&](double v) {
    return kLeft + (v - xlo) / (xhi - xlo) * (kRight - kLeft);
  };
  auto sy = [&](double v) {
    return kBottom - (v - ylo) / (yhi - ylo) * (kBottom - kTop);
  };

  std::string svg;
  svg.reserve(4096 + records.size() * 64);
  svg +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"520\" "
      "viewBox=\"0 0 800 520\">\n"
      "<rect x=\"0\" y=\"0\" width=\"800\" height=\"520\" fill=\"white\"/>\n"
      "<line x1=\"60.00\" y1=\"480.00\" x2=\"780.00\" y2=\"480.00\" "
      "stroke=\"black\" stroke-width=\"1\"/>\n"
      "<line x1=\"60.00\" y1=\"20.00\" x2=\"60.00\" y2=\"480.00\" "
      "stroke=\"black\" stroke-width=\"1\"/>\n";

  // Min/max tick labels on each axis plus axis titles.
  svg += "<text x=\"60.00\" y=\"498.00\" font-size=\"12\" "
         "text-anchor=\"middle\">";
  append_sig(svg, xlo);
  svg += "</text>\n<text x=\"780.00\" y=\"498.00\" font-size=\"12\" "
         "text-anchor=\"middle\">";
  append_sig(svg, xhi);
  svg += "</text>\n<text x=\"54.00\" y=\"484.00\" font-size=\"12\" "
         "text-anchor=\"end\">";
  append_sig(svg, ylo);
  svg += "</text>\n<text x=\"54.00\" y=\"24.00\" font-size=\"12\" "
         "text-anchor=\"end\">";
  append_sig(svg, yhi);
  svg += "</text>\n"
         "<text x=\"420.00\" y=\"514.00\" font-size=\"13\" "
         "text-anchor=\"middle\">intensity n</text>\n"
         "<text x=\"16.00\" y=\"250.00\" font-size=\"13\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 16 250)\">active "
         "links</text>\n";

  for (const ExperimentRecord& r : records) {
    svg += "<circle cx=\"";
    append_fixed(svg, sx(r.n));
    svg += "\" cy=\"";
    append_fixed(svg, sy(static_cast<double>(r.eta_n)));
    svg += "\" r=\"3\" fill=\"#4682b4\" fill-opacity=\"0.5\"/>\n";
  }

  if (fit.has_value() && !single_n) {
    svg += "<polyline fill=\"none\" stroke=\"#d2691e\" stroke-width=\"2\" "
           "points=\"";
    for (int s = 0; s <= 128; ++s) {
      double n = xlo + (xhi - xlo) * static_cast<double>(s) / 128.0;
      double y = fit->c1 + fit->amplitude * std::pow(n, fit->exponent);
      if (s != 0) svg.push_back(' ');
      append_fixed(svg, sx(n));
      svg.push_back(',');
      append_fixed(svg, sy(std::clamp(y, ylo, yhi)));
    }
    svg += "\"/>\n";
  }

  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::vector<ExperimentRecord>& records,
               const std::optional<ScalingFit>& fit, const std::string& path) {
  std::string svg = render_plot_svg(records, fit);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write plot file '" + path + "'");
  out << svg;
  if (!out.flush()) throw io_error("failed writing plot file '" + path + "'");
}

}  // namespace dipolesim
