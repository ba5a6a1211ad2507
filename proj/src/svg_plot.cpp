#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace secest::cli {

namespace {

constexpr double kWidth = 820, kHeight = 460;
constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

const char* plot_color(int index) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[index % 10];
}

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                       std::string name, std::string color, bool dashed) {
  if (xs.size() != ys.size()) throw std::invalid_argument("SvgPlot: x/y size mismatch");
  lines_.push_back({xs, ys, std::move(name), std::move(color), dashed});
}

void SvgPlot::add_hline(double y, std::string name, std::string color) {
  hlines_.emplace_back(y, std::move(name), std::move(color));
}

void SvgPlot::write(const std::string& path) const {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& l : lines_) {
    for (size_t i = 0; i < l.xs.size(); ++i) {
      if (!std::isfinite(l.xs[i]) || !std::isfinite(l.ys[i])) continue;
      xmin = std::min(xmin, l.xs[i]);
      xmax = std::max(xmax, l.xs[i]);
      ymin = std::min(ymin, l.ys[i]);
      ymax = std::max(ymax, l.ys[i]);
    }
  }
  for (const auto& [y, name, color] : hlines_) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("SvgPlot: cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='16' "
      << "font-family='sans-serif'>" << title_ << "</text>\n";
  out << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << pw << "' height='" << ph
      << "' fill='none' stroke='#444'/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double x = xmin + (xmax - xmin) * i / 5.0;
    const double y = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1='" << px(x) << "' y1='" << kTop + ph << "' x2='" << px(x) << "' y2='"
        << kTop + ph + 5 << "' stroke='#444'/>\n";
    out << "<text x='" << px(x) << "' y='" << kTop + ph + 20
        << "' text-anchor='middle' font-size='11' font-family='sans-serif'>" << num(x)
        << "</text>\n";
    out << "<line x1='" << kLeft - 5 << "' y1='" << py(y) << "' x2='" << kLeft << "' y2='" << py(y)
        << "' stroke='#444'/>\n";
    out << "<text x='" << kLeft - 8 << "' y='" << py(y) + 4
        << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << num(y) << "</text>\n";
  }
  out << "<text x='" << kLeft + pw / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-size='13' font-family='sans-serif'>" << x_label_
      << "</text>\n";
  out << "<text x='18' y='" << kTop + ph / 2
      << "' text-anchor='middle' font-size='13' font-family='sans-serif' transform='rotate(-90 18 "
      << kTop + ph / 2 << ")'>" << y_label_ << "</text>\n";

  for (const auto& [y, name, color] : hlines_) {
    out << "<line x1='" << kLeft << "' y1='" << py(y) << "' x2='" << kLeft + pw << "' y2='"
        << py(y) << "' stroke='" << color << "' stroke-dasharray='8 4'/>\n";
  }

  int legend = 0;
  for (const auto& l : lines_) {
    out << "<polyline fill='none' stroke='" << l.color << "' stroke-width='1.4'";
    if (l.dashed) out << " stroke-dasharray='5 3'";
    out << " points='";
    for (size_t i = 0; i < l.xs.size(); ++i) {
      if (!std::isfinite(l.xs[i]) || !std::isfinite(l.ys[i])) continue;
      const double cy = std::clamp(l.ys[i], ymin, ymax);
      out << num(px(l.xs[i])) << "," << num(py(cy)) << " ";
    }
    out << "'/>\n";
    const double ly = kTop + 14 + 16 * legend;
    out << "<line x1='" << kLeft + pw + 10 << "' y1='" << ly << "' x2='" << kLeft + pw + 34
        << "' y2='" << ly << "' stroke='" << l.color << "' stroke-width='2'";
    if (l.dashed) out << " stroke-dasharray='5 3'";
    out << "/>\n";
    out << "<text x='" << kLeft + pw + 40 << "' y='" << ly + 4
        << "' font-size='11' font-family='sans-serif'>" << l.name << "</text>\n";
    ++legend;
  }
  for (const auto& [y, name, color] : hlines_) {
    const double ly = kTop + 14 + 16 * legend;
    out << "<line x1='" << kLeft + pw + 10 << "' y1='" << ly << "' x2='" << kLeft + pw + 34
        << "' y2='" << ly << "' stroke='" << color << "' stroke-dasharray='8 4'/>\n";
    out << "<text x='" << kLeft + pw + 40 << "' y='" << ly + 4
        << "' font-size='11' font-family='sans-serif'>" << name << "</text>\n";
    ++legend;
  }
  out << "</svg>\n";
}

}  // namespace secest::cli
