#pragma once

#include <string>
#include <tuple>
#include <vector>

namespace secest::cli {

/// Minimal static line-plot writer (SVG).
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_line(const std::vector<double>& xs, const std::vector<double>& ys, std::string name,
                std::string color, bool dashed = false);
  void add_hline(double y, std::string name, std::string color);

  void write(const std::string& path) const;

 private:
  struct Line {
    std::vector<double> xs, ys;
    std::string name, color;
    bool dashed = false;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Line> lines_;
  std::vector<std::tuple<double, std::string, std::string>> hlines_;
};

/// Color cycle for multi-series plots.
const char* plot_color(int index);

}  // namespace secest::cli
