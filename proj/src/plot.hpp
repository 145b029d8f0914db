#pragma once

#include <string>
#include <vector>

namespace neuroloop::plot {

struct Point {
  double x = 0.0;
  double mean = 0.0;
  double sem = 0.0;
};

struct Series {
  std::string name;
  std::vector<Point> points;
};

struct Figure {
  std::string title, x_label, y_label;
  std::vector<Series> series;
};

/// Line chart with SEM error bars, one colour per series.
std::string render_svg(const Figure& fig);

}  // namespace neuroloop::plot
