#pragma once

#include <string>
#include <vector>

namespace oscibench {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false;
  bool logy = false;
  int width = 720, height = 480;
};

/// Self-contained static SVG: one polyline per series, axis ticks, legend.
/// No external assets. Points with non-positive coordinates are skipped on
/// log axes.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);

}  // namespace oscibench
