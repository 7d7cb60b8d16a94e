#pragma once

#include <string>
#include <vector>

namespace trimshell {

// Minimal static log-log SVG plot: one polyline per series, log-scaled axes
// with decade ticks.  Non-positive values are dropped from their series.
struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

std::string svg_loglog_plot(const std::string& title, const std::string& xlabel,
                            const std::string& ylabel, const std::vector<PlotSeries>& series);

}  // namespace trimshell
