#include "trimshell/plots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trimshell {

namespace {
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
}

std::string svg_loglog_plot(const std::string& title, const std::string& xlabel,
                            const std::string& ylabel, const std::vector<PlotSeries>& series) {
  const int W = 640, Hh = 480;
  const int ml = 70, mr = 140, mt = 40, mb = 50;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (x <= 0.0 || y <= 0.0) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) {
    xmin = ymin = 0.1;
    xmax = ymax = 1.0;
  }
  auto expand = [](double& lo, double& hi) {
    const double a = std::floor(std::log10(lo));
    const double b = std::ceil(std::log10(hi));
    lo = std::pow(10.0, a);
    hi = std::pow(10.0, (b > a) ? b : a + 1);
  };
  expand(xmin, xmax);
  expand(ymin, ymax);

  auto px = [&](double x) {
    return ml + (std::log10(x) - std::log10(xmin)) / (std::log10(xmax) - std::log10(xmin)) *
                    (W - ml - mr);
  };
  auto py = [&](double y) {
    return Hh - mb - (std::log10(y) - std::log10(ymin)) /
                         (std::log10(ymax) - std::log10(ymin)) * (Hh - mt - mb);
  };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << Hh << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='15'>" << title
     << "</text>\n";

  // decade grid and tick labels
  for (int d = static_cast<int>(std::log10(xmin)); d <= static_cast<int>(std::log10(xmax)); ++d) {
    const double x = std::pow(10.0, d);
    os << "<line x1='" << px(x) << "' y1='" << mt << "' x2='" << px(x) << "' y2='" << Hh - mb
       << "' stroke='#dddddd'/>\n";
    os << "<text x='" << px(x) << "' y='" << Hh - mb + 18
       << "' text-anchor='middle' font-size='11'>1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::log10(ymin)); d <= static_cast<int>(std::log10(ymax)); ++d) {
    const double y = std::pow(10.0, d);
    os << "<line x1='" << ml << "' y1='" << py(y) << "' x2='" << W - mr << "' y2='" << py(y)
       << "' stroke='#dddddd'/>\n";
    os << "<text x='" << ml - 8 << "' y='" << py(y) + 4
       << "' text-anchor='end' font-size='11'>1e" << d << "</text>\n";
  }
  os << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
     << Hh - mt - mb << "' fill='none' stroke='black'/>\n";
  os << "<text x='" << (ml + W - mr) / 2 << "' y='" << Hh - 10
     << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
  os << "<text x='18' y='" << (mt + Hh - mb) / 2 << "' font-size='13' transform='rotate(-90 18 "
     << (mt + Hh - mb) / 2 << ")' text-anchor='middle'>" << ylabel << "</text>\n";

  int ci = 0;
  for (const auto& s : series) {
    const char* color = kColors[ci % 8];
    std::ostringstream pts;
    for (const auto& [x, y] : s.points) {
      if (x <= 0.0 || y <= 0.0) continue;
      pts << px(x) << ',' << py(y) << ' ';
    }
    os << "<polyline points='" << pts.str() << "' fill='none' stroke='" << color
       << "' stroke-width='1.5'/>\n";
    for (const auto& [x, y] : s.points) {
      if (x <= 0.0 || y <= 0.0) continue;
      os << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='3' fill='" << color << "'/>\n";
    }
    os << "<text x='" << W - mr + 10 << "' y='" << mt + 16 * ci + 12 << "' font-size='12' fill='"
       << color << "'>" << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace trimshell
