#include "trimshell/trimming.hpp"

#include <algorithm>
#include <limits>

namespace trimshell {

CompositeValue composite_levelset(const TrimmedPatch& patch, double r, double s) {
  CompositeValue cv{std::numeric_limits<double>::infinity(), -1};
  if (patch.levelsets.empty()) {
    cv.value = 1.0;
    return cv;
  }
  for (size_t i = 0; i < patch.levelsets.size(); ++i) {
    const double v = patch.levelsets[i]->value(r, s);
    if (v < cv.value) {
      cv.value = v;
      cv.active = static_cast<int>(i);
    }
  }
  return cv;
}

SpanClass classify_span(const TrimmedPatch& patch, double r0, double r1, double s0,
                        double s1, int resolution, double zero_tol) {
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  for (int j = 0; j <= resolution; ++j)
    for (int i = 0; i <= resolution; ++i) {
      const double r = r0 + (r1 - r0) * i / resolution;
      const double s = s0 + (s1 - s0) * j / resolution;
      const double v = composite_levelset(patch, r, s).value;
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  const double scale = std::max({1.0, std::abs(vmin), std::abs(vmax)});
  const double tol = zero_tol * scale;
  if (vmin >= -tol && vmax > tol) return SpanClass::inside;
  if (vmax <= tol) return SpanClass::outside;
  return SpanClass::cut;
}

}  // namespace trimshell
