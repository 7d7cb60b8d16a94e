#pragma once

#include <memory>

#include "trimshell/geometry.hpp"
#include "trimshell/levelset.hpp"

namespace trimshell {

enum class SpanClass { inside, outside, cut };

// A spline analysis basis over a parameter rectangle, a midsurface geometry,
// and the trimming curves that delineate the visible domain.
struct TrimmedPatch {
  TensorBasis basis;
  std::shared_ptr<SurfaceGeometry> geometry;
  std::vector<std::shared_ptr<LevelSet>> levelsets;

  double umin() const { return basis.ku.umin(); }
  double umax() const { return basis.ku.umax(); }
  double vmin() const { return basis.kv.umin(); }
  double vmax() const { return basis.kv.umax(); }
};

// Pointwise min over all trimming functions plus the index attaining it;
// visible iff the composite is >= 0.
struct CompositeValue {
  double value;
  int active;  // index of the minimizing curve
};
CompositeValue composite_levelset(const TrimmedPatch& patch, double r, double s);

// Classify one knot span against the composite level set using a dense sample
// grid of (resolution+1)^2 points.  Values within 'zero_tol' of zero count as
// visible, so trimming curves aligned with knot lines do not create cut spans.
SpanClass classify_span(const TrimmedPatch& patch, double r0, double r1, double s0,
                        double s1, int resolution, double zero_tol = 1e-12);

}  // namespace trimshell
