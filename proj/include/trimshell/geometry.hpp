#pragma once

#include <functional>
#include <memory>

#include "trimshell/spline.hpp"

namespace trimshell {

// Midsurface map.  The spline variant covers the isogeometric benchmarks; the
// analytic variant covers maps that have no exact spline form (evaluated in
// jet arithmetic, so all derivative orders are exact).
class SurfaceGeometry {
public:
  virtual ~SurfaceGeometry() = default;
  // Taylor jets of the three coordinates about (u, v), truncated at 'order'.
  virtual std::array<Jet, 3> jets(double u, double v, int order) const = 0;
  Vec3 position(double u, double v) const {
    const auto x = jets(u, v, 0);
    return Vec3(x[0].val(), x[1].val(), x[2].val());
  }
};

class SplineGeometry final : public SurfaceGeometry {
public:
  SplineGeometry(TensorBasis basis, ControlNet net)
      : basis_(std::move(basis)), net_(std::move(net)) {
    basis_.check();
    if (static_cast<int>(net_.points.size()) != basis_.num_funcs())
      throw std::invalid_argument("control net does not match basis");
  }
  std::array<Jet, 3> jets(double u, double v, int order) const override {
    return eval_surface(net_, basis_, u, v, order);
  }
  const TensorBasis& basis() const { return basis_; }
  const ControlNet& net() const { return net_; }

private:
  TensorBasis basis_;
  ControlNet net_;
};

class AnalyticGeometry final : public SurfaceGeometry {
public:
  using MapFn = std::function<std::array<Jet, 3>(const Jet&, const Jet&)>;
  explicit AnalyticGeometry(MapFn f) : f_(std::move(f)) {}
  std::array<Jet, 3> jets(double u, double v, int order) const override {
    return f_(Jet::var_u(u, order), Jet::var_v(v, order));
  }

private:
  MapFn f_;
};

// First- and second-order differential data of the midsurface at one point.
// P is the in-plane projector, H the Weingarten map (surface gradient of the
// unit normal, projected), jac the area stretch |t1 x t2|.
struct SurfaceFrame {
  Vec3 x;
  Vec3 t1, t2;
  Vec3 normal;
  Mat3 P;
  Mat3 H;
  double jac = 0.0;
};

SurfaceFrame surface_frame(const SurfaceGeometry& g, double u, double v);

// Orthonormal boundary triad (t, n_co, n) with n_co = n x t pointing out of
// the surface when t runs along the boundary with the domain on its left.
struct Triad {
  Vec3 t;      // boundary tangent
  Vec3 n_co;   // co-normal, in the tangent plane
  Vec3 n;      // surface normal
};

Triad boundary_triad(const SurfaceFrame& frame, const Vec3& tangent);

}  // namespace trimshell
