#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "trimshell/jet.hpp"

namespace trimshell {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Univariate B-spline knot vector.  Knots are non-decreasing, multiplicities
// do not exceed degree+1, and the valid parameter range is
// [knots[degree], knots[n]] with n = num_basis().
struct KnotVector {
  std::vector<double> knots;
  int degree = 0;

  KnotVector() = default;
  KnotVector(std::vector<double> k, int p);

  int num_basis() const { return static_cast<int>(knots.size()) - degree - 1; }
  double umin() const { return knots[degree]; }
  double umax() const { return knots[num_basis()]; }

  // Index s with u in [knots[s], knots[s+1]); the right endpoint maps to the
  // last non-empty span so the closed parameter range is evaluable.
  int find_span(double u) const;

  // ders(k, j) = k-th derivative of basis function (span - degree + j) at u,
  // for k = 0..order, j = 0..degree.  Rows with k > degree are zero.
  Eigen::MatrixXd eval_basis(double u, int order) const;
  Eigen::MatrixXd eval_basis(double u, int order, int span) const;

  // Distinct spans as index pairs (span index s, [knots[s], knots[s+1])).
  std::vector<int> nonempty_spans() const;

  static KnotVector clamped_uniform(int degree, int nspans, double a, double b);
};

// Tensor-product basis, optionally rational.  Function index f = i + num_u()*j.
struct TensorBasis {
  KnotVector ku, kv;
  std::vector<double> weights;  // empty: polynomial; else one positive weight per function

  int num_u() const { return ku.num_basis(); }
  int num_v() const { return kv.num_basis(); }
  int num_funcs() const { return num_u() * num_v(); }
  int index(int i, int j) const { return i + num_u() * j; }
  bool rational() const { return !weights.empty(); }
  double weight(int f) const { return rational() ? weights[f] : 1.0; }
  void check() const;
};

// Control points in physical space aligned with a TensorBasis.
struct ControlNet {
  std::vector<Vec3> points;
};

// Jets of all (p1+1)(p2+1) basis functions that are non-zero at (u,v),
// truncated at 'order'.  Local index a + (p1+1)*b maps to global function
// (span_u - p1 + a, span_v - p2 + b).
struct LocalBasis {
  int span_u = 0, span_v = 0;
  int p1 = 0, p2 = 0;
  std::vector<Jet> funcs;

  int count() const { return (p1 + 1) * (p2 + 1); }
  int global_index(const TensorBasis& tb, int local) const {
    const int a = local % (p1 + 1), b = local / (p1 + 1);
    return tb.index(span_u - p1 + a, span_v - p2 + b);
  }
};

LocalBasis eval_local_basis(const TensorBasis& tb, double u, double v, int order);

// Position and partial derivatives of the surface map up to total order
// 'order'; rational nets use the quotient-rule recursion on the homogeneous
// sums.  Returned jets carry S^{(a,b)}/(a! b!).
std::array<Jet, 3> eval_surface(const ControlNet& net, const TensorBasis& tb, double u,
                                double v, int order);

// --- benchmark set-up helpers (homogeneous Bezier/B-spline utilities) ---

// A clamped rational curve in homogeneous form: rows of hpts are (wx, wy, wz, w).
struct HomoCurve {
  KnotVector kv;
  std::vector<Eigen::Vector4d> hpts;
};

// Raise the degree of a single-segment (Bezier) curve by one.
HomoCurve elevate_bezier_once(const HomoCurve& c);
// Insert one knot value (Boehm), preserving the curve exactly.
HomoCurve insert_knot(const HomoCurve& c, double u);

// Exact circular arc of 'sweep' radians centred on the z-axis direction,
// radius R in the x-z plane, symmetric about theta = 0: a single rational
// quadratic Bezier with parameter range [a, b].
HomoCurve circular_arc_xz(double radius, double sweep, double a, double b);

}  // namespace trimshell
