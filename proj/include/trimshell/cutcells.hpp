#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "trimshell/spline.hpp"

namespace trimshell {

// ---------------------------------------------------------------------------
// Curves and maps in reference coordinates.  Integration cells are described
// by maps [0,1]^2 -> parent coordinates built from ruled blends between two
// curves; a degenerate (point) curve yields a collapsed-triangle map whose
// Jacobian carries the usual collapse factor.
// ---------------------------------------------------------------------------

class Curve1D {
public:
  virtual ~Curve1D() = default;
  virtual Vec2 pos(double t) const = 0;
  virtual Vec2 tan(double t) const = 0;
};

class SegmentCurve final : public Curve1D {
public:
  SegmentCurve(Vec2 a, Vec2 b) : a_(a), b_(b) {}
  Vec2 pos(double t) const override { return (1.0 - t) * a_ + t * b_; }
  Vec2 tan(double) const override { return b_ - a_; }

private:
  Vec2 a_, b_;
};

class PointCurve final : public Curve1D {
public:
  explicit PointCurve(Vec2 p) : p_(p) {}
  Vec2 pos(double) const override { return p_; }
  Vec2 tan(double) const override { return Vec2::Zero(); }

private:
  Vec2 p_;
};

// Interpolatory curve through p+1 nodes at equally spaced parameters.
class LagrangeCurve final : public Curve1D {
public:
  explicit LagrangeCurve(std::vector<Vec2> nodes) : nodes_(std::move(nodes)) {}
  Vec2 pos(double t) const override;
  Vec2 tan(double t) const override;
  const std::vector<Vec2>& nodes() const { return nodes_; }

private:
  std::vector<Vec2> nodes_;
};

// Affine sub-interval view; t0 > t1 reverses the orientation.
class SubCurve final : public Curve1D {
public:
  SubCurve(std::shared_ptr<const Curve1D> base, double t0, double t1)
      : base_(std::move(base)), t0_(t0), t1_(t1) {}
  Vec2 pos(double t) const override { return base_->pos(t0_ + (t1_ - t0_) * t); }
  Vec2 tan(double t) const override { return (t1_ - t0_) * base_->tan(t0_ + (t1_ - t0_) * t); }

private:
  std::shared_ptr<const Curve1D> base_;
  double t0_, t1_;
};

class CellMap {
public:
  virtual ~CellMap() = default;
  virtual Vec2 pos(double a, double b) const = 0;
  virtual Eigen::Matrix2d jac(double a, double b) const = 0;
  double jac_det(double a, double b) const { return jac(a, b).determinant(); }
};

class RectMap final : public CellMap {
public:
  RectMap(double a0, double a1, double b0, double b1) : a0_(a0), da_(a1 - a0), b0_(b0), db_(b1 - b0) {}
  Vec2 pos(double a, double b) const override { return Vec2(a0_ + da_ * a, b0_ + db_ * b); }
  Eigen::Matrix2d jac(double, double) const override {
    Eigen::Matrix2d J;
    J << da_, 0.0, 0.0, db_;
    return J;
  }

private:
  double a0_, da_, b0_, db_;
};

// X(a,b) = (1-b) c0(a) + b c1(a)
class RuledMap final : public CellMap {
public:
  RuledMap(std::shared_ptr<const Curve1D> c0, std::shared_ptr<const Curve1D> c1)
      : c0_(std::move(c0)), c1_(std::move(c1)) {}
  Vec2 pos(double a, double b) const override {
    return (1.0 - b) * c0_->pos(a) + b * c1_->pos(a);
  }
  Eigen::Matrix2d jac(double a, double b) const override {
    Eigen::Matrix2d J;
    const Vec2 da = (1.0 - b) * c0_->tan(a) + b * c1_->tan(a);
    const Vec2 db = c1_->pos(a) - c0_->pos(a);
    J.col(0) = da;
    J.col(1) = db;
    return J;
  }

private:
  std::shared_ptr<const Curve1D> c0_, c1_;
};

class ComposedMap final : public CellMap {
public:
  ComposedMap(std::shared_ptr<const CellMap> outer, std::shared_ptr<const CellMap> inner)
      : outer_(std::move(outer)), inner_(std::move(inner)) {}
  Vec2 pos(double a, double b) const override {
    const Vec2 q = inner_->pos(a, b);
    return outer_->pos(q.x(), q.y());
  }
  Eigen::Matrix2d jac(double a, double b) const override {
    const Vec2 q = inner_->pos(a, b);
    return outer_->jac(q.x(), q.y()) * inner_->jac(a, b);
  }

private:
  std::shared_ptr<const CellMap> outer_, inner_;
};

// ---------------------------------------------------------------------------
// Lagrange interpolant of a level-set function on the reference square.
// ---------------------------------------------------------------------------

// 1D Lagrange basis values/derivatives at equally spaced nodes i/p, i=0..p.
void lagrange_basis_1d(int p, double t, double* vals, double* ders);

struct LagrangeInterp2D {
  int p = 0;
  std::vector<double> nodal;  // (p+1)^2, node (i,j) at (i/p, j/p), index i + (p+1)j

  double value(double a, double b) const;
  Vec2 gradient(double a, double b) const;
};

// Values taken from 'f' at the Lagrange nodes mapped by 'map'.
template <typename F>
LagrangeInterp2D interpolate_on_cell(const F& f, const CellMap& map, int p) {
  LagrangeInterp2D li;
  li.p = p;
  li.nodal.resize((p + 1) * (p + 1));
  for (int j = 0; j <= p; ++j)
    for (int i = 0; i <= p; ++i) {
      const Vec2 xi = map.pos(static_cast<double>(i) / p, static_cast<double>(j) / p);
      li.nodal[i + (p + 1) * j] = f(xi.x(), xi.y());
    }
  return li;
}

// ---------------------------------------------------------------------------
// Cut topology, reconstruction, decomposition.
// ---------------------------------------------------------------------------

enum class CutTopology { uncut_inside, uncut_outside, case1, case2, invalid };

// Reference-square edges: 0 bottom (t,0), 1 right (1,t), 2 top (t,1), 3 left (0,t).
Vec2 edge_point(int edge, double t);
Vec2 edge_dir(int edge);

struct TopologyInfo {
  CutTopology kind = CutTopology::invalid;
  int cut_edge[2] = {-1, -1};         // sorted edge ids (case1/case2)
  double bracket[2][2] = {{0, 0}, {0, 0}};  // sign-change bracket on each cut edge
};

// Classify the cut situation from the (n1d x n1d) sample grid of the
// interpolant: valid when each edge is cut at most once and the total number
// of cut edges is two or zero (zero requiring a one-signed grid).
TopologyInfo detect_topology(const LagrangeInterp2D& phi, int n1d);

struct ReconstructionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// p+1 nodes on the zero level of the interpolant: edge intersections first,
// then Newton searches along the chord with fixed gradient directions.
std::shared_ptr<LagrangeCurve> reconstruct_interface(const LagrangeInterp2D& phi,
                                                     const TopologyInfo& topo, double tol);

struct SubCell {
  std::shared_ptr<const CellMap> map;  // [0,1]^2 -> parent reference coords
  bool inside = false;                 // positive side of the cut level set
  bool has_curve = false;
};

// Case 1: corner triangle plus four pentagon-side triangles fanned from the
// projection of the pentagon centroid onto the curve; case 2: one quad per
// side with the curve as shared edge.  Cells tile the square exactly.
std::vector<SubCell> decompose_cell(const LagrangeInterp2D& phi, const TopologyInfo& topo,
                                    std::shared_ptr<const LagrangeCurve> curve);

}  // namespace trimshell
