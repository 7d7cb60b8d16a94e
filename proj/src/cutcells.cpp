#include "trimshell/cutcells.hpp"

#include <algorithm>
#include <cmath>

namespace trimshell {

void lagrange_basis_1d(int p, double t, double* vals, double* ders) {
  // direct product form; p stays small (<= 6)
  for (int i = 0; i <= p; ++i) {
    const double xi = static_cast<double>(i) / p;
    double v = 1.0;
    for (int k = 0; k <= p; ++k) {
      if (k == i) continue;
      const double xk = static_cast<double>(k) / p;
      v *= (t - xk) / (xi - xk);
    }
    vals[i] = v;
    if (ders) {
      double d = 0.0;
      for (int m = 0; m <= p; ++m) {
        if (m == i) continue;
        double term = 1.0;
        for (int k = 0; k <= p; ++k) {
          if (k == i || k == m) continue;
          const double xk = static_cast<double>(k) / p;
          term *= (t - xk);
        }
        double denom = 1.0;
        for (int k = 0; k <= p; ++k) {
          if (k == i) continue;
          denom *= (static_cast<double>(i) / p - static_cast<double>(k) / p);
        }
        d += term / denom;
      }
      ders[i] = d;
    }
  }
}

double LagrangeInterp2D::value(double a, double b) const {
  double Na[8], Nb[8];
  lagrange_basis_1d(p, a, Na, nullptr);
  lagrange_basis_1d(p, b, Nb, nullptr);
  double v = 0.0;
  for (int j = 0; j <= p; ++j)
    for (int i = 0; i <= p; ++i) v += nodal[i + (p + 1) * j] * Na[i] * Nb[j];
  return v;
}

Vec2 LagrangeInterp2D::gradient(double a, double b) const {
  double Na[8], Nb[8], Da[8], Db[8];
  lagrange_basis_1d(p, a, Na, Da);
  lagrange_basis_1d(p, b, Nb, Db);
  Vec2 g = Vec2::Zero();
  for (int j = 0; j <= p; ++j)
    for (int i = 0; i <= p; ++i) {
      const double c = nodal[i + (p + 1) * j];
      g.x() += c * Da[i] * Nb[j];
      g.y() += c * Na[i] * Db[j];
    }
  return g;
}

Vec2 LagrangeCurve::pos(double t) const {
  const int p = static_cast<int>(nodes_.size()) - 1;
  double N[8];
  lagrange_basis_1d(p, t, N, nullptr);
  Vec2 x = Vec2::Zero();
  for (int i = 0; i <= p; ++i) x += N[i] * nodes_[i];
  return x;
}

Vec2 LagrangeCurve::tan(double t) const {
  const int p = static_cast<int>(nodes_.size()) - 1;
  double N[8], D[8];
  lagrange_basis_1d(p, t, N, D);
  Vec2 x = Vec2::Zero();
  for (int i = 0; i <= p; ++i) x += D[i] * nodes_[i];
  return x;
}

Vec2 edge_point(int edge, double t) {
  switch (edge) {
    case 0: return Vec2(t, 0.0);
    case 1: return Vec2(1.0, t);
    case 2: return Vec2(t, 1.0);
    default: return Vec2(0.0, t);
  }
}

Vec2 edge_dir(int edge) {
  switch (edge) {
    case 0: return Vec2(1.0, 0.0);
    case 1: return Vec2(0.0, 1.0);
    case 2: return Vec2(1.0, 0.0);
    default: return Vec2(0.0, 1.0);
  }
}

TopologyInfo detect_topology(const LagrangeInterp2D& phi, int n1d) {
  TopologyInfo info;
  double vmax = 0.0;
  std::vector<double> grid(n1d * n1d);
  for (int j = 0; j < n1d; ++j)
    for (int i = 0; i < n1d; ++i) {
      const double v = phi.value(static_cast<double>(i) / (n1d - 1),
                                 static_cast<double>(j) / (n1d - 1));
      grid[i + n1d * j] = v;
      vmax = std::max(vmax, std::abs(v));
    }
  const double tol = 1e-12 * std::max(1.0, vmax);
  auto sgn = [&](double v) { return v > tol ? 1 : (v < -tol ? -1 : 1); };  // zero counts visible

  int n_cut = 0;
  for (int e = 0; e < 4 && n_cut <= 2; ++e) {
    int changes = 0;
    double lo = 0.0, hi = 0.0;
    int prev = 0;
    for (int k = 0; k < n1d; ++k) {
      const double t = static_cast<double>(k) / (n1d - 1);
      const Vec2 q = edge_point(e, t);
      const int idx = static_cast<int>(std::lround(q.x() * (n1d - 1))) +
                      n1d * static_cast<int>(std::lround(q.y() * (n1d - 1)));
      const int s = sgn(grid[idx]);
      if (k > 0 && s != prev) {
        ++changes;
        lo = static_cast<double>(k - 1) / (n1d - 1);
        hi = t;
      }
      prev = s;
    }
    if (changes > 1) {
      info.kind = CutTopology::invalid;
      return info;
    }
    if (changes == 1) {
      if (n_cut < 2) {
        info.cut_edge[n_cut] = e;
        info.bracket[n_cut][0] = lo;
        info.bracket[n_cut][1] = hi;
      }
      ++n_cut;
    }
  }

  if (n_cut == 0) {
    int neg = 0;
    for (double v : grid)
      if (v < -tol) ++neg;
    int pos = static_cast<int>(grid.size()) - neg;
    if (neg == 0) {
      info.kind = CutTopology::uncut_inside;
    } else if (pos == 0) {
      info.kind = CutTopology::uncut_outside;
    } else {
      info.kind = CutTopology::invalid;  // interior bubble: refine
    }
    return info;
  }
  if (n_cut != 2) {
    info.kind = CutTopology::invalid;
    return info;
  }
  const int e0 = info.cut_edge[0], e1 = info.cut_edge[1];
  info.kind = (e0 + 2 == e1) ? CutTopology::case2 : CutTopology::case1;
  return info;
}

namespace {

// safeguarded Newton for the interpolant restricted to an edge
double edge_root(const LagrangeInterp2D& phi, int edge, double lo, double hi, double tol) {
  auto f = [&](double t) {
    const Vec2 q = edge_point(edge, t);
    return phi.value(q.x(), q.y());
  };
  double flo = f(lo), fhi = f(hi);
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;
  if (flo * fhi > 0.0) throw ReconstructionFailure("edge bracket lost");
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const Vec2 q = edge_point(edge, t);
    const double v = phi.value(q.x(), q.y());
    const double dv = phi.gradient(q.x(), q.y()).dot(edge_dir(edge));
    if (std::abs(v) <= tol) {
      // one polishing step; exact for straight cuts
      if (dv != 0.0) {
        const double tp = t - v / dv;
        if (tp >= lo - 1e-12 && tp <= hi + 1e-12) return tp;
      }
      return t;
    }
    if (v * flo < 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    double tn = (dv != 0.0) ? t - v / dv : 0.5 * (lo + hi);
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    t = tn;
  }
  throw ReconstructionFailure("edge root search did not converge");
}

}  // namespace

std::shared_ptr<LagrangeCurve> reconstruct_interface(const LagrangeInterp2D& phi,
                                                     const TopologyInfo& topo, double tol) {
  if (topo.kind != CutTopology::case1 && topo.kind != CutTopology::case2)
    throw ReconstructionFailure("reconstruct called on uncut/invalid topology");
  const int p = phi.p;
  double scale = 0.0;
  for (double v : phi.nodal) scale = std::max(scale, std::abs(v));
  const double abstol = tol * std::max(1.0, scale);

  const double t0 = edge_root(phi, topo.cut_edge[0], topo.bracket[0][0], topo.bracket[0][1], abstol);
  const double t1 = edge_root(phi, topo.cut_edge[1], topo.bracket[1][0], topo.bracket[1][1], abstol);
  const Vec2 x0 = edge_point(topo.cut_edge[0], t0);
  const Vec2 x1 = edge_point(topo.cut_edge[1], t1);

  std::vector<Vec2> nodes(p + 1);
  nodes[0] = x0;
  nodes[p] = x1;
  for (int k = 1; k < p; ++k) {
    const double lam = static_cast<double>(k) / p;
    Vec2 x = (1.0 - lam) * x0 + lam * x1;
    Vec2 dir = phi.gradient(x.x(), x.y());
    const double dn = dir.norm();
    if (dn < 1e-14) throw ReconstructionFailure("vanishing interpolant gradient");
    dir /= dn;
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      const double v = phi.value(x.x(), x.y());
      if (std::abs(v) <= abstol) {
        // polishing step along the fixed direction
        const double slope = phi.gradient(x.x(), x.y()).dot(dir);
        if (slope != 0.0) {
          const Vec2 xp = x - (v / slope) * dir;
          if (xp.x() > -1e-9 && xp.x() < 1.0 + 1e-9 && xp.y() > -1e-9 && xp.y() < 1.0 + 1e-9)
            x = xp;
        }
        ok = true;
        break;
      }
      const double slope = phi.gradient(x.x(), x.y()).dot(dir);
      if (slope == 0.0) break;
      Vec2 step = -(v / slope) * dir;
      Vec2 xn = x + step;
      // half steps while overshooting the cell
      int halvings = 0;
      while ((xn.x() < -0.1 || xn.x() > 1.1 || xn.y() < -0.1 || xn.y() > 1.1) && halvings < 30) {
        step *= 0.5;
        xn = x + step;
        ++halvings;
      }
      x = xn;
    }
    if (!ok || x.x() < -1e-9 || x.x() > 1.0 + 1e-9 || x.y() < -1e-9 || x.y() > 1.0 + 1e-9)
      throw ReconstructionFailure("interface Newton failed");
    nodes[k] = x;
  }
  return std::make_shared<LagrangeCurve>(std::move(nodes));
}

namespace {

std::shared_ptr<const CellMap> oriented_ruled(std::shared_ptr<const Curve1D> c0,
                                              std::shared_ptr<const Curve1D> c1) {
  auto m = std::make_shared<RuledMap>(c0, c1);
  // sample interior points; collapsed maps vanish on one edge
  double d = 0.0;
  for (double a : {0.3, 0.7})
    for (double b : {0.3, 0.7}) d += m->jac_det(a, b);
  if (d < 0.0) return std::make_shared<RuledMap>(c1, c0);
  return m;
}

int corner_of_edges(int e0, int e1) {
  // corner ids: 0 (0,0), 1 (1,0), 2 (1,1), 3 (0,1)
  if ((e0 == 0 && e1 == 1)) return 1;
  if ((e0 == 1 && e1 == 2)) return 2;
  if ((e0 == 2 && e1 == 3)) return 3;
  return 0;  // edges 0 and 3
}

Vec2 corner_pos(int c) {
  switch (c) {
    case 0: return Vec2(0, 0);
    case 1: return Vec2(1, 0);
    case 2: return Vec2(1, 1);
    default: return Vec2(0, 1);
  }
}

}  // namespace

std::vector<SubCell> decompose_cell(const LagrangeInterp2D& phi, const TopologyInfo& topo,
                                    std::shared_ptr<const LagrangeCurve> curve) {
  std::vector<SubCell> cells;
  auto tag_inside = [&](SubCell& c) {
    const Vec2 q = c.map->pos(0.5, 0.5);
    c.inside = phi.value(q.x(), q.y()) >= 0.0;
  };
  auto check_jacobians = [&](const SubCell& c) {
    // b = 0.06 stays clear of the collapse line of triangle maps
    for (double a : {0.06, 0.5, 0.94})
      for (double b : {0.06, 0.5, 0.94})
        if (c.map->jac_det(a, b) <= 0.0)
          throw ReconstructionFailure("non-positive Jacobian in decomposed cell");
  };

  if (topo.kind == CutTopology::case2) {
    const int e0 = topo.cut_edge[0];
    std::shared_ptr<const Curve1D> side0, side1, c;
    if (e0 == 0) {
      // vertical cut: curve runs bottom->top like the side edges
      side0 = std::make_shared<SegmentCurve>(Vec2(0, 0), Vec2(0, 1));
      side1 = std::make_shared<SegmentCurve>(Vec2(1, 0), Vec2(1, 1));
      c = curve;
    } else {
      // horizontal cut: reverse so the curve runs left->right
      side0 = std::make_shared<SegmentCurve>(Vec2(0, 0), Vec2(1, 0));
      side1 = std::make_shared<SegmentCurve>(Vec2(0, 1), Vec2(1, 1));
      c = std::make_shared<SubCurve>(curve, 1.0, 0.0);
    }
    for (auto& side : {side0, side1}) {
      SubCell sc;
      sc.map = oriented_ruled(side, c);
      sc.has_curve = true;
      tag_inside(sc);
      check_jacobians(sc);
      cells.push_back(std::move(sc));
    }
    return cells;
  }

  if (topo.kind != CutTopology::case1) throw ReconstructionFailure("decompose: bad topology");

  const int e0 = topo.cut_edge[0], e1 = topo.cut_edge[1];
  const int corner = corner_of_edges(e0, e1);
  const Vec2 V = corner_pos(corner);

  // triangle on the corner side
  {
    SubCell sc;
    sc.map = oriented_ruled(std::make_shared<PointCurve>(V), curve);
    sc.has_curve = true;
    tag_inside(sc);
    check_jacobians(sc);
    cells.push_back(std::move(sc));
  }

  // pentagon side: W1 = curve(1), walk the remaining corners to W5 = curve(0)
  const Vec2 W1 = curve->pos(1.0);
  const Vec2 W5 = curve->pos(0.0);
  // corners in traversal order starting after edge e1's far corner
  // (edges around corner c: start edge e0, end edge e1)
  int far1 = -1, far0 = -1;
  {
    // far corner of an edge relative to 'corner'
    auto far_corner = [&](int e) {
      const int c0 = (e == 0) ? 0 : (e == 1) ? 1 : (e == 2) ? 3 : 0;
      const int c1 = (e == 0) ? 1 : (e == 1) ? 2 : (e == 2) ? 2 : 3;
      return (c0 == corner) ? c1 : c0;
    };
    far1 = far_corner(e1);
    far0 = far_corner(e0);
  }
  const Vec2 W2 = corner_pos(far1);
  const Vec2 W4 = corner_pos(far0);
  const Vec2 W3 = corner_pos((corner + 2) % 4);  // corner opposite the cut-off one

  const Vec2 centroid = (W1 + W2 + W3 + W4 + W5) / 5.0;
  double tbest = 0.5, dbest = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 40; ++k) {
    const double t = 0.2 + 0.6 * k / 40.0;
    const double d = (curve->pos(t) - centroid).squaredNorm();
    if (d < dbest) {
      dbest = d;
      tbest = t;
    }
  }

  auto arc_hi = std::make_shared<SubCurve>(curve, tbest, 1.0);  // X* -> W1
  auto arc_lo = std::make_shared<SubCurve>(curve, 0.0, tbest);  // W5 -> X*
  const Vec2 X = curve->pos(tbest);

  auto add_tri = [&](Vec2 apex, std::shared_ptr<const Curve1D> base, bool curved) {
    SubCell sc;
    sc.map = oriented_ruled(std::make_shared<PointCurve>(apex), std::move(base));
    sc.has_curve = curved;
    tag_inside(sc);
    check_jacobians(sc);
    cells.push_back(std::move(sc));
  };
  add_tri(W2, arc_hi, true);
  add_tri(W2, std::make_shared<SegmentCurve>(W3, X), false);
  add_tri(W4, std::make_shared<SegmentCurve>(X, W3), false);
  add_tri(W4, arc_lo, true);
  return cells;
}

}  // namespace trimshell
