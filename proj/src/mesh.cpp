#include "trimshell/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "trimshell/quadrature.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace trimshell {

int worker_count() {
  int n = 1;
#ifdef _OPENMP
  n = omp_get_max_threads();
#endif
  if (const char* env = std::getenv("TRIMSHELL_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

namespace {

struct SpanResult {
  std::vector<InteriorPoint> pts;
  std::vector<BoundaryPoint> boundary;
  double area = 0.0;
  SpanClass cls = SpanClass::outside;
};

struct Builder {
  const TrimmedPatch& patch;
  const CutCellParams& prm;

  double ls_value(int k, const Vec2& xi) const { return patch.levelsets[k]->value(xi.x(), xi.y()); }

  // level sets with a genuine sign change over the mapped cell; returns false
  // if the cell is entirely outside one of them
  bool active_levelsets(const CellMap& map, const std::vector<int>& candidates,
                        std::vector<int>& active) const {
    active.clear();
    const int n1d = prm.grid_n1d();
    for (int k : candidates) {
      double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
      for (int j = 0; j < n1d; ++j)
        for (int i = 0; i < n1d; ++i) {
          const Vec2 xi = map.pos(static_cast<double>(i) / (n1d - 1),
                                  static_cast<double>(j) / (n1d - 1));
          const double v = ls_value(k, xi);
          vmin = std::min(vmin, v);
          vmax = std::max(vmax, v);
        }
      const double tol = 1e-12 * std::max({1.0, std::abs(vmin), std::abs(vmax)});
      if (vmax <= tol) {
        if (vmax <= -tol || vmin < -tol) return false;  // invisible w.r.t. curve k
        // degenerate all-zero cell: treat as outside
        return false;
      }
      if (vmin < -tol) active.push_back(k);
    }
    return true;
  }

  void emit_interior(const CellMap& map, SpanResult& out) const {
    const auto& g = gauss_rule(prm.gauss);
    for (const auto& gb : g)
      for (const auto& ga : g) {
        const double det = map.jac_det(ga.x, gb.x);
        if (det <= 0.0) throw ReconstructionFailure("non-positive cell Jacobian");
        InteriorPoint pt;
        pt.xi = map.pos(ga.x, gb.x);
        pt.w_param = ga.w * gb.w * det;
        out.pts.push_back(pt);
        out.area += pt.w_param;
      }
  }

  // boundary rule along a reconstructed curve (cell-reference coords),
  // restricted to the sub-intervals where the remaining level sets are >= 0
  void emit_curve_boundary(const CellMap& map, const LagrangeCurve& curve, int tag,
                           const std::vector<int>& others, SpanResult& out) const {
    // split by sign changes of the other level sets along the curve
    std::vector<double> cuts{0.0, 1.0};
    const int ns = 64;
    for (int k : others) {
      double prev = ls_value(k, map_pos(map, curve, 0.0));
      for (int i = 1; i <= ns; ++i) {
        const double t = static_cast<double>(i) / ns;
        const double v = ls_value(k, map_pos(map, curve, t));
        if ((prev < 0.0) != (v < 0.0)) {
          double lo = static_cast<double>(i - 1) / ns, hi = t;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double vm = ls_value(k, map_pos(map, curve, mid));
            if ((vm < 0.0) == (prev < 0.0)) {
              lo = mid;
            } else {
              hi = mid;
            }
          }
          cuts.push_back(0.5 * (lo + hi));
        }
        prev = v;
      }
    }
    std::sort(cuts.begin(), cuts.end());

    const auto& g = gauss_rule(prm.gauss);
    for (size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
      const double t0 = cuts[seg], t1 = cuts[seg + 1];
      if (t1 - t0 < 1e-12) continue;
      const double tm = 0.5 * (t0 + t1);
      bool visible = true;
      for (int k : others)
        if (ls_value(k, map_pos(map, curve, tm)) < 0.0) visible = false;
      if (!visible) continue;
      for (const auto& gp : g) {
        const double t = t0 + (t1 - t0) * gp.x;
        const Vec2 ref = curve.pos(t);
        BoundaryPoint bp;
        bp.xi = map.pos(ref.x(), ref.y());
        bp.tan_param = map.jac(ref.x(), ref.y()) * curve.tan(t) * (t1 - t0);
        bp.out_param = -patch.levelsets[tag]->gradient(bp.xi.x(), bp.xi.y());
        bp.w = gp.w;
        bp.tag = tag;
        out.boundary.push_back(bp);
      }
    }
  }

  static Vec2 map_pos(const CellMap& map, const LagrangeCurve& curve, double t) {
    const Vec2 ref = curve.pos(t);
    return map.pos(ref.x(), ref.y());
  }

  void process_cell(std::shared_ptr<const CellMap> map, const std::vector<int>& candidates,
                    int depth, SpanResult& out) const {
    std::vector<int> active;
    if (!active_levelsets(*map, candidates, active)) return;  // fully outside
    if (active.empty()) {
      emit_interior(*map, out);
      return;
    }

    const int k = active.front();
    const std::vector<int> others(active.begin() + 1, active.end());
    auto phi = interpolate_on_cell(
        [&](double r, double s) { return patch.levelsets[k]->value(r, s); }, *map,
        prm.lagrange_order);
    const TopologyInfo topo = detect_topology(phi, prm.grid_n1d());

    auto refine = [&]() {
      if (depth >= prm.max_depth) {
        std::ostringstream msg;
        const Vec2 c = map->pos(0.5, 0.5);
        msg << "cut-cell refinement depth exhausted near (" << c.x() << ", " << c.y() << ")";
        throw std::runtime_error(msg.str());
      }
      for (int sj = 0; sj < 2; ++sj)
        for (int si = 0; si < 2; ++si) {
          auto sub = std::make_shared<RectMap>(0.5 * si, 0.5 * (si + 1), 0.5 * sj, 0.5 * (sj + 1));
          process_cell(std::make_shared<ComposedMap>(map, sub), candidates, depth + 1, out);
        }
    };

    if (topo.kind == CutTopology::invalid) {
      refine();
      return;
    }
    if (topo.kind == CutTopology::uncut_outside || topo.kind == CutTopology::uncut_inside) {
      // the exact level set changes sign here (curve k is active) but the
      // interpolant does not resolve it: refine until it does
      refine();
      return;
    }

    std::shared_ptr<LagrangeCurve> curve;
    std::vector<SubCell> sub;
    try {
      curve = reconstruct_interface(phi, topo, prm.newton_tol);
      sub = decompose_cell(phi, topo, curve);
    } catch (const ReconstructionFailure&) {
      refine();
      return;
    }

    emit_curve_boundary(*map, *curve, k, others, out);
    for (const auto& c : sub) {
      if (!c.inside) continue;
      process_cell(std::make_shared<ComposedMap>(map, c.map), others, depth, out);
    }
  }

  // straight boundary rules along a span edge (patch side or knot-aligned
  // trimming curve), restricted to visible sub-intervals
  void emit_edge_rule(const SpanData& sd, int edge, int tag, const std::vector<int>& skip,
                      SpanResult& out) const {
    const Vec2 c0(sd.r0, sd.s0), c1(sd.r1, sd.s0), c2(sd.r1, sd.s1), c3(sd.r0, sd.s1);
    Vec2 a, b, outward;
    switch (edge) {
      case 0: a = c0; b = c1; outward = Vec2(0, -1); break;
      case 1: a = c1; b = c2; outward = Vec2(1, 0); break;
      case 2: a = c3; b = c2; outward = Vec2(0, 1); break;
      default: a = c0; b = c3; outward = Vec2(-1, 0); break;
    }
    auto comp_others = [&](double t) {
      const Vec2 xi = (1.0 - t) * a + t * b;
      double v = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < patch.levelsets.size(); ++i) {
        if (std::find(skip.begin(), skip.end(), static_cast<int>(i)) != skip.end()) continue;
        v = std::min(v, patch.levelsets[i]->value(xi.x(), xi.y()));
      }
      return v;
    };
    std::vector<double> cuts{0.0, 1.0};
    const int ns = 64;
    double prev = comp_others(0.0);
    for (int i = 1; i <= ns; ++i) {
      const double t = static_cast<double>(i) / ns;
      const double v = comp_others(t);
      if ((prev < 0.0) != (v < 0.0)) {
        double lo = static_cast<double>(i - 1) / ns, hi = t;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if ((comp_others(mid) < 0.0) == (prev < 0.0)) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        cuts.push_back(0.5 * (lo + hi));
      }
      prev = v;
    }
    std::sort(cuts.begin(), cuts.end());
    const auto& g = gauss_rule(prm.gauss);
    for (size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
      const double t0 = cuts[seg], t1 = cuts[seg + 1];
      if (t1 - t0 < 1e-12) continue;
      if (comp_others(0.5 * (t0 + t1)) < 0.0) continue;
      for (const auto& gp : g) {
        const double t = t0 + (t1 - t0) * gp.x;
        BoundaryPoint bp;
        bp.xi = (1.0 - t) * a + t * b;
        bp.tan_param = (b - a) * (t1 - t0);
        bp.out_param = outward;
        bp.w = gp.w;
        bp.tag = tag;
        out.boundary.push_back(bp);
      }
    }
  }

  SpanResult process_span(SpanData& sd) const {
    SpanResult out;
    const int n1d = prm.grid_n1d();
    sd.cls = classify_span(patch, sd.r0, sd.r1, sd.s0, sd.s1, n1d - 1);
    out.cls = sd.cls;
    auto span_map = std::make_shared<RectMap>(sd.r0, sd.r1, sd.s0, sd.s1);

    if (sd.cls == SpanClass::inside) {
      emit_interior(*span_map, out);
    } else if (sd.cls == SpanClass::cut) {
      std::vector<int> all(patch.levelsets.size());
      for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
      process_cell(span_map, all, 0, out);
    }

    if (sd.cls != SpanClass::outside) {
      // patch sides
      const double eps = 1e-12 * std::max(1.0, std::abs(patch.umax() - patch.umin()));
      if (std::abs(sd.s0 - patch.vmin()) < eps) emit_edge_rule(sd, 0, kSideVmin, {}, out);
      if (std::abs(sd.r1 - patch.umax()) < eps) emit_edge_rule(sd, 1, kSideUmax, {}, out);
      if (std::abs(sd.s1 - patch.vmax()) < eps) emit_edge_rule(sd, 2, kSideVmax, {}, out);
      if (std::abs(sd.r0 - patch.umin()) < eps) emit_edge_rule(sd, 3, kSideUmin, {}, out);

      // knot-aligned trimming curves: an edge on which some level set vanishes
      // identically and whose far side is invisible
      for (int edge = 0; edge < 4; ++edge) {
        const int k = aligned_curve_on_edge(sd, edge);
        if (k >= 0) emit_edge_rule(sd, edge, k, {k}, out);
      }
    }
    return out;
  }

  int aligned_curve_on_edge(const SpanData& sd, int edge) const {
    Vec2 a, b, outward;
    const Vec2 c0(sd.r0, sd.s0), c1(sd.r1, sd.s0), c2(sd.r1, sd.s1), c3(sd.r0, sd.s1);
    switch (edge) {
      case 0: a = c0; b = c1; outward = Vec2(0, -1); break;
      case 1: a = c1; b = c2; outward = Vec2(1, 0); break;
      case 2: a = c3; b = c2; outward = Vec2(0, 1); break;
      default: a = c0; b = c3; outward = Vec2(-1, 0); break;
    }
    const double h = std::max(sd.r1 - sd.r0, sd.s1 - sd.s0);
    for (size_t k = 0; k < patch.levelsets.size(); ++k) {
      bool zero_on_edge = true;
      for (int i = 0; i <= 8 && zero_on_edge; ++i) {
        const Vec2 xi = (1.0 - i / 8.0) * a + (i / 8.0) * b;
        if (std::abs(patch.levelsets[k]->value(xi.x(), xi.y())) > 1e-10) zero_on_edge = false;
      }
      if (!zero_on_edge) continue;
      // far side must be invisible w.r.t. this curve
      const Vec2 mid = 0.5 * (a + b) + 0.25 * h * outward;
      if (patch.levelsets[k]->value(mid.x(), mid.y()) < 0.0) return static_cast<int>(k);
    }
    return -1;
  }
};

void finalize_boundary(const TrimmedPatch& patch, std::vector<BoundaryPoint>& bps) {
  for (auto& bp : bps) {
    const SurfaceFrame f = surface_frame(*patch.geometry, bp.xi.x(), bp.xi.y());
    Eigen::Matrix<double, 3, 2> J;
    J.col(0) = f.t1;
    J.col(1) = f.t2;
    Vec3 tp = J * bp.tan_param;
    const double stretch = tp.norm();
    if (stretch < 1e-14) throw std::runtime_error("degenerate boundary tangent");
    Triad tr = boundary_triad(f, tp);
    const Vec3 outward = J * bp.out_param;
    if (tr.n_co.dot(outward) < 0.0) {
      tr = boundary_triad(f, -tp);
    }
    bp.x = f.x;
    bp.t_phys = tr.t;
    bp.nco_phys = tr.n_co;
    bp.n_phys = tr.n;
    bp.w_arc = bp.w * stretch;
  }
}

}  // namespace

double IntegrationMesh::visible_area_param() const {
  double a = 0.0;
  for (const auto& s : spans) a += s.visible_area_param;
  return a;
}

double IntegrationMesh::boundary_length_param() const {
  double l = 0.0;
  for (const auto& b : boundary) l += b.w * b.tan_param.norm();
  return l;
}

void IntegrationMesh::dump_csv(std::ostream& os) const {
  os << "span_i,span_j,r,s,weight,tag\n";
  for (const auto& s : spans)
    for (const auto& p : s.pts)
      os << s.iu << ',' << s.iv << ',' << p.xi.x() << ',' << p.xi.y() << ',' << p.w_param
         << ",\n";
  for (const auto& b : boundary)
    os << ",," << b.xi.x() << ',' << b.xi.y() << ',' << b.w_arc << ',' << b.tag << '\n';
}

IntegrationMesh build_integration_mesh(const TrimmedPatch& patch, const CutCellParams& params,
                                       Parallel mode) {
  IntegrationMesh mesh;
  const auto spans_u = patch.basis.ku.nonempty_spans();
  const auto spans_v = patch.basis.kv.nonempty_spans();
  mesh.nspans_u = static_cast<int>(spans_u.size());
  mesh.nspans_v = static_cast<int>(spans_v.size());
  mesh.spans.resize(mesh.nspans_u * mesh.nspans_v);

  for (int jv = 0; jv < mesh.nspans_v; ++jv)
    for (int iu = 0; iu < mesh.nspans_u; ++iu) {
      SpanData& sd = mesh.spans[iu + mesh.nspans_u * jv];
      sd.iu = iu;
      sd.iv = jv;
      sd.span_u = spans_u[iu];
      sd.span_v = spans_v[jv];
      sd.r0 = patch.basis.ku.knots[sd.span_u];
      sd.r1 = patch.basis.ku.knots[sd.span_u + 1];
      sd.s0 = patch.basis.kv.knots[sd.span_v];
      sd.s1 = patch.basis.kv.knots[sd.span_v + 1];
    }

  Builder builder{patch, params};
  const int nspans = static_cast<int>(mesh.spans.size());
  std::vector<SpanResult> results(nspans);
  std::exception_ptr err;

  if (mode == Parallel::openmp) {
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (int s = 0; s < nspans; ++s) {
      try {
        results[s] = builder.process_span(mesh.spans[s]);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
  } else {
    for (int s = 0; s < nspans; ++s) {
      try {
        results[s] = builder.process_span(mesh.spans[s]);
      } catch (...) {
        if (!err) err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);

  // deterministic span-ordered merge
  for (int s = 0; s < nspans; ++s) {
    mesh.spans[s].pts = std::move(results[s].pts);
    mesh.spans[s].visible_area_param = results[s].area;
    for (auto& bp : results[s].boundary) mesh.boundary.push_back(bp);
  }
  finalize_boundary(patch, mesh.boundary);
  return mesh;
}

}  // namespace trimshell
