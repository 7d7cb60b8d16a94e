#pragma once

#include <iosfwd>

#include "trimshell/cutcells.hpp"
#include "trimshell/trimming.hpp"

namespace trimshell {

enum class Parallel { serial, openmp };

// Worker cap: min(omp_get_max_threads(), TRIMSHELL_THREADS if set).
int worker_count();

struct CutCellParams {
  int lagrange_order = 3;  // matches the basis degree
  int grid_q = 3;          // sample grid refinement, n1d = p(q+1)+1
  int gauss = 4;           // points per direction (default p+1)
  int max_depth = 4;       // quad-tree refinement limit
  double newton_tol = 1e-11;

  int grid_n1d() const { return lagrange_order * (grid_q + 1) + 1; }
};

// Boundary tags: trimming curves use their index (>= 0); the four patch sides
// use the reserved negative values below.
constexpr int kSideUmin = -1;
constexpr int kSideUmax = -2;
constexpr int kSideVmin = -3;
constexpr int kSideVmax = -4;

struct InteriorPoint {
  Vec2 xi;
  double w_param;  // weight including all Jacobians up to parameter space
};

struct BoundaryPoint {
  Vec2 xi;
  Vec2 tan_param;  // d(xi)/dt of the curve parametrization (unit t-interval)
  Vec2 out_param;  // outward direction in parameter space (unnormalized)
  double w;        // Gauss weight on the unit t-interval
  int tag = 0;

  // filled by the finalize pass
  Vec3 x;
  Vec3 t_phys, nco_phys, n_phys;  // boundary triad
  double w_arc = 0.0;             // physical arc-length weight
};

struct SpanData {
  int iu = 0, iv = 0;          // span grid coordinates
  int span_u = 0, span_v = 0;  // knot-vector span indices
  double r0 = 0, r1 = 0, s0 = 0, s1 = 0;
  SpanClass cls = SpanClass::outside;
  std::vector<InteriorPoint> pts;
  double visible_area_param = 0.0;
};

struct IntegrationMesh {
  int nspans_u = 0, nspans_v = 0;
  std::vector<SpanData> spans;  // row-major, iu + nspans_u * iv
  std::vector<BoundaryPoint> boundary;

  const SpanData& span(int iu, int iv) const { return spans[iu + nspans_u * iv]; }
  double visible_area_param() const;
  double boundary_length_param() const;

  // CSV: span_i, span_j, r, s, weight, tag (tag is empty for interior points)
  void dump_csv(std::ostream& os) const;
};

IntegrationMesh build_integration_mesh(const TrimmedPatch& patch, const CutCellParams& params,
                                       Parallel mode = Parallel::openmp);

}  // namespace trimshell
