#include "trimshell/benchmarks.hpp"

#include <cmath>

namespace trimshell {

namespace {

KnotVector refined_clamped(int degree, int nspans, double a, double b) {
  return KnotVector::clamped_uniform(degree, nspans, a, b);
}

// degree-elevate a single-segment homogeneous curve and insert uniform knots
HomoCurve elevate_and_refine(HomoCurve c, int target_degree, int nspans) {
  while (c.kv.degree < target_degree) c = elevate_bezier_once(c);
  const double a = c.kv.umin(), b = c.kv.umax();
  for (int k = 1; k < nspans; ++k) c = insert_knot(c, a + (b - a) * k / nspans);
  return c;
}

}  // namespace

BenchmarkDefinition benchmark_scordelis() {
  BenchmarkDefinition def;
  def.name = "scordelis_lo";
  const double R = 25.0, L = 50.0;
  const double sweep = 80.0 * M_PI / 180.0;

  def.make_patch = [=](int n, int p) {
    HomoCurve arc = elevate_and_refine(circular_arc_xz(R, sweep, 0.0, 2.0), p, n);
    HomoCurve line;
    line.kv = KnotVector({0.0, 0.0, 2.0, 2.0}, 1);
    line.hpts = {Eigen::Vector4d(0, 0, 0, 1), Eigen::Vector4d(0, L, 0, 1)};
    line = elevate_and_refine(line, p, n);

    TensorBasis tb;
    tb.ku = arc.kv;
    tb.kv = line.kv;
    const int nu = tb.num_u(), nv = tb.num_v();
    tb.weights.resize(nu * nv);
    ControlNet net;
    net.points.resize(nu * nv);
    for (int j = 0; j < nv; ++j) {
      const Eigen::Vector4d lp = line.hpts[j];
      const Vec3 lpt = lp.head<3>() / lp.w();
      for (int i = 0; i < nu; ++i) {
        const Eigen::Vector4d ap = arc.hpts[i];
        const double w = ap.w() * lp.w();
        const Vec3 apt = ap.head<3>() / ap.w();
        tb.weights[tb.index(i, j)] = w;
        net.points[tb.index(i, j)] = Vec3(apt.x(), lpt.y(), apt.z());
      }
    }
    TrimmedPatch patch;
    patch.basis = tb;
    patch.geometry = std::make_shared<SplineGeometry>(tb, net);
    patch.levelsets = {halfplane_levelset(-1.0, 0.0, 1.0),   // 1 - r
                       halfplane_levelset(0.0, -1.0, 1.0)};  // 1 - s
    return patch;
  };

  def.material = ShellMaterial(4.32e8, 0.0, 0.25);
  def.load = [](const Vec2&, const Vec3&, const SurfaceFrame&) { return Vec3(0, 0, -90.0); };
  def.boundary_conditions = [](int, int) {
    BoundaryConditions bcs;
    bcs[0] = BoundaryCondition::symmetry(Vec3(1, 0, 0));  // crown plane x = 0
    bcs[1] = BoundaryCondition::symmetry(Vec3(0, 1, 0));  // midspan plane y = L/2
    bcs[kSideVmin] = BoundaryCondition::slip({Vec3(1, 0, 0), Vec3(0, 0, 1)});  // diaphragm
    bcs[kSideUmin] = BoundaryCondition::free_edge();
    bcs[kSideUmax] = BoundaryCondition::free_edge();
    bcs[kSideVmax] = BoundaryCondition::free_edge();
    return bcs;
  };
  def.sample_xi = Vec2(0.0, 1.0);  // free edge at midspan
  def.sample_component = 2;
  def.reference_point_value = 0.3006;
  def.default_n = {6, 10, 20, 40};
  def.default_p = {3, 4, 5, 6};
  def.default_alpha = 0.6;
  return def;
}

namespace {

struct FlatShellFrame {
  Vec3 a1, a2, n;
};

FlatShellFrame flat_shell_frame() {
  FlatShellFrame f;
  f.n = Vec3(-0.25, -std::sqrt(3.0) / 2.0, std::sqrt(3.0) / 4.0);
  f.n.normalize();
  f.a1 = (Vec3(1, 0, 0) - Vec3(1, 0, 0).dot(f.n) * f.n).normalized();
  f.a2 = f.n.cross(f.a1);
  return f;
}

// manufactured displacement: tangential and normal sine modes on the visible
// unit square, all vanishing on its edges together with the edge bending
// moment (hard simple support)
constexpr double kFlatA1 = 0.1;
constexpr double kFlatA2 = -0.08;
constexpr double kFlatAn = 0.25;

}  // namespace

JetFieldFn flat_shell_exact_field() {
  const FlatShellFrame fr = flat_shell_frame();
  return [fr](const Jet& r, const Jet& s) {
    const Jet m21 = sin(2.0 * M_PI * r) * sin(M_PI * s);
    const Jet m12 = sin(M_PI * r) * sin(2.0 * M_PI * s);
    const Jet m22 = sin(2.0 * M_PI * r) * sin(2.0 * M_PI * s);
    JetVec3 u;
    for (int d = 0; d < 3; ++d)
      u[d] = kFlatA1 * fr.a1[d] * m21 + kFlatA2 * fr.a2[d] * m12 + kFlatAn * fr.n[d] * m22;
    return u;
  };
}

BenchmarkDefinition benchmark_flat_shell() {
  BenchmarkDefinition def;
  def.name = "flat_shell";
  const FlatShellFrame fr = flat_shell_frame();
  const double r0 = 0.234 - 2.0 / 3.0;
  const double s0 = 0.123 - 2.0 / 3.0;

  auto geometry = std::make_shared<AnalyticGeometry>([fr](const Jet& r, const Jet& s) {
    JetVec3 x;
    for (int d = 0; d < 3; ++d) x[d] = fr.a1[d] * r + fr.a2[d] * s;
    return x;
  });

  def.make_patch = [=](int n, int p) {
    // n counts the elements across the visible unit square (h = 1/n); the
    // parameter window is twice as long, so the patch carries 2n spans
    TrimmedPatch patch;
    patch.basis.ku = refined_clamped(p, 2 * n, r0, r0 + 2.0);
    patch.basis.kv = refined_clamped(p, 2 * n, s0, s0 + 2.0);
    patch.geometry = geometry;
    patch.levelsets = {halfplane_levelset(0.0, 1.0, 0.0),    // s
                       halfplane_levelset(-1.0, 0.0, 1.0),   // 1 - r
                       halfplane_levelset(1.0, 0.0, 0.0),    // r
                       halfplane_levelset(0.0, -1.0, 1.0)};  // 1 - s
    return patch;
  };

  def.material = ShellMaterial(1.0e4, 0.3, 0.01);
  def.exact_field = flat_shell_exact_field();

  // load = -(strong-form operator)(u_exact), evaluated in jet arithmetic
  const ShellMaterial mat = def.material;
  const JetFieldFn exact = def.exact_field;
  auto geo = geometry;
  def.load = [mat, exact, geo](const Vec2& xi, const Vec3&, const SurfaceFrame&) {
    const PointFrame pf = make_point_frame(*geo, xi.x(), xi.y(), 4);
    const JetVec3 ue = exact(Jet::var_u(xi.x(), 4), Jet::var_v(xi.y(), 4));
    return Vec3(-strong_residual(pf, ue, mat, Vec3::Zero()));
  };

  def.boundary_conditions = [](int, int) {
    BoundaryConditions bcs;
    for (int k = 0; k < 4; ++k) bcs[k] = BoundaryCondition::simple_support();
    for (int k : {kSideUmin, kSideUmax, kSideVmin, kSideVmax})
      bcs[k] = BoundaryCondition::free_edge();
    return bcs;
  };
  def.default_n = {4, 8, 16, 32, 64};
  def.default_p = {3, 4, 5, 6};
  def.default_alpha = 0.4;
  return def;
}

BenchmarkDefinition benchmark_circular() {
  BenchmarkDefinition def;
  def.name = "circular";

  auto geometry = std::make_shared<AnalyticGeometry>([](const Jet& r, const Jet& s) {
    JetVec3 p;
    const Jet x = 2.0 + r - 2.0 * s - 0.2 * r * s + 0.75 * sin(2.0 * r + 0.3);
    const Jet y = 1.0 + r + s + 0.5 * r * s + 0.5 * cos(r + 1.5 * s);
    const Jet xm2 = x - 2.0;
    const Jet z = -0.3 + 0.5 * r * r + 0.75 * s + sin(r * s) + 0.2 * xm2 * xm2;
    p[0] = x;
    p[1] = y;
    p[2] = z;
    return p;
  });

  def.make_patch = [=](int n, int p) {
    TrimmedPatch patch;
    patch.basis.ku = refined_clamped(p, n, -0.875, 0.875);
    patch.basis.kv = refined_clamped(p, n, -0.875, 0.875);
    patch.geometry = geometry;
    patch.levelsets = {disk_levelset(Vec2(0, 0), 0.7123)};
    return patch;
  };

  def.material = ShellMaterial(1.0e4, 0.3, 0.1);
  def.load = [](const Vec2&, const Vec3&, const SurfaceFrame&) { return Vec3(0, 0, -100.0); };
  def.boundary_conditions = [](int, int) {
    BoundaryConditions bcs;
    bcs[0] = BoundaryCondition::clamped(
        [](const BoundaryPointContext& c) { return Vec3(-0.1 * c.triad.n); }, nullptr);
    return bcs;
  };
  def.reference_energy = 58.5719;
  def.default_n = {4, 8, 16, 32};
  def.default_p = {3, 4, 5, 6};
  def.default_alpha = 0.4;
  return def;
}

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names{"scordelis_lo", "flat_shell", "circular"};
  return names;
}

BenchmarkDefinition benchmark_by_name(const std::string& name) {
  if (name == "scordelis_lo") return benchmark_scordelis();
  if (name == "flat_shell") return benchmark_flat_shell();
  if (name == "circular") return benchmark_circular();
  throw std::invalid_argument("unknown benchmark '" + name + "'");
}

}  // namespace trimshell
