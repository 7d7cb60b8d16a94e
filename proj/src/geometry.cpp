#include "trimshell/geometry.hpp"

namespace trimshell {

SurfaceFrame surface_frame(const SurfaceGeometry& g, double u, double v) {
  const auto xj = g.jets(u, v, 2);
  SurfaceFrame f;
  f.x = Vec3(xj[0].val(), xj[1].val(), xj[2].val());
  f.t1 = Vec3(xj[0].deriv(1, 0), xj[1].deriv(1, 0), xj[2].deriv(1, 0));
  f.t2 = Vec3(xj[0].deriv(0, 1), xj[1].deriv(0, 1), xj[2].deriv(0, 1));

  const Vec3 cr = f.t1.cross(f.t2);
  f.jac = cr.norm();
  if (f.jac < 1e-14 * f.t1.norm() * f.t2.norm())
    throw std::runtime_error("singular surface parametrization");
  f.normal = cr / f.jac;
  f.P = Mat3::Identity() - f.normal * f.normal.transpose();

  // Weingarten map from jets of the normal field: n = t1 x t2 / |t1 x t2|
  // evaluated in jet arithmetic, then nabla_Gamma n projected and symmetrized.
  std::array<Jet, 3> t1j, t2j;
  for (int d = 0; d < 3; ++d) {
    t1j[d] = xj[d].du();
    t2j[d] = xj[d].dv();
  }
  std::array<Jet, 3> crj;
  crj[0] = t1j[1] * t2j[2] - t1j[2] * t2j[1];
  crj[1] = t1j[2] * t2j[0] - t1j[0] * t2j[2];
  crj[2] = t1j[0] * t2j[1] - t1j[1] * t2j[0];
  Jet norm2 = crj[0] * crj[0] + crj[1] * crj[1] + crj[2] * crj[2];
  const Jet inv_norm = sqrt(norm2).reciprocal();
  std::array<Jet, 3> nj;
  for (int d = 0; d < 3; ++d) nj[d] = crj[d] * inv_norm;

  // dn/dxi (3x2), pseudo-inverse chain through the first fundamental form
  Eigen::Matrix<double, 3, 2> J, dn;
  J.col(0) = f.t1;
  J.col(1) = f.t2;
  for (int d = 0; d < 3; ++d) {
    dn(d, 0) = nj[d].du().val();
    dn(d, 1) = nj[d].dv().val();
  }
  const Eigen::Matrix2d metric = J.transpose() * J;
  const Eigen::Matrix<double, 3, 2> Ji = J * metric.inverse();
  const Mat3 grad_n = dn * Ji.transpose();
  const Mat3 Hp = f.P * grad_n * f.P;
  f.H = 0.5 * (Hp + Hp.transpose());
  return f;
}

Triad boundary_triad(const SurfaceFrame& frame, const Vec3& tangent) {
  Vec3 t = frame.P * tangent;  // project before use
  const double nt = t.norm();
  if (nt < 1e-14) throw std::runtime_error("zero boundary tangent");
  t /= nt;
  Triad tr;
  tr.t = t;
  tr.n = frame.normal;
  tr.n_co = frame.normal.cross(t);
  tr.n_co /= tr.n_co.norm();
  return tr;
}

}  // namespace trimshell
