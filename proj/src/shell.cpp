#include "trimshell/shell.hpp"

namespace trimshell {

namespace {

JetMat3 jet_matmul(const JetMat3& A, const JetMat3& B) {
  JetMat3 C;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Jet acc = A[i][0] * B[0][j];
      acc += A[i][1] * B[1][j];
      acc += A[i][2] * B[2][j];
      C[i][j] = acc;
    }
  return C;
}

JetMat3 jet_sym(const JetMat3& A) {
  JetMat3 S;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) S[i][j] = 0.5 * (A[i][j] + A[j][i]);
  return S;
}

Jet jet_trace(const JetMat3& A) { return A[0][0] + A[1][1] + A[2][2]; }

Mat3 values(const JetMat3& A) {
  Mat3 M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = A[i][j].val();
  return M;
}

}  // namespace

PointFrame make_point_frame(const SurfaceGeometry& g, double u, double v, int order) {
  PointFrame pf;
  pf.order = order;
  pf.xi = Vec2(u, v);
  pf.xj = g.jets(u, v, order);

  std::array<std::array<Jet, 2>, 3> J;
  for (int d = 0; d < 3; ++d) {
    J[d][0] = pf.xj[d].du();
    J[d][1] = pf.xj[d].dv();
  }
  // first fundamental form and its inverse
  Jet m00 = J[0][0] * J[0][0] + J[1][0] * J[1][0] + J[2][0] * J[2][0];
  Jet m01 = J[0][0] * J[0][1] + J[1][0] * J[1][1] + J[2][0] * J[2][1];
  Jet m11 = J[0][1] * J[0][1] + J[1][1] * J[1][1] + J[2][1] * J[2][1];
  const Jet det = m00 * m11 - m01 * m01;
  if (det.val() <= 0.0) throw std::runtime_error("singular metric");
  const Jet idet = det.reciprocal();
  const Jet i00 = m11 * idet, i01 = -1.0 * m01 * idet, i11 = m00 * idet;
  for (int d = 0; d < 3; ++d) {
    pf.Ji[d][0] = J[d][0] * i00 + J[d][1] * i01;
    pf.Ji[d][1] = J[d][0] * i01 + J[d][1] * i11;
  }

  JetVec3 cr;
  cr[0] = J[1][0] * J[2][1] - J[2][0] * J[1][1];
  cr[1] = J[2][0] * J[0][1] - J[0][0] * J[2][1];
  cr[2] = J[0][0] * J[1][1] - J[1][0] * J[0][1];
  const Jet inv_norm = sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]).reciprocal();
  for (int d = 0; d < 3; ++d) pf.n[d] = cr[d] * inv_norm;

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      pf.P[i][j] = -1.0 * pf.n[i] * pf.n[j];
      if (i == j) pf.P[i][j] += 1.0;
    }

  // Weingarten map: projected, symmetrized surface gradient of the normal
  JetMat3 gn;
  for (int i = 0; i < 3; ++i) {
    const Jet d0 = pf.n[i].du(), d1 = pf.n[i].dv();
    for (int j = 0; j < 3; ++j) gn[i][j] = pf.Ji[j][0] * d0 + pf.Ji[j][1] * d1;
  }
  pf.H = jet_sym(jet_matmul(pf.P, jet_matmul(gn, pf.P)));

  pf.vals.x = Vec3(pf.xj[0].val(), pf.xj[1].val(), pf.xj[2].val());
  pf.vals.t1 = Vec3(J[0][0].val(), J[1][0].val(), J[2][0].val());
  pf.vals.t2 = Vec3(J[0][1].val(), J[1][1].val(), J[2][1].val());
  pf.vals.normal = Vec3(pf.n[0].val(), pf.n[1].val(), pf.n[2].val());
  pf.vals.jac = pf.vals.t1.cross(pf.vals.t2).norm();
  pf.vals.P = values(pf.P);
  pf.vals.H = values(pf.H);
  return pf;
}

JetVec3 surface_gradient(const PointFrame& pf, const Jet& f) {
  const Jet d0 = f.du(), d1 = f.dv();
  JetVec3 g;
  for (int i = 0; i < 3; ++i) g[i] = pf.Ji[i][0] * d0 + pf.Ji[i][1] * d1;
  return g;
}

JetMat3 surface_hessian(const PointFrame& pf, const Jet& f) {
  const JetVec3 g = surface_gradient(pf, f);
  JetMat3 h;
  for (int i = 0; i < 3; ++i) {
    const JetVec3 gi = surface_gradient(pf, g[i]);
    for (int j = 0; j < 3; ++j) h[i][j] = gi[j];
  }
  return h;
}

KinematicState kinematics(const PointFrame& pf, const JetVec3& u) {
  KinematicState st;
  for (int i = 0; i < 3; ++i) {
    const JetVec3 gi = surface_gradient(pf, u[i]);
    for (int j = 0; j < 3; ++j) st.G[i][j] = gi[j];
  }
  st.epsM = jet_sym(jet_matmul(pf.P, st.G));

  JetMat3 S;
  for (int k = 0; k < 3; ++k) {
    const JetMat3 hk = surface_hessian(pf, u[k]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const Jet t = pf.n[k] * hk[i][j];
        if (k == 0) {
          S[i][j] = t;
        } else {
          S[i][j] += t;
        }
      }
  }
  st.epsB = jet_matmul(pf.P, jet_matmul(S, pf.P));
  for (auto& row : st.epsB)
    for (auto& e : row) e *= -1.0;
  st.epsB = jet_sym(st.epsB);
  return st;
}

Vec3 difference_vector(const PointFrame& pf, const KinematicState& st) {
  Vec3 w;
  for (int j = 0; j < 3; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += st.G[i][j].val() * pf.n[i].val();
    w[j] = -acc;
  }
  return w;
}

JetMat3 inplane_stress(const ShellMaterial& mat, const JetMat3& eps, const JetMat3& P) {
  const Jet tr = jet_trace(eps);
  JetMat3 s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s[i][j] = 2.0 * mat.mu() * eps[i][j] + mat.lambda() * tr * P[i][j];
  return s;
}

StressResultants stress_resultants(const PointFrame& pf, const KinematicState& st,
                                   const ShellMaterial& mat) {
  StressResultants r;
  const double t = mat.thickness;
  JetMat3 sM = inplane_stress(mat, st.epsM, pf.P);
  JetMat3 sB = inplane_stress(mat, st.epsB, pf.P);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      r.normal_eff[i][j] = t * sM[i][j];
      r.moment[i][j] = (t * t * t / 12.0) * sB[i][j];
    }
  for (int i = 0; i < 3; ++i) {
    Jet acc = surface_gradient(pf, r.moment[i][0])[0];
    acc += surface_gradient(pf, r.moment[i][1])[1];
    acc += surface_gradient(pf, r.moment[i][2])[2];
    r.div_moment[i] = acc;
  }
  Vec3 divm(r.div_moment[0].val(), r.div_moment[1].val(), r.div_moment[2].val());
  r.shear = pf.vals.P * divm;
  r.normal_real = values(r.normal_eff) + pf.vals.H * values(r.moment);
  return r;
}

double bilinear_integrand(const PointFrame& pf, const KinematicState& su,
                          const KinematicState& sv, const ShellMaterial& mat) {
  const double t = mat.thickness;
  const Mat3 eMu = values(su.epsM), eBu = values(su.epsB);
  const Mat3 eMv = values(sv.epsM), eBv = values(sv.epsB);
  const double trMu = eMu.trace(), trBu = eBu.trace();
  const double trMv = eMv.trace(), trBv = eBv.trace();
  const double m = t * (2.0 * mat.mu() * (eMu.array() * eMv.array()).sum() +
                        mat.lambda() * trMu * trMv);
  const double b = (t * t * t / 12.0) * (2.0 * mat.mu() * (eBu.array() * eBv.array()).sum() +
                                         mat.lambda() * trBu * trBv);
  return m + b;
}

double energy_density(const PointFrame& pf, const KinematicState& st,
                      const ShellMaterial& mat) {
  return 0.5 * bilinear_integrand(pf, st, st, mat);
}

Vec3 strong_residual(const PointFrame& pf, const JetVec3& u, const ShellMaterial& mat,
                     const Vec3& load) {
  const KinematicState st = kinematics(pf, u);
  const double t = mat.thickness;
  const JetMat3 sM = inplane_stress(mat, st.epsM, pf.P);
  const JetMat3 sB = inplane_stress(mat, st.epsB, pf.P);
  JetMat3 n_eff, m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      n_eff[i][j] = t * sM[i][j];
      m[i][j] = (t * t * t / 12.0) * sB[i][j];
    }
  // n_real = n_eff + H m,  q = P div m   (kept as jets for the divergences)
  const JetMat3 n_real = [&] {
    JetMat3 r = jet_matmul(pf.H, m);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i][j] += n_eff[i][j];
    return r;
  }();

  JetVec3 divm;
  for (int i = 0; i < 3; ++i) {
    Jet acc = surface_gradient(pf, m[i][0])[0];
    acc += surface_gradient(pf, m[i][1])[1];
    acc += surface_gradient(pf, m[i][2])[2];
    divm[i] = acc;
  }
  JetVec3 q;
  for (int i = 0; i < 3; ++i) {
    Jet acc = pf.P[i][0] * divm[0];
    acc += pf.P[i][1] * divm[1];
    acc += pf.P[i][2] * divm[2];
    q[i] = acc;
  }
  double divq = 0.0;
  for (int i = 0; i < 3; ++i) divq += surface_gradient(pf, q[i])[i].val();

  Vec3 res;
  for (int i = 0; i < 3; ++i) {
    double divn = 0.0;
    for (int j = 0; j < 3; ++j) divn += surface_gradient(pf, n_real[i][j])[j].val();
    double hm = 0.0;
    for (int j = 0; j < 3; ++j) hm += pf.H[i][j].val() * divm[j].val();
    res[i] = divn + pf.n[i].val() * divq + hm + load[i];
  }
  return res;
}

Vec3 kirchhoff_corner_force(const PointFrame& pf, const JetVec3& u, const ShellMaterial& mat,
                            const Triad& side_a, const Triad& side_b) {
  const KinematicState st = kinematics(pf, u);
  const StressResultants r = stress_resultants(pf, st, mat);
  const Mat3 m = values(r.moment);
  // m_{n_co} = (m n_co) . t on each side
  const double mna = side_a.t.dot(m * side_a.n_co);
  const double mnb = side_b.t.dot(m * side_b.n_co);
  return pf.vals.normal * (mnb - mna);
}

JetVec3 field_jets(const TrimmedPatch& patch, const Eigen::VectorXd& coeffs, double u,
                   double v, int order) {
  const LocalBasis lb = eval_local_basis(patch.basis, u, v, order);
  JetVec3 r{Jet(order), Jet(order), Jet(order)};
  for (int l = 0; l < lb.count(); ++l) {
    const int f = lb.global_index(patch.basis, l);
    for (int c = 0; c < 3; ++c) {
      const double cf = coeffs[3 * f + c];
      if (cf != 0.0) r[c] += cf * lb.funcs[l];
    }
  }
  return r;
}

}  // namespace trimshell
