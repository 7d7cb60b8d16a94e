#include "trimshell/assembly.hpp"

#include <cmath>

#include "trimshell/extension.hpp"

namespace trimshell {

namespace {

// per-dof strain data at an interior quadrature point
struct LocalInterior {
  Eigen::MatrixXd Ke;
  Eigen::VectorXd fe;
  std::vector<int> gdof;
};

struct DofScratch {
  // per local function (not per component)
  std::vector<Vec3> grad;        // surface gradient values
  std::vector<Mat3> php;         // P Hess(N) P values, symmetrized
};

LocalInterior integrate_span(const TrimmedPatch& patch, const SpanData& sd,
                             const ShellMaterial& mat, const LoadFn& load, bool with_load) {
  LocalInterior out;
  const int p1 = patch.basis.ku.degree, p2 = patch.basis.kv.degree;
  const int nloc = (p1 + 1) * (p2 + 1);
  const int nd = 3 * nloc;
  out.Ke = Eigen::MatrixXd::Zero(nd, nd);
  out.fe = Eigen::VectorXd::Zero(nd);
  if (sd.pts.empty()) return out;

  out.gdof.resize(nd);
  {
    const LocalBasis lb0 = eval_local_basis(patch.basis, 0.5 * (sd.r0 + sd.r1),
                                            0.5 * (sd.s0 + sd.s1), 0);
    for (int l = 0; l < nloc; ++l) {
      const int f = lb0.global_index(patch.basis, l);
      for (int c = 0; c < 3; ++c) out.gdof[3 * l + c] = DofMap::index(f, c);
    }
  }

  const double t = mat.thickness;
  const double cM = t, cB = t * t * t / 12.0;
  const double mu2 = 2.0 * mat.mu(), lam = mat.lambda();

  DofScratch scr;
  scr.grad.resize(nloc);
  scr.php.resize(nloc);
  std::vector<Eigen::Matrix<double, 6, 1>> eM(nd), eB(nd);  // Voigt: 11,22,33,12,13,23
  std::vector<double> trM(nd), trB(nd);

  auto to_voigt = [](const Mat3& m) {
    Eigen::Matrix<double, 6, 1> v;
    v << m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(0, 2), m(1, 2);
    return v;
  };
  // Frobenius contraction weights for symmetric tensors in Voigt form
  const Eigen::Matrix<double, 6, 1> vw = (Eigen::Matrix<double, 6, 1>() << 1, 1, 1, 2, 2, 2).finished();

  for (const auto& qp : sd.pts) {
    const PointFrame pf = make_point_frame(*patch.geometry, qp.xi.x(), qp.xi.y(), 2);
    const LocalBasis lb = eval_local_basis(patch.basis, qp.xi.x(), qp.xi.y(), 2);
    const double w = qp.w_param * pf.vals.jac;
    const Mat3& P = pf.vals.P;
    const Vec3& n = pf.vals.normal;

    for (int l = 0; l < nloc; ++l) {
      const JetVec3 g = surface_gradient(pf, lb.funcs[l]);
      scr.grad[l] = Vec3(g[0].val(), g[1].val(), g[2].val());
      Mat3 hs;
      for (int i = 0; i < 3; ++i) {
        const JetVec3 gi = surface_gradient(pf, g[i]);
        for (int j = 0; j < 3; ++j) hs(i, j) = gi[j].val();
      }
      const Mat3 php = P * hs * P;
      scr.php[l] = 0.5 * (php + php.transpose());
    }

    for (int l = 0; l < nloc; ++l)
      for (int c = 0; c < 3; ++c) {
        const int a = 3 * l + c;
        const Vec3 pe = P.col(c);
        const Mat3 em = 0.5 * (pe * scr.grad[l].transpose() + scr.grad[l] * pe.transpose());
        const Mat3 eb = -n[c] * scr.php[l];
        eM[a] = to_voigt(em);
        eB[a] = to_voigt(eb);
        trM[a] = em.trace();
        trB[a] = eb.trace();
      }

    for (int a = 0; a < nd; ++a) {
      const Eigen::Matrix<double, 6, 1> wa_m = vw.cwiseProduct(eM[a]);
      const Eigen::Matrix<double, 6, 1> wa_b = vw.cwiseProduct(eB[a]);
      for (int b = a; b < nd; ++b) {
        const double dm = cM * (mu2 * wa_m.dot(eM[b]) + lam * trM[a] * trM[b]);
        const double db = cB * (mu2 * wa_b.dot(eB[b]) + lam * trB[a] * trB[b]);
        const double k = w * (dm + db);
        out.Ke(a, b) += k;
        if (b != a) out.Ke(b, a) += k;
      }
    }

    if (with_load && load) {
      const Vec3 fv = load(qp.xi, pf.vals.x, pf.vals);
      const LocalBasis& lbv = lb;
      for (int l = 0; l < nloc; ++l) {
        const double N = lbv.funcs[l].val();
        for (int c = 0; c < 3; ++c) out.fe[3 * l + c] += w * N * fv[c];
      }
    }
  }
  return out;
}

// per-dof boundary quantities at one boundary quadrature point
struct BoundaryLocal {
  Eigen::MatrixXd Ke;
  Eigen::VectorXd fe;
  std::vector<int> gdof;
};

BoundaryLocal integrate_boundary_point(const TrimmedPatch& patch, const BoundaryPoint& bp,
                                       const ShellMaterial& mat, const BoundaryCondition& bc) {
  BoundaryLocal out;
  const int p1 = patch.basis.ku.degree, p2 = patch.basis.kv.degree;
  const int nloc = (p1 + 1) * (p2 + 1);
  const int nd = 3 * nloc;
  out.Ke = Eigen::MatrixXd::Zero(nd, nd);
  out.fe = Eigen::VectorXd::Zero(nd);
  out.gdof.resize(nd);

  const PointFrame pf = make_point_frame(*patch.geometry, bp.xi.x(), bp.xi.y(), 3);
  const LocalBasis lb = eval_local_basis(patch.basis, bp.xi.x(), bp.xi.y(), 3);
  for (int l = 0; l < nloc; ++l) {
    const int f = lb.global_index(patch.basis, l);
    for (int c = 0; c < 3; ++c) out.gdof[3 * l + c] = DofMap::index(f, c);
  }

  Triad tr{bp.t_phys, bp.nco_phys, bp.n_phys};
  const Mat3& P = pf.vals.P;
  const Vec3& n = pf.vals.normal;
  const double w = bp.w_arc;
  const double cB = mat.thickness * mat.thickness * mat.thickness / 12.0;
  const double mu2 = 2.0 * mat.mu(), lam = mat.lambda();

  // displacement constraint projector
  Mat3 Pi = Mat3::Zero();
  double sigma_n = 0.0;
  if (bc.dirichlet_u) {
    if (bc.full_u) {
      Pi = Mat3::Identity();
      sigma_n = 1.0;
    } else {
      for (const auto& d : bc.dirs) Pi += d * d.transpose();
      const Vec3 pn = Pi * tr.n;
      if ((pn - tr.n).norm() < 1e-8) {
        sigma_n = 1.0;
      } else if (pn.norm() < 1e-8) {
        sigma_n = 0.0;
      } else {
        throw std::runtime_error(
            "slip constraint partially contains the surface normal; unsupported");
      }
    }
  }

  // per-dof data
  std::vector<double> Nval(nloc);
  std::vector<Vec3> grad(nloc);
  std::vector<Vec3> pvec(nd);
  std::vector<double> om_nco(nd), om_t(nd), m_nco(nd), m_t(nd);

  for (int l = 0; l < nloc; ++l) {
    Nval[l] = lb.funcs[l].val();
    const JetVec3 g = surface_gradient(pf, lb.funcs[l]);
    grad[l] = Vec3(g[0].val(), g[1].val(), g[2].val());

    // P Hess P as jets (order 1) for the moment divergence
    JetMat3 hs;
    for (int i = 0; i < 3; ++i) {
      const JetVec3 gi = surface_gradient(pf, g[i]);
      for (int j = 0; j < 3; ++j) hs[i][j] = gi[j];
    }
    JetMat3 T;  // P hs P
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Jet acc(hs[0][0].order());
        for (int a2 = 0; a2 < 3; ++a2)
          for (int b2 = 0; b2 < 3; ++b2) acc += pf.P[i][a2] * hs[a2][b2] * pf.P[b2][j];
        T[i][j] = acc;
      }

    for (int c = 0; c < 3; ++c) {
      const int a = 3 * l + c;
      // w = -(grad u)^T n = -n_c grad(N); rotations are its triad components
      const Vec3 wv = -n[c] * grad[l];
      om_nco[a] = wv.dot(tr.t);
      om_t[a] = wv.dot(tr.n_co);

      // bending strain jets eps_B = -n_c T, moment jets, divergence values
      JetMat3 m;
      Jet trB(T[0][0].order());
      for (int i = 0; i < 3; ++i) trB += T[i][i];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          Jet e = -1.0 * pf.n[c] * T[i][j];
          Jet tb = -1.0 * pf.n[c] * trB;
          m[i][j] = cB * (mu2 * e + lam * tb * pf.P[i][j]);
        }
      Vec3 divm;
      for (int i = 0; i < 3; ++i) {
        double acc = 0.0;
        acc += surface_gradient(pf, m[i][0])[0].val();
        acc += surface_gradient(pf, m[i][1])[1].val();
        acc += surface_gradient(pf, m[i][2])[2].val();
        divm[i] = acc;
      }
      const Vec3 q = P * divm;
      Mat3 mval;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mval(i, j) = m[i][j].val();

      // membrane part and physical normal force
      const Vec3 pe = P.col(c);
      const Mat3 em = 0.5 * (pe * grad[l].transpose() + grad[l] * pe.transpose());
      const Mat3 neff = mat.thickness * (mu2 * em + lam * em.trace() * P);
      const Mat3 nreal = neff + pf.vals.H * mval;

      pvec[a] = nreal * tr.n_co + (q.dot(tr.n_co)) * tr.n;
      m_nco[a] = tr.t.dot(mval * tr.n_co);
      m_t[a] = tr.n_co.dot(mval * tr.n_co);
    }
  }

  // LHS couplings
  for (int b = 0; b < nd; ++b) {
    const int cb = b % 3;
    const double Nb = Nval[b / 3];
    for (int a = 0; a < nd; ++a) {
      const int ca = a % 3;
      const double Na = Nval[a / 3];
      double k = 0.0;
      if (bc.dirichlet_u) {
        const double v_dot_pa = Nb * (Pi * pvec[a])[cb];
        const double u_dot_pb = Na * (Pi * pvec[b])[ca];
        k += -(sigma_n * om_nco[b] * m_nco[a] + v_dot_pa);
        k += +(sigma_n * om_nco[a] * m_nco[b] + u_dot_pb);
      }
      if (bc.dirichlet_rot) k += -om_t[b] * m_t[a] + om_t[a] * m_t[b];
      if (k != 0.0) out.Ke(b, a) += w * k;
    }
  }

  // RHS data
  BoundaryPointContext ctx{bp.xi, bp.x, tr};
  Vec3 g_u = Vec3::Zero();
  if (bc.g_u) g_u = bc.g_u(ctx);
  const double om_data = bc.omega_n_data ? bc.omega_n_data(ctx) : 0.0;
  const double g_om = bc.g_omega ? bc.g_omega(ctx) : 0.0;
  const Vec3 g_proj = bc.dirichlet_u ? Vec3(Pi * g_u) : Vec3(Vec3::Zero());

  for (int b = 0; b < nd; ++b) {
    double rhs = 0.0;
    if (bc.dirichlet_u) rhs += g_proj.dot(pvec[b]) + sigma_n * om_data * m_nco[b];
    if (bc.dirichlet_rot) rhs += g_om * m_t[b];
    if (!bc.dirichlet_u && bc.traction) rhs += Nval[b / 3] * bc.traction(ctx)[b % 3];
    if (!bc.dirichlet_rot && bc.moment) rhs += om_t[b] * bc.moment(ctx);
    if (rhs != 0.0) out.fe(b) += w * rhs;
  }
  return out;
}

}  // namespace

LinearSystem assemble(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                      const ShellMaterial& mat, const BoundaryConditions& bcs,
                      const LoadFn& load, Parallel mode, const AssemblyOptions& opts) {
  LinearSystem sys;
  const int n = 3 * (opts.func_remap ? opts.n_remapped : patch.basis.num_funcs());
  sys.K = Eigen::MatrixXd::Zero(n, n);
  sys.f = Eigen::VectorXd::Zero(n);
  auto map_dof = [&](int dof) {
    if (!opts.func_remap) return dof;
    const int f = dof / 3, c = dof % 3;
    const int fr = (*opts.func_remap)[f];
    return fr < 0 ? -1 : 3 * fr + c;
  };

  const int nspans = static_cast<int>(mesh.spans.size());
  const int block = std::max(1, 4 * worker_count());
  std::exception_ptr err;

  for (int start = 0; start < nspans; start += block) {
    const int end = std::min(nspans, start + block);
    std::vector<LocalInterior> locals(end - start);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count()) if (mode == Parallel::openmp)
    for (int s = start; s < end; ++s) {
      try {
        locals[s - start] =
            integrate_span(patch, mesh.spans[s], mat, load, !opts.stiffness_only);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    for (auto& le : locals) {
      if (le.gdof.empty()) continue;
      const int nd = static_cast<int>(le.gdof.size());
      for (int b = 0; b < nd; ++b) {
        const int gb = map_dof(le.gdof[b]);
        if (gb < 0) continue;
        sys.f[gb] += le.fe[b];
        for (int a = 0; a < nd; ++a) {
          const int ga = map_dof(le.gdof[a]);
          if (ga >= 0) sys.K(gb, ga) += le.Ke(b, a);
        }
      }
    }
  }

  if (opts.stiffness_only || !opts.nitsche) return sys;

  const int nb = static_cast<int>(mesh.boundary.size());
  for (int start = 0; start < nb; start += 16 * block) {
    const int end = std::min(nb, start + 16 * block);
    std::vector<BoundaryLocal> locals(end - start);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count()) if (mode == Parallel::openmp)
    for (int s = start; s < end; ++s) {
      try {
        const auto it = bcs.find(mesh.boundary[s].tag);
        if (it == bcs.end()) throw std::runtime_error("unresolved boundary tag " +
                                                      std::to_string(mesh.boundary[s].tag));
        locals[s - start] = integrate_boundary_point(patch, mesh.boundary[s], mat, it->second);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    for (auto& le : locals) {
      if (le.gdof.empty()) continue;
      const int nd = static_cast<int>(le.gdof.size());
      for (int b = 0; b < nd; ++b) {
        const int gb = map_dof(le.gdof[b]);
        if (gb < 0) continue;
        sys.f[gb] += le.fe[b];
        for (int a = 0; a < nd; ++a) {
          const int ga = map_dof(le.gdof[a]);
          if (ga >= 0) sys.K(gb, ga) += le.Ke(b, a);
        }
      }
    }
  }
  return sys;
}

SolveReport stabilize_and_solve(const LinearSystem& sys, const Eigen::SparseMatrix<double>& E,
                                bool with_condition) {
  if (E.rows() * 3 != sys.dim())
    throw std::invalid_argument("extension matrix does not match system dimension");
  const Eigen::SparseMatrix<double> E3 = expand_for_components(E, 3);

  const Eigen::MatrixXd KE = sys.K * E3;
  const Eigen::MatrixXd Kst = E3.transpose() * KE;
  const Eigen::VectorXd fst = E3.transpose() * sys.f;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Kst);
  // PartialPivLU has no rank query; detect singularity from the factors
  const double dmin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  const double dmax = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
  if (!(dmin > 0.0) || !(dmax > 0.0))
    throw std::runtime_error("singular stabilized system");

  SolveReport rep;
  rep.u_stable = lu.solve(fst);
  rep.u = E3 * rep.u_stable;
  const double fn = fst.norm();
  rep.residual = fn > 0.0 ? (Kst * rep.u_stable - fst).norm() / fn
                          : (Kst * rep.u_stable).norm();
  if (with_condition) rep.cond_estimate = estimate_condition(lu, Kst.cwiseAbs().colwise().sum().maxCoeff());
  return rep;
}

namespace {

// solve A^T x = b from the factors of PA = LU:  A^T = U^T L^T P
Eigen::VectorXd transpose_solve(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                                const Eigen::VectorXd& b) {
  const auto& LU = lu.matrixLU();
  Eigen::VectorXd y = LU.transpose().triangularView<Eigen::Lower>().solve(b);
  // L^T is unit upper triangular
  Eigen::VectorXd z = LU.transpose().triangularView<Eigen::UnitUpper>().solve(y);
  return lu.permutationP().transpose() * z;
}

}  // namespace

double estimate_condition(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, double anorm) {
  const int n = static_cast<int>(lu.rows());
  if (n == 0) return 0.0;
  const double dmin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (dmin == 0.0) return std::numeric_limits<double>::infinity();

  // Hager's 1-norm estimator for ||A^{-1}||_1
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  double est = 0.0;
  for (int iter = 0; iter < 8; ++iter) {
    const Eigen::VectorXd y = lu.solve(x);
    est = y.lpNorm<1>();
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
    const Eigen::VectorXd z = transpose_solve(lu, xi);
    int jmax = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&jmax);
    if (zmax <= z.dot(x)) break;
    x.setZero();
    x[jmax] = 1.0;
  }
  // alternating lower bound safeguard (Higham's second estimate)
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = ((i % 2 == 0) ? 1.0 : -1.0) * (1.0 + static_cast<double>(i) / std::max(1, n - 1));
  const double alt = 2.0 * lu.solve(v).lpNorm<1>() / (3.0 * n);
  return anorm * std::max(est, alt);
}

double estimate_condition(const Eigen::MatrixXd& K) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  return estimate_condition(lu, K.cwiseAbs().colwise().sum().maxCoeff());
}

}  // namespace trimshell
