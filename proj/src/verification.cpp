#include "trimshell/verification.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace trimshell {

namespace {

template <typename F>
double integrate(const IntegrationMesh& mesh, const TrimmedPatch& patch, int order, F&& f) {
  double acc = 0.0;
  for (const auto& sd : mesh.spans)
    for (const auto& qp : sd.pts) {
      const PointFrame pf = make_point_frame(*patch.geometry, qp.xi.x(), qp.xi.y(), order);
      acc += qp.w_param * pf.vals.jac * f(pf, qp.xi);
    }
  return acc;
}

Vec3 field_value(const JetVec3& u) { return Vec3(u[0].val(), u[1].val(), u[2].val()); }

}  // namespace

L2Error l2_error(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                 const Eigen::VectorXd& coeffs, const JetFieldFn& exact) {
  double num = 0.0, den = 0.0;
  for (const auto& sd : mesh.spans)
    for (const auto& qp : sd.pts) {
      const PointFrame pf = make_point_frame(*patch.geometry, qp.xi.x(), qp.xi.y(), 2);
      const double w = qp.w_param * pf.vals.jac;
      const Vec3 uh = field_value(field_jets(patch, coeffs, qp.xi.x(), qp.xi.y(), 0));
      const Vec3 ue = field_value(exact(Jet::var_u(qp.xi.x(), 0), Jet::var_v(qp.xi.y(), 0)));
      num += w * (uh - ue).squaredNorm();
      den += w * ue.squaredNorm();
    }
  L2Error e;
  if (den > 0.0) {
    e.value = std::sqrt(num / den);
  } else {
    e.value = std::sqrt(num);
    e.absolute_fallback = true;
  }
  return e;
}

ResultantErrors resultant_l2_errors(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                                    const Eigen::VectorXd& coeffs, const JetFieldFn& exact,
                                    const ShellMaterial& mat) {
  double num_n = 0.0, den_n = 0.0, num_m = 0.0, den_m = 0.0;
  for (const auto& sd : mesh.spans)
    for (const auto& qp : sd.pts) {
      const PointFrame pf = make_point_frame(*patch.geometry, qp.xi.x(), qp.xi.y(), 3);
      const double w = qp.w_param * pf.vals.jac;
      const JetVec3 uh = field_jets(patch, coeffs, qp.xi.x(), qp.xi.y(), 3);
      const JetVec3 ue = exact(Jet::var_u(qp.xi.x(), 3), Jet::var_v(qp.xi.y(), 3));
      const StressResultants rh = stress_resultants(pf, kinematics(pf, uh), mat);
      const StressResultants re = stress_resultants(pf, kinematics(pf, ue), mat);
      Mat3 dm, me;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          dm(i, j) = rh.moment[i][j].val() - re.moment[i][j].val();
          me(i, j) = re.moment[i][j].val();
        }
      num_n += w * (rh.normal_real - re.normal_real).squaredNorm();
      den_n += w * re.normal_real.squaredNorm();
      num_m += w * dm.squaredNorm();
      den_m += w * me.squaredNorm();
    }
  ResultantErrors e;
  e.normal_force = den_n > 0.0 ? std::sqrt(num_n / den_n) : std::sqrt(num_n);
  e.moment = den_m > 0.0 ? std::sqrt(num_m / den_m) : std::sqrt(num_m);
  return e;
}

ResidualError residual_error(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                             const Eigen::VectorXd& coeffs, const ShellMaterial& mat,
                             const LoadFn& load) {
  double num = 0.0, den = 0.0;
  for (const auto& sd : mesh.spans)
    for (const auto& qp : sd.pts) {
      const PointFrame pf = make_point_frame(*patch.geometry, qp.xi.x(), qp.xi.y(), 4);
      const double w = qp.w_param * pf.vals.jac;
      const Vec3 f = load ? load(qp.xi, pf.vals.x, pf.vals) : Vec3::Zero();
      const JetVec3 uh = field_jets(patch, coeffs, qp.xi.x(), qp.xi.y(), 4);
      const Vec3 res = strong_residual(pf, uh, mat, f);
      num += w * res.squaredNorm();
      den += w * f.squaredNorm();
    }
  ResidualError e;
  if (den > 0.0) {
    e.value = std::sqrt(num / den);
  } else if (num == 0.0) {
    e.degenerate = true;
    e.value = 0.0;
  } else {
    e.degenerate = true;
    e.value = std::sqrt(num);
  }
  return e;
}

double stored_energy(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                     const Eigen::VectorXd& coeffs, const ShellMaterial& mat) {
  return integrate(mesh, patch, 2, [&](const PointFrame& pf, const Vec2& xi) {
    const JetVec3 u = field_jets(patch, coeffs, xi.x(), xi.y(), 2);
    return energy_density(pf, kinematics(pf, u), mat);
  });
}

double stored_energy_field(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                           const JetFieldFn& field, const ShellMaterial& mat) {
  return integrate(mesh, patch, 2, [&](const PointFrame& pf, const Vec2& xi) {
    const JetVec3 u = field(Jet::var_u(xi.x(), 2), Jet::var_v(xi.y(), 2));
    return energy_density(pf, kinematics(pf, u), mat);
  });
}

double fit_rate(const std::vector<std::pair<double, double>>& h_and_error) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [h, e] : h_and_error) {
    if (e > 0.0 && h > 0.0) pts.emplace_back(std::log(h), std::log(e));
  }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double StudyResult::rate(int p, double ErrorReport::*member) const {
  std::vector<std::pair<double, double>> pts;
  for (const auto& c : cells) {
    if (c.p != p || c.failed) continue;
    const double e = c.*member;
    if (std::isfinite(e)) pts.emplace_back(1.0 / c.n, e);
  }
  return fit_rate(pts);
}

ErrorReport run_cell(const BenchmarkDefinition& bench, int n, int p, double alpha,
                     const StudyParams& params) {
  ErrorReport rep;
  rep.benchmark = bench.name;
  rep.n = n;
  rep.p = p;
  rep.alpha = alpha;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    TrimmedPatch patch = bench.make_patch(n, p);
    CutCellParams cc;
    cc.lagrange_order = p;
    cc.grid_q = params.grid_q;
    cc.gauss = p + params.gauss_offset;
    const IntegrationMesh mesh = build_integration_mesh(patch, cc, params.mode);
    const BasisClassification cls = classify_with_donor_guarantee(patch, mesh, alpha);
    const Eigen::SparseMatrix<double> E = build_extension_matrix(patch, mesh, cls);

    // compress away exterior functions (their rows of K and E vanish)
    const int nf = cls.num_funcs();
    std::vector<int> remap(nf, -1);
    int n_active = 0;
    for (int f = 0; f < nf; ++f)
      if (cls.cls[f] != FuncClass::exterior) remap[f] = n_active++;
    Eigen::SparseMatrix<double> Ec(n_active, cls.n_stable);
    {
      std::vector<Eigen::Triplet<double>> trip;
      for (int k = 0; k < E.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(E, k); it; ++it)
          if (remap[it.row()] >= 0) trip.emplace_back(remap[it.row()], it.col(), it.value());
      Ec.setFromTriplets(trip.begin(), trip.end());
    }

    const BoundaryConditions bcs = bench.boundary_conditions(n, p);
    AssemblyOptions opts;
    opts.func_remap = &remap;
    opts.n_remapped = n_active;
    const LinearSystem sys =
        assemble(patch, mesh, bench.material, bcs, bench.load, params.mode, opts);
    const SolveReport sol_c = stabilize_and_solve(sys, Ec, params.with_condition);
    SolveReport sol = sol_c;
    sol.u = Eigen::VectorXd::Zero(3 * nf);
    for (int f = 0; f < nf; ++f)
      if (remap[f] >= 0)
        for (int c = 0; c < 3; ++c) sol.u[3 * f + c] = sol_c.u[3 * remap[f] + c];

    rep.dofs = 3 * cls.n_stable;
    rep.cond_est = sol.cond_estimate;

    if (bench.exact_field) {
      rep.err_l2_u = l2_error(patch, mesh, sol.u, bench.exact_field).value;
      const ResultantErrors re =
          resultant_l2_errors(patch, mesh, sol.u, bench.exact_field, bench.material);
      rep.err_l2_n = re.normal_force;
      rep.err_l2_m = re.moment;
    }
    rep.err_residual = residual_error(patch, mesh, sol.u, bench.material, bench.load).value;
    rep.energy = stored_energy(patch, mesh, sol.u, bench.material);

    double eref = bench.reference_energy;
    if (eref == 0.0 && bench.exact_field)
      eref = stored_energy_field(patch, mesh, bench.exact_field, bench.material);
    if (eref != 0.0) rep.err_energy = std::abs(rep.energy - eref) / std::abs(eref);

    if (bench.sample_xi) {
      const JetVec3 us =
          field_jets(patch, sol.u, bench.sample_xi->x(), bench.sample_xi->y(), 0);
      rep.sample_value = us[bench.sample_component].val();
      if (bench.reference_point_value != 0.0)
        rep.err_l2_u = std::abs(std::abs(rep.sample_value) - bench.reference_point_value) /
                       bench.reference_point_value;
    }
  } catch (const std::exception& ex) {
    rep.failed = true;
    rep.failure = ex.what();
  }
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

StudyResult run_study(const BenchmarkDefinition& bench, const std::vector<int>& n_list,
                      const std::vector<int>& p_list, double alpha, const StudyParams& params) {
  if (n_list.empty() || p_list.empty())
    throw std::invalid_argument("study lists must be non-empty");
  StudyResult out;
  for (int p : p_list)
    for (int n : n_list) out.cells.push_back(run_cell(bench, n, p, alpha, params));
  return out;
}

std::string study_csv(const StudyResult& result) {
  std::ostringstream os;
  os.precision(10);
  os << "run_id,benchmark,p,n,alpha,dofs,err_l2_u,err_l2_n,err_l2_m,err_residual,energy,"
        "err_energy,cond_est,wall_time_s\n";
  int id = 0;
  for (const auto& c : result.cells) {
    os << id++ << ',' << c.benchmark << ',' << c.p << ',' << c.n << ',' << c.alpha << ','
       << c.dofs << ',' << c.err_l2_u << ',' << c.err_l2_n << ',' << c.err_l2_m << ','
       << c.err_residual << ',' << c.energy << ',' << c.err_energy << ',' << c.cond_est << ','
       << c.wall_time_s << '\n';
  }
  return os.str();
}

}  // namespace trimshell
