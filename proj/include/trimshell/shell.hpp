#pragma once

#include <functional>
#include <map>

#include "trimshell/mesh.hpp"

namespace trimshell {

struct ShellMaterial {
  double youngs = 0.0;
  double poisson = 0.0;
  double thickness = 0.0;

  ShellMaterial() = default;
  ShellMaterial(double E, double nu, double t) : youngs(E), poisson(nu), thickness(t) {
    if (!(E > 0.0)) throw std::invalid_argument("E must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw std::invalid_argument("nu out of range");
    if (!(t > 0.0)) throw std::invalid_argument("thickness must be positive");
  }
  // modified Lame constants (zero normal stress through the thickness)
  double mu() const { return youngs / (2.0 * (1.0 + poisson)); }
  double lambda() const { return youngs * poisson / (1.0 - poisson * poisson); }
  double membrane_stiffness() const { return youngs * thickness; }
  double bending_stiffness() const {
    return youngs * thickness * thickness * thickness / (12.0 * (1.0 - poisson * poisson));
  }
};

using JetVec3 = std::array<Jet, 3>;
using JetMat3 = std::array<std::array<Jet, 3>, 3>;

// Frame data as jets so surface operators of any order reduce to jet algebra.
struct PointFrame {
  int order = 0;
  Vec2 xi;
  JetVec3 xj;                            // coordinate jets
  std::array<std::array<Jet, 2>, 3> Ji;  // J (J^T J)^{-1}
  JetVec3 n;                             // unit normal
  JetMat3 P;                             // in-plane projector
  JetMat3 H;                             // Weingarten map
  SurfaceFrame vals;                     // plain values (x, tangents, P, H, jac)
};

PointFrame make_point_frame(const SurfaceGeometry& g, double u, double v, int order);

// directional surface gradient of a scalar jet (one order lower)
JetVec3 surface_gradient(const PointFrame& pf, const Jet& f);
// nested application: directional surface Hessian
JetMat3 surface_hessian(const PointFrame& pf, const Jet& f);

// membrane and bending strains of a displacement field given as jets
struct KinematicState {
  JetMat3 G;     // directional surface gradient of u
  JetMat3 epsM;  // sym(P G), in-plane
  JetMat3 epsB;  // -P [ sum_k n_k Hess(u_k) ] P, in-plane
};

KinematicState kinematics(const PointFrame& pf, const JetVec3& u);
Vec3 difference_vector(const PointFrame& pf, const KinematicState& st);

// in-plane Hooke law sigma(eps) = 2 mu eps + lambda tr(eps) P
JetMat3 inplane_stress(const ShellMaterial& mat, const JetMat3& eps, const JetMat3& P);

struct StressResultants {
  JetMat3 moment;        // m_Gamma
  JetMat3 normal_eff;    // effective normal force
  JetVec3 div_moment;    // row-wise surface divergence of m
  Vec3 shear;            // q = P div m (values)
  Mat3 normal_real;      // n_eff + H m (values)
};

StressResultants stress_resultants(const PointFrame& pf, const KinematicState& st,
                                   const ShellMaterial& mat);

// integrand of a(u,v): epsM(v):n_eff(u) + epsB(v):m(u)
double bilinear_integrand(const PointFrame& pf, const KinematicState& su,
                          const KinematicState& sv, const ShellMaterial& mat);

double energy_density(const PointFrame& pf, const KinematicState& st, const ShellMaterial& mat);

// div n_real + n div q + H div m + f  (zero at equilibrium); needs order-4 jets
Vec3 strong_residual(const PointFrame& pf, const JetVec3& u, const ShellMaterial& mat,
                     const Vec3& load);

// Kirchhoff corner force n m_{n∂Γ} differenced between the two boundary sides
// meeting at a corner.
Vec3 kirchhoff_corner_force(const PointFrame& pf, const JetVec3& u, const ShellMaterial& mat,
                            const Triad& side_a, const Triad& side_b);

// -------------------------- boundary conditions ---------------------------

struct BoundaryPointContext {
  Vec2 xi;
  Vec3 x;
  Triad triad;
};

using VecDataFn = std::function<Vec3(const BoundaryPointContext&)>;
using ScalarDataFn = std::function<double(const BoundaryPointContext&)>;

// One boundary condition per boundary tag.  Displacement constraints act on
// the full vector or on a list of fixed unit directions (slip/symmetry); the
// rotation about the boundary tangent may be constrained independently.
struct BoundaryCondition {
  bool dirichlet_u = false;
  bool full_u = false;
  std::vector<Vec3> dirs;  // unit constraint directions when !full_u
  VecDataFn g_u;           // displacement data (null = zero)
  ScalarDataFn omega_n_data;  // drilling-rotation data of g_u (null = zero)
  bool dirichlet_rot = false;
  ScalarDataFn g_omega;    // rotation data (null = zero)
  VecDataFn traction;      // Neumann traction data
  ScalarDataFn moment;     // Neumann bending-moment data

  static BoundaryCondition free_edge() { return {}; }
  static BoundaryCondition clamped(VecDataFn g = nullptr, ScalarDataFn w = nullptr) {
    BoundaryCondition bc;
    bc.dirichlet_u = bc.full_u = true;
    bc.dirichlet_rot = true;
    bc.g_u = std::move(g);
    bc.g_omega = std::move(w);
    return bc;
  }
  static BoundaryCondition simple_support(VecDataFn g = nullptr) {
    BoundaryCondition bc;
    bc.dirichlet_u = bc.full_u = true;
    bc.g_u = std::move(g);
    return bc;
  }
  static BoundaryCondition symmetry(const Vec3& d) {
    BoundaryCondition bc;
    bc.dirichlet_u = true;
    bc.dirs = {d.normalized()};
    bc.dirichlet_rot = true;
    return bc;
  }
  static BoundaryCondition slip(std::vector<Vec3> ds) {
    BoundaryCondition bc;
    bc.dirichlet_u = true;
    for (auto& d : ds) bc.dirs.push_back(d.normalized());
    return bc;
  }
};

using BoundaryConditions = std::map<int, BoundaryCondition>;

// load per unit area as a function of the surface point
using LoadFn = std::function<Vec3(const Vec2& xi, const Vec3& x, const SurfaceFrame& f)>;

// displacement field as jets (discrete or analytic)
using JetFieldFn = std::function<JetVec3(const Jet& u, const Jet& v)>;

// jets of sum_f coeffs[3f+c] N_f e_c at (u,v)
JetVec3 field_jets(const TrimmedPatch& patch, const Eigen::VectorXd& coeffs, double u,
                   double v, int order);

}  // namespace trimshell
