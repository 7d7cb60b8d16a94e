#pragma once

#include <Eigen/Sparse>

#include "trimshell/shell.hpp"

namespace trimshell {

// Node-major dof layout: dof = 3*function + component.
struct DofMap {
  int nfuncs = 0;
  int size() const { return 3 * nfuncs; }
  static int index(int func, int comp) { return 3 * func + comp; }
};

struct LinearSystem {
  Eigen::MatrixXd K;  // non-symmetric once the Nitsche terms are in
  Eigen::VectorXd f;
  int dim() const { return static_cast<int>(K.rows()); }
};

struct AssemblyOptions {
  bool nitsche = true;          // assemble the boundary terms
  bool stiffness_only = false;  // a(.,.) only: no boundary terms, no load
  // optional compression: function index -> row block, or -1 to drop the
  // function (used to leave out exterior functions, whose rows vanish anyway)
  const std::vector<int>* func_remap = nullptr;
  int n_remapped = 0;
};

LinearSystem assemble(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                      const ShellMaterial& mat, const BoundaryConditions& bcs,
                      const LoadFn& load, Parallel mode = Parallel::openmp,
                      const AssemblyOptions& opts = {});

struct SolveReport {
  Eigen::VectorXd u;        // coefficients in the full basis (E u_st)
  Eigen::VectorXd u_stable; // coefficients of the stable system
  double cond_estimate = 0.0;
  double residual = 0.0;    // ||K_st u_st - f_st|| / ||f_st||
};

// K_st = E^T K E, f_st = E^T f, LU solve with partial pivoting, expansion
// u = E u_st, algebraic residual check.  E acts per displacement component.
SolveReport stabilize_and_solve(const LinearSystem& sys, const Eigen::SparseMatrix<double>& E,
                                bool with_condition = true);

// Hager-Higham style 1-norm condition estimate ||K||_1 ||K^-1||_1 using the
// LU factors for the inverse applications.
double estimate_condition(const Eigen::MatrixXd& K);
double estimate_condition(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, double anorm);

}  // namespace trimshell
