#pragma once

#include <Eigen/Sparse>

#include "trimshell/mesh.hpp"

namespace trimshell {

enum class FuncClass { stable, degenerate, exterior };

struct BasisClassification {
  double alpha = 0.5;
  std::vector<FuncClass> cls;        // per basis function
  std::vector<double> rel_support;   // visible area fraction of the support
  std::vector<double> rel_span_max;  // largest visible fraction among the support spans
  std::vector<int> stable_ordinal;   // function -> column in the stable basis, or -1
  int n_stable = 0;

  int num_funcs() const { return static_cast<int>(cls.size()); }
};

// Support measures come from the integration-mesh parameter-space weights.
// A function is exterior when its visible support area vanishes and stable
// when at least one knot span of its support keeps a visible fraction of
// alpha; the degenerate layer is then one function deep along generic
// trimming curves, which keeps extension donors close and the extrapolation
// weights small.
BasisClassification classify_functions(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                                       double alpha);

// Same, but lowers the threshold when no span consists of stable functions
// only (which happens on very coarse meshes where every function loses a
// large part of its support).  The effective alpha is recorded in the result.
BasisClassification classify_with_donor_guarantee(const TrimmedPatch& patch,
                                                  const IntegrationMesh& mesh, double alpha);

// Power-basis coefficients of the p+1 segments on 'span', in the local
// coordinate r = (u - u_s)/(u_{s+1} - u_s):  B_{s-p+i}(u(r)) = sum_c A(c,i) r^c.
Eigen::MatrixXd power_coeffs(const KnotVector& kv, int span);

// Coefficients of N_j(r) = prod_{d=1..p} (r - r_{j+d}) in the power basis,
// from the already-transformed knots r_{j+1}..r_{j+p}.
Eigen::VectorXd newton_poly_coeffs(const std::vector<double>& local_knots);

// de Boor-Fix extrapolation weights e(i_local, j_local) expressing the
// polynomial extensions of the donor span's segments in the basis of the
// trimmed span; everything is evaluated in the trimmed span's local frame.
Eigen::MatrixXd extrapolation_weights(const KnotVector& kv, int donor_span, int trimmed_span);

// Sparse map from the stable basis into the full basis: unit rows for stable
// functions, tensor-product de Boor-Fix weights for degenerate ones, zero rows
// for exterior ones.  Rational bases scale the weights by w_stable/w_degenerate
// so the extension acts on the homogeneous coefficients.
Eigen::SparseMatrix<double> build_extension_matrix(const TrimmedPatch& patch,
                                                   const IntegrationMesh& mesh,
                                                   const BasisClassification& cls);

// Restriction of stable functions only (unit columns); drops degenerate and
// exterior rows.  This is the "no stabilization" reference.
Eigen::SparseMatrix<double> selection_matrix(const BasisClassification& cls, bool keep_degenerate);

// E repeated per displacement component (node-major dof layout 3*f + c).
Eigen::SparseMatrix<double> expand_for_components(const Eigen::SparseMatrix<double>& E,
                                                  int ncomp);

}  // namespace trimshell
