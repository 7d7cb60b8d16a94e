#pragma once

#include <optional>
#include <string>

#include "trimshell/assembly.hpp"
#include "trimshell/extension.hpp"

namespace trimshell {

// Relative L2 error of the discrete displacement against a reference field.
// Falls back to the absolute norm (flagged) when the reference norm vanishes.
struct L2Error {
  double value = 0.0;
  bool absolute_fallback = false;
};

L2Error l2_error(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                 const Eigen::VectorXd& coeffs, const JetFieldFn& exact);

struct ResultantErrors {
  double normal_force = 0.0;
  double moment = 0.0;
};

ResultantErrors resultant_l2_errors(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                                    const Eigen::VectorXd& coeffs, const JetFieldFn& exact,
                                    const ShellMaterial& mat);

// sqrt( int |strong residual|^2 dA / int |f|^2 dA ); 0/0 is reported as zero
// with the flag set.
struct ResidualError {
  double value = 0.0;
  bool degenerate = false;
};

ResidualError residual_error(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                             const Eigen::VectorXd& coeffs, const ShellMaterial& mat,
                             const LoadFn& load);

double stored_energy(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                     const Eigen::VectorXd& coeffs, const ShellMaterial& mat);
// energy of an analytic field, integrated on the same mesh
double stored_energy_field(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                           const JetFieldFn& field, const ShellMaterial& mat);

// least-squares slope of log(error) vs log(h); non-positive errors dropped
double fit_rate(const std::vector<std::pair<double, double>>& h_and_error);

// ------------------------------ studies ------------------------------------

struct BenchmarkDefinition {
  std::string name;
  std::function<TrimmedPatch(int n, int p)> make_patch;
  ShellMaterial material;
  LoadFn load;
  std::function<BoundaryConditions(int n, int p)> boundary_conditions;
  JetFieldFn exact_field;  // null when no exact solution is known

  // optional point-displacement reference (|component| at a parameter point)
  std::optional<Vec2> sample_xi;
  int sample_component = 2;
  double reference_point_value = 0.0;

  double reference_energy = 0.0;  // 0 = none
  std::vector<int> default_n;
  std::vector<int> default_p;
  double default_alpha = 0.5;
};

struct ErrorReport {
  std::string benchmark;
  int n = 0, p = 0;
  double alpha = 0.5;
  int dofs = 0;
  double err_l2_u = std::numeric_limits<double>::quiet_NaN();
  double err_l2_n = std::numeric_limits<double>::quiet_NaN();
  double err_l2_m = std::numeric_limits<double>::quiet_NaN();
  double err_residual = std::numeric_limits<double>::quiet_NaN();
  double energy = std::numeric_limits<double>::quiet_NaN();
  double err_energy = std::numeric_limits<double>::quiet_NaN();
  double cond_est = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0.0;
  double sample_value = std::numeric_limits<double>::quiet_NaN();  // signed sample displacement
  bool failed = false;
  std::string failure;
};

struct StudyResult {
  std::vector<ErrorReport> cells;

  // fitted rate of one error column over n for fixed p (h ~ 1/n)
  double rate(int p, double ErrorReport::*member) const;
};

struct StudyParams {
  int grid_q = 3;
  int gauss_offset = 1;  // gauss = p + offset
  Parallel mode = Parallel::openmp;
  bool with_condition = true;
};

StudyResult run_study(const BenchmarkDefinition& bench, const std::vector<int>& n_list,
                      const std::vector<int>& p_list, double alpha,
                      const StudyParams& params = {});

// single study cell (exposed for tests)
ErrorReport run_cell(const BenchmarkDefinition& bench, int n, int p, double alpha,
                     const StudyParams& params = {});

std::string study_csv(const StudyResult& result);

}  // namespace trimshell
