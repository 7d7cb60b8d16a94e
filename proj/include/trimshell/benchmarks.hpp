#pragma once

#include "trimshell/verification.hpp"

namespace trimshell {

// Scordelis-Lo roof: quarter model of a cylindrical shell on a [0,2]^2
// parameter space, trimmed at r = 1 and s = 1, rigid diaphragm at s = 0.
BenchmarkDefinition benchmark_scordelis();

// Simply supported flat shell embedded in R^3 with a manufactured solution;
// the load is minus the strong-form operator applied to the exact field.
BenchmarkDefinition benchmark_flat_shell();

// Clamped circular shell on a curved analytic map with inhomogeneous
// Dirichlet data g_u = -0.1 n.
BenchmarkDefinition benchmark_circular();

const std::vector<std::string>& benchmark_names();
BenchmarkDefinition benchmark_by_name(const std::string& name);

// exact solution of the flat-shell problem (exposed for tests)
JetFieldFn flat_shell_exact_field();

}  // namespace trimshell
