#pragma once

#include <utility>
#include <vector>

namespace trimshell {

struct GaussPoint {
  double x;
  double w;
};

// Gauss-Legendre rule with n points on [0,1]; exact for degree 2n-1.
const std::vector<GaussPoint>& gauss_rule(int n);

}  // namespace trimshell
