#include "trimshell/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace trimshell {

namespace {

// Newton iteration on P_n; nodes seeded by the Chebyshev approximation.
std::vector<GaussPoint> compute_gauss(int n) {
  std::vector<GaussPoint> rule(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      pp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // map from [-1,1] to [0,1]
    rule[i].x = 0.5 * (1.0 - x);  // reversed order is irrelevant
    rule[i].w = 1.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

}  // namespace

const std::vector<GaussPoint>& gauss_rule(int n) {
  if (n < 1 || n > 30) throw std::invalid_argument("gauss order out of range");
  static std::map<int, std::vector<GaussPoint>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

}  // namespace trimshell
