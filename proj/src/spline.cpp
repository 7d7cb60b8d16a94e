#include "trimshell/spline.hpp"

#include <algorithm>
#include <cmath>

namespace trimshell {

KnotVector::KnotVector(std::vector<double> k, int p) : knots(std::move(k)), degree(p) {
  if (degree < 0) throw std::invalid_argument("negative degree");
  if (static_cast<int>(knots.size()) < degree + 2)
    throw std::invalid_argument("knot vector too short");
  for (size_t i = 1; i < knots.size(); ++i)
    if (knots[i] < knots[i - 1]) throw std::invalid_argument("knots not non-decreasing");
  // multiplicity check
  size_t i = 0;
  while (i < knots.size()) {
    size_t j = i;
    while (j + 1 < knots.size() && knots[j + 1] == knots[i]) ++j;
    if (static_cast<int>(j - i + 1) > degree + 1)
      throw std::invalid_argument("knot multiplicity exceeds degree+1");
    i = j + 1;
  }
}

int KnotVector::find_span(double u) const {
  const int n = num_basis();
  const double eps = 1e-12 * std::max(1.0, std::abs(umax()) + std::abs(umin()));
  if (u < umin() - eps || u > umax() + eps)
    throw std::domain_error("parameter outside knot range");
  u = std::clamp(u, umin(), umax());
  if (u >= knots[n]) {
    // right endpoint: last non-empty span
    int s = n - 1;
    while (s > degree && knots[s] == knots[s + 1]) --s;
    return s;
  }
  int lo = degree, hi = n;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (u < knots[mid] ? hi : lo) = mid;
  }
  return lo;
}

Eigen::MatrixXd KnotVector::eval_basis(double u, int order) const {
  return eval_basis(u, order, find_span(u));
}

// Cox-de Boor recursion with derivatives (Piegl & Tiller A2.3).
Eigen::MatrixXd KnotVector::eval_basis(double u, int order, int span) const {
  const int p = degree;
  Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(order + 1, p + 1);
  Eigen::MatrixXd ndu(p + 1, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - knots[span + 1 - j];
    right[j] = knots[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

  const int kmax = std::min(order, p);
  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= kmax; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= factor;
    factor *= (p - k);
  }
  return ders;
}

std::vector<int> KnotVector::nonempty_spans() const {
  std::vector<int> spans;
  for (int s = degree; s < num_basis(); ++s)
    if (knots[s + 1] > knots[s]) spans.push_back(s);
  return spans;
}

KnotVector KnotVector::clamped_uniform(int degree, int nspans, double a, double b) {
  std::vector<double> k;
  k.reserve(nspans + 2 * degree + 1);
  for (int i = 0; i < degree; ++i) k.push_back(a);
  for (int i = 0; i <= nspans; ++i) k.push_back(a + (b - a) * i / nspans);
  for (int i = 0; i < degree; ++i) k.push_back(b);
  return KnotVector(std::move(k), degree);
}

void TensorBasis::check() const {
  if (!weights.empty()) {
    if (static_cast<int>(weights.size()) != num_funcs())
      throw std::invalid_argument("weight count does not match basis");
    for (double w : weights)
      if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
  }
}

LocalBasis eval_local_basis(const TensorBasis& tb, double u, double v, int order) {
  LocalBasis lb;
  lb.p1 = tb.ku.degree;
  lb.p2 = tb.kv.degree;
  lb.span_u = tb.ku.find_span(u);
  lb.span_v = tb.kv.find_span(v);
  const Eigen::MatrixXd Nu = tb.ku.eval_basis(u, order, lb.span_u);
  const Eigen::MatrixXd Nv = tb.kv.eval_basis(v, order, lb.span_v);

  const int n1 = lb.p1 + 1, n2 = lb.p2 + 1;
  lb.funcs.assign(n1 * n2, Jet(order));
  std::vector<double> fct(order + 1, 1.0);
  for (int k = 1; k <= order; ++k) fct[k] = fct[k - 1] * k;

  for (int b = 0; b < n2; ++b)
    for (int a = 0; a < n1; ++a) {
      Jet& f = lb.funcs[a + n1 * b];
      for (int ka = 0; ka <= order; ++ka)
        for (int kb = 0; ka + kb <= order; ++kb)
          f.set_coeff(ka, kb, Nu(ka, a) * Nv(kb, b) / (fct[ka] * fct[kb]));
    }

  if (tb.rational()) {
    Jet W(order);
    std::vector<double> wloc(n1 * n2);
    for (int l = 0; l < n1 * n2; ++l) {
      wloc[l] = tb.weights[lb.global_index(tb, l)];
      W += wloc[l] * lb.funcs[l];
    }
    const Jet Winv = W.reciprocal();
    for (int l = 0; l < n1 * n2; ++l) lb.funcs[l] = wloc[l] * lb.funcs[l] * Winv;
  }
  return lb;
}

std::array<Jet, 3> eval_surface(const ControlNet& net, const TensorBasis& tb, double u,
                                double v, int order) {
  // homogeneous sums, then one jet division per coordinate
  const int p1 = tb.ku.degree, p2 = tb.kv.degree;
  const int su = tb.ku.find_span(u), sv = tb.kv.find_span(v);
  const Eigen::MatrixXd Nu = tb.ku.eval_basis(u, order, su);
  const Eigen::MatrixXd Nv = tb.kv.eval_basis(v, order, sv);
  std::vector<double> fct(order + 1, 1.0);
  for (int k = 1; k <= order; ++k) fct[k] = fct[k - 1] * k;

  std::array<Jet, 3> A{Jet(order), Jet(order), Jet(order)};
  Jet W(order);
  for (int b = 0; b <= p2; ++b)
    for (int a = 0; a <= p1; ++a) {
      const int f = tb.index(su - p1 + a, sv - p2 + b);
      const double w = tb.weight(f);
      Jet basis(order);
      for (int ka = 0; ka <= order; ++ka)
        for (int kb = 0; ka + kb <= order; ++kb)
          basis.set_coeff(ka, kb, Nu(ka, a) * Nv(kb, b) / (fct[ka] * fct[kb]));
      for (int d = 0; d < 3; ++d) A[d] += (w * net.points[f][d]) * basis;
      if (tb.rational()) W += w * basis;
    }
  if (tb.rational()) {
    const Jet Winv = W.reciprocal();
    for (int d = 0; d < 3; ++d) A[d] = A[d] * Winv;
  }
  return A;
}

HomoCurve elevate_bezier_once(const HomoCurve& c) {
  const int p = c.kv.degree;
  const int n = c.kv.num_basis();
  if (n != p + 1) throw std::invalid_argument("elevate_bezier_once expects a single segment");
  HomoCurve r;
  const double a = c.kv.umin(), b = c.kv.umax();
  std::vector<double> knots;
  for (int i = 0; i <= p + 1; ++i) knots.push_back(a);
  for (int i = 0; i <= p + 1; ++i) knots.push_back(b);
  r.kv = KnotVector(std::move(knots), p + 1);
  r.hpts.resize(p + 2);
  r.hpts[0] = c.hpts[0];
  r.hpts[p + 1] = c.hpts[p];
  for (int i = 1; i <= p; ++i) {
    const double alpha = static_cast<double>(i) / (p + 1);
    r.hpts[i] = alpha * c.hpts[i - 1] + (1.0 - alpha) * c.hpts[i];
  }
  return r;
}

HomoCurve insert_knot(const HomoCurve& c, double u) {
  const int p = c.kv.degree;
  const int k = c.kv.find_span(u);
  HomoCurve r;
  std::vector<double> knots = c.kv.knots;
  knots.insert(knots.begin() + k + 1, u);
  r.kv = KnotVector(std::move(knots), p);
  const int n = c.kv.num_basis();
  r.hpts.resize(n + 1);
  for (int i = 0; i <= k - p; ++i) r.hpts[i] = c.hpts[i];
  for (int i = k - p + 1; i <= k; ++i) {
    const double denom = c.kv.knots[i + p] - c.kv.knots[i];
    const double alpha = denom > 0.0 ? (u - c.kv.knots[i]) / denom : 0.0;
    r.hpts[i] = alpha * c.hpts[i] + (1.0 - alpha) * c.hpts[i - 1];
  }
  for (int i = k + 1; i <= n; ++i) r.hpts[i] = c.hpts[i - 1];
  return r;
}

HomoCurve circular_arc_xz(double radius, double sweep, double a, double b) {
  const double half = 0.5 * sweep;
  const double w1 = std::cos(half);
  HomoCurve c;
  c.kv = KnotVector({a, a, a, b, b, b}, 2);
  const Vec3 p0(radius * std::sin(-half), 0.0, radius * std::cos(-half));
  const Vec3 p2(radius * std::sin(half), 0.0, radius * std::cos(half));
  const Vec3 p1(0.0, 0.0, radius / std::cos(half));
  c.hpts = {Eigen::Vector4d(p0.x(), p0.y(), p0.z(), 1.0),
            Eigen::Vector4d(w1 * p1.x(), w1 * p1.y(), w1 * p1.z(), w1),
            Eigen::Vector4d(p2.x(), p2.y(), p2.z(), 1.0)};
  return c;
}

}  // namespace trimshell
