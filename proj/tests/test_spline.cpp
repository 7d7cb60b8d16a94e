#include <cmath>
#include <random>

#include "doctest.h"
#include "trimshell/spline.hpp"

using namespace trimshell;

namespace {

// independent Cox-de Boor recursion
double coxdeboor(const std::vector<double>& U, int i, int p, double u) {
  if (p == 0) return (u >= U[i] && u < U[i + 1]) ? 1.0 : 0.0;
  double a = 0.0, b = 0.0;
  if (U[i + p] > U[i]) a = (u - U[i]) / (U[i + p] - U[i]) * coxdeboor(U, i, p - 1, u);
  if (U[i + p + 1] > U[i + 1])
    b = (U[i + p + 1] - u) / (U[i + p + 1] - U[i + 1]) * coxdeboor(U, i + 1, p - 1, u);
  return a + b;
}

}  // namespace

TEST_CASE("find_span interval membership and endpoint convention") {
  KnotVector kv({0, 0, 0, 1, 2, 3, 3, 3}, 2);
  CHECK(kv.find_span(1.5) == 3);  // span [1,2)
  CHECK(kv.knots[kv.find_span(0.0)] == 0.0);
  const int s_end = kv.find_span(3.0);
  CHECK(kv.knots[s_end] == 2.0);  // right endpoint falls into [2,3)
  CHECK(kv.knots[s_end + 1] == 3.0);
  CHECK_THROWS_AS(kv.find_span(3.5), std::domain_error);
}

TEST_CASE("basis values match the Cox-de Boor recursion on the paper basis") {
  // quadratic basis on {1,1,1,2,3,4,4,4}
  KnotVector kv({1, 1, 1, 2, 3, 4, 4, 4}, 2);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(1.0, 4.0 - 1e-9);
  for (int trial = 0; trial < 50; ++trial) {
    const double u = dist(rng);
    const int span = kv.find_span(u);
    const Eigen::MatrixXd ders = kv.eval_basis(u, 0, span);
    for (int j = 0; j <= 2; ++j) {
      const int i = span - 2 + j;
      CHECK(ders(0, j) == doctest::Approx(coxdeboor(kv.knots, i, 2, u)).epsilon(1e-12));
    }
  }
  // B_{2,2} at the breakpoint u = 2
  const int span = kv.find_span(2.0);
  const Eigen::MatrixXd d = kv.eval_basis(2.0, 0, span);
  const double direct = coxdeboor(kv.knots, 2, 2, 2.0);
  CHECK(d(0, 2 - (span - 2)) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("partition of unity and zero derivative sums at random points") {
  const KnotVector kv = KnotVector::clamped_uniform(4, 7, 0.0, 1.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double u = dist(rng);
    const Eigen::MatrixXd ders = kv.eval_basis(u, 4);
    CHECK(ders.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k <= 4; ++k) CHECK(std::abs(ders.row(k).sum()) < 1e-7);
  }
}

TEST_CASE("derivatives match central finite differences") {
  const KnotVector kv = KnotVector::clamped_uniform(5, 6, 0.0, 2.0);
  const double h = 1e-4;
  for (double u : {0.31, 0.77, 1.23, 1.69}) {
    const Eigen::MatrixXd d0 = kv.eval_basis(u - h, 3);
    const Eigen::MatrixXd d1 = kv.eval_basis(u + h, 3);
    const Eigen::MatrixXd dc = kv.eval_basis(u, 4);
    // spans agree away from knots for these sample points
    for (int k = 0; k <= 3; ++k)
      for (int j = 0; j <= 5; ++j) {
        const double fd = (d1(k, j) - d0(k, j)) / (2.0 * h);
        CHECK(dc(k + 1, j) == doctest::Approx(fd).epsilon(1e-5));
      }
  }
}

TEST_CASE("degree-p basis reproduces monomials via Greville interpolation") {
  for (int p : {2, 3, 4}) {
    const KnotVector kv = KnotVector::clamped_uniform(p, 5, 0.0, 1.0);
    const int n = kv.num_basis();
    // Greville abscissae
    Eigen::VectorXd greville(n);
    for (int i = 0; i < n; ++i) {
      double g = 0.0;
      for (int k = 1; k <= p; ++k) g += kv.knots[i + k];
      greville[i] = g / p;
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const int span = kv.find_span(greville[i]);
      const Eigen::MatrixXd d = kv.eval_basis(greville[i], 0, span);
      for (int j = 0; j <= p; ++j) A(i, span - p + j) = d(0, j);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    for (int mono = 0; mono <= p; ++mono) {
      Eigen::VectorXd rhs(n);
      for (int i = 0; i < n; ++i) rhs[i] = std::pow(greville[i], mono);
      const Eigen::VectorXd c = lu.solve(rhs);
      for (double u : {0.05, 0.33, 0.62, 0.98}) {
        const int span = kv.find_span(u);
        const Eigen::MatrixXd d = kv.eval_basis(u, 0, span);
        double val = 0.0;
        for (int j = 0; j <= p; ++j) val += c[span - p + j] * d(0, j);
        CHECK(val == doctest::Approx(std::pow(u, mono)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("derivative orders above the degree evaluate to zero") {
  const KnotVector kv = KnotVector::clamped_uniform(2, 4, 0.0, 1.0);
  const Eigen::MatrixXd d = kv.eval_basis(0.4, 4);
  CHECK(d.row(3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.row(4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flat bilinear net is the bilinear interpolant") {
  TensorBasis tb;
  tb.ku = KnotVector({0, 0, 1, 1}, 1);
  tb.kv = KnotVector({0, 0, 1, 1}, 1);
  ControlNet net;
  net.points = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0), Vec3(2, 1, 1)};
  const auto S = eval_surface(net, tb, 0.5, 0.5, 2);
  CHECK(S[0].val() == doctest::Approx(1.0));
  CHECK(S[1].val() == doctest::Approx(0.5));
  CHECK(S[2].val() == doctest::Approx(0.25));
  // second derivatives vanish in each single direction for degree 1
  CHECK(S[2].deriv(2, 0) == doctest::Approx(0.0));
  CHECK(S[2].deriv(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("rational quadratic arc lies on the circle to 1e-12") {
  const double R = 25.0, sweep = 80.0 * M_PI / 180.0;
  HomoCurve arc = circular_arc_xz(R, sweep, 0.0, 2.0);
  // extrude a tiny distance in y to make a surface
  TensorBasis tb;
  tb.ku = arc.kv;
  tb.kv = KnotVector({0, 0, 1, 1}, 1);
  tb.weights.resize(3 * 2);
  ControlNet net;
  net.points.resize(6);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i) {
      const auto& h = arc.hpts[i];
      tb.weights[tb.index(i, j)] = h.w();
      net.points[tb.index(i, j)] = Vec3(h.x() / h.w(), static_cast<double>(j), h.z() / h.w());
    }
  for (double r : {0.0, 0.31, 0.77, 1.0, 1.5, 2.0}) {
    const auto S = eval_surface(net, tb, r, 0.5, 0);
    const double rad = std::hypot(S[0].val(), S[2].val());
    CHECK(rad == doctest::Approx(R).epsilon(1e-12));
  }
}

TEST_CASE("mixed surface derivative matches finite differences of first derivatives") {
  // elevated/refined arc surface
  HomoCurve arc = circular_arc_xz(2.0, 1.1, 0.0, 1.0);
  arc = elevate_bezier_once(arc);
  arc = insert_knot(arc, 0.4);
  TensorBasis tb;
  tb.ku = arc.kv;
  tb.kv = KnotVector({0, 0, 0, 1, 1, 1}, 2);
  const int nu = tb.num_u();
  tb.weights.resize(nu * 3);
  ControlNet net;
  net.points.resize(nu * 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < nu; ++i) {
      const auto& h = arc.hpts[i];
      tb.weights[tb.index(i, j)] = h.w();
      net.points[tb.index(i, j)] =
          Vec3(h.x() / h.w(), 0.5 * j + 0.1 * j * j, h.z() / h.w() + 0.05 * j);
    }
  const double u = 0.63, v = 0.37, h = 1e-5;
  const auto S = eval_surface(net, tb, u, v, 2);
  const auto Sp = eval_surface(net, tb, u + h, v, 1);
  const auto Sm = eval_surface(net, tb, u - h, v, 1);
  for (int d = 0; d < 3; ++d) {
    const double fd = (Sp[d].deriv(0, 1) - Sm[d].deriv(0, 1)) / (2.0 * h);
    CHECK(S[d].deriv(1, 1) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("knot insertion and degree elevation preserve the curve") {
  HomoCurve arc = circular_arc_xz(3.0, 0.9, 0.0, 1.0);
  HomoCurve refined = elevate_bezier_once(elevate_bezier_once(arc));
  refined = insert_knot(refined, 0.3);
  refined = insert_knot(refined, 0.7);

  auto eval_curve = [](const HomoCurve& c, double u) {
    const int p = c.kv.degree;
    const int span = c.kv.find_span(u);
    const Eigen::MatrixXd d = c.kv.eval_basis(u, 0, span);
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    for (int j = 0; j <= p; ++j) acc += d(0, j) * c.hpts[span - p + j];
    return Vec3(acc.head<3>() / acc.w());
  };
  for (double u : {0.0, 0.2, 0.45, 0.81, 1.0})
    CHECK((eval_curve(arc, u) - eval_curve(refined, u)).norm() < 1e-13);
}
