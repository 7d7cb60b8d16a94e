#include <cmath>
#include <random>

#include "doctest.h"
#include "trimshell/geometry.hpp"

using namespace trimshell;

namespace {

std::shared_ptr<AnalyticGeometry> plane_geometry() {
  return std::make_shared<AnalyticGeometry>([](const Jet& u, const Jet& v) {
    std::array<Jet, 3> x;
    x[0] = u;
    x[1] = v;
    x[2] = Jet::constant(0.0, u.order());
    return x;
  });
}

std::shared_ptr<AnalyticGeometry> cylinder_geometry(double R) {
  return std::make_shared<AnalyticGeometry>([R](const Jet& u, const Jet& v) {
    std::array<Jet, 3> x;
    x[0] = R * cos(u);
    x[1] = R * sin(u);
    x[2] = 4.0 * v;
    return x;
  });
}

}  // namespace

TEST_CASE("flat plane has zero curvature and idempotent projector") {
  auto g = plane_geometry();
  const SurfaceFrame f = surface_frame(*g, 0.3, 0.7);
  CHECK(f.normal.isApprox(Vec3(0, 0, 1), 1e-14));
  CHECK(f.H.norm() < 1e-13);
  CHECK((f.P * f.normal).norm() < 1e-14);
  CHECK((f.P * f.P - f.P).norm() < 1e-14);
}

TEST_CASE("cylinder curvature equals 1/R") {
  const double R = 2.5;
  auto g = cylinder_geometry(R);
  const SurfaceFrame f = surface_frame(*g, 0.9, 0.2);
  Eigen::SelfAdjointEigenSolver<Mat3> es(f.H);
  const Eigen::Vector3d ev = es.eigenvalues().cwiseAbs();
  CHECK(ev.maxCoeff() == doctest::Approx(1.0 / R).epsilon(1e-10));
  CHECK((f.H * f.normal).norm() < 1e-12);
}

TEST_CASE("frame identities at random points of a curved map") {
  auto g = std::make_shared<AnalyticGeometry>([](const Jet& u, const Jet& v) {
    std::array<Jet, 3> x;
    x[0] = u + 0.1 * sin(v);
    x[1] = v;
    x[2] = 0.3 * u * u + 0.2 * cos(u + v);
    return x;
  });
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int k = 0; k < 25; ++k) {
    const SurfaceFrame f = surface_frame(*g, dist(rng), dist(rng));
    CHECK(std::abs(f.normal.norm() - 1.0) < 1e-13);
    CHECK((f.P * f.normal).norm() < 1e-13);
    CHECK((f.P * f.P - f.P).norm() < 1e-12);
    CHECK((f.H - f.H.transpose()).norm() < 1e-12);
    CHECK((f.H * f.normal).norm() < 1e-12);
  }
}

TEST_CASE("boundary triad is right-handed and orthonormal") {
  auto g = plane_geometry();
  const SurfaceFrame f = surface_frame(*g, 0.0, 0.0);
  const Triad tr = boundary_triad(f, Vec3(1, 0, 0));
  // n x t = e_z x e_x = e_y
  CHECK(tr.n_co.isApprox(Vec3(0, 1, 0), 1e-14));
  CHECK(std::abs(tr.t.dot(tr.n_co)) < 1e-14);
  CHECK(std::abs(tr.t.dot(tr.n)) < 1e-14);
  CHECK(std::abs(tr.n_co.dot(tr.n)) < 1e-14);
  CHECK(tr.t.cross(tr.n_co).isApprox(tr.n, 1e-13));
  const Triad tr2 = boundary_triad(f, Vec3(-1, 0, 0));
  CHECK(tr2.n_co.isApprox(-tr.n_co, 1e-14));
  CHECK_THROWS(boundary_triad(f, Vec3(0, 0, 0)));
}

TEST_CASE("degenerate tangents raise a singular-parametrization error") {
  auto g = std::make_shared<AnalyticGeometry>([](const Jet& u, const Jet& v) {
    std::array<Jet, 3> x;  // both tangents parallel to e_x
    x[0] = u + v;
    x[1] = Jet::constant(0.0, u.order());
    x[2] = Jet::constant(0.0, u.order());
    return x;
  });
  CHECK_THROWS(surface_frame(*g, 0.5, 0.5));
}
