#include <cmath>
#include <random>

#include "doctest.h"
#include "trimshell/trimming.hpp"

using namespace trimshell;

namespace {

TrimmedPatch unit_patch(std::vector<std::shared_ptr<LevelSet>> ls, double a = 0.0,
                        double b = 1.0) {
  TrimmedPatch patch;
  patch.basis.ku = KnotVector::clamped_uniform(1, 1, a, b);
  patch.basis.kv = KnotVector::clamped_uniform(1, 1, a, b);
  patch.geometry = std::make_shared<AnalyticGeometry>([](const Jet& u, const Jet& v) {
    std::array<Jet, 3> x;
    x[0] = u;
    x[1] = v;
    x[2] = Jet::constant(0.0, u.order());
    return x;
  });
  patch.levelsets = std::move(ls);
  return patch;
}

}  // namespace

TEST_CASE("composite of a single level set is a pass-through") {
  auto patch = unit_patch({halfplane_levelset(1.0, 0.0, -0.25)});
  const auto cv = composite_levelset(patch, 0.7, 0.1);
  CHECK(cv.value == doctest::Approx(0.45));
  CHECK(cv.active == 0);
}

TEST_CASE("flat-shell style min composition picks the smallest curve") {
  // phi1 = s, phi3 = r as in the flat-shell corner
  auto patch = unit_patch({halfplane_levelset(0.0, 1.0, 0.0), halfplane_levelset(1.0, 0.0, 0.0)});
  const auto cv = composite_levelset(patch, 0.5, 0.2);
  CHECK(cv.value == doctest::Approx(0.2));
  CHECK(cv.active == 0);
  // a point outside any one curve gives a negative composite
  CHECK(composite_levelset(patch, -0.1, 0.5).value < 0.0);
}

TEST_CASE("constant level sets classify whole spans") {
  auto inside = unit_patch({halfplane_levelset(0.0, 0.0, 1.0)});
  CHECK(classify_span(inside, 0, 1, 0, 1, 8) == SpanClass::inside);
  auto outside = unit_patch({halfplane_levelset(0.0, 0.0, -1.0)});
  CHECK(classify_span(outside, 0, 1, 0, 1, 8) == SpanClass::outside);
}

TEST_CASE("disk on an 8x8 grid: corners outside, center inside, ring cut") {
  const double half = 0.875;
  auto patch = unit_patch({disk_levelset(Vec2(0, 0), 0.7123)}, -half, half);
  const int n = 8;
  const double h = 2.0 * half / n;
  // dense-sampling oracle per span
  auto oracle = [&](double r0, double s0) {
    int pos = 0, neg = 0;
    const int m = 101;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const double r = r0 + h * i / (m - 1);
        const double s = s0 + h * j / (m - 1);
        ((0.7123 - std::hypot(r, s)) >= 0.0 ? pos : neg)++;
      }
    if (neg == 0) return SpanClass::inside;
    if (pos == 0) return SpanClass::outside;
    return SpanClass::cut;
  };
  int cut_count = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double r0 = -half + i * h, s0 = -half + j * h;
      const SpanClass got = classify_span(patch, r0, r0 + h, s0, s0 + h, 16);
      CHECK(got == oracle(r0, s0));
      if (got == SpanClass::cut) ++cut_count;
    }
  CHECK(classify_span(patch, -half, -half + h, -half, -half + h, 16) == SpanClass::outside);
  CHECK(classify_span(patch, -h / 2, h / 2, -h / 2, h / 2, 16) == SpanClass::inside);
  CHECK(cut_count > 0);
}

TEST_CASE("dense-sampling consistency on benchmark-style level sets") {
  const double half = 0.875;
  auto patch = unit_patch({disk_levelset(Vec2(0, 0), 0.7123)}, -half, half);
  const int n = 6;
  const double h = 2.0 * half / n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double r0 = -half + i * h, s0 = -half + j * h;
      const SpanClass got = classify_span(patch, r0, r0 + h, s0, s0 + h, 24);
      if (got == SpanClass::cut) continue;
      // no opposite-sign sample in a span labeled inside/outside
      const int m = 501;
      for (int jj = 0; jj < m; jj += 10)
        for (int ii = 0; ii < m; ii += 10) {
          const double r = r0 + h * ii / (m - 1);
          const double s = s0 + h * jj / (m - 1);
          const double v = 0.7123 - std::hypot(r, s);
          if (got == SpanClass::inside) CHECK(v >= -1e-12);
          if (got == SpanClass::outside) CHECK(v <= 1e-12);
        }
    }
}

TEST_CASE("min composition preserves the Lipschitz bound of signed distances") {
  auto patch = unit_patch({disk_levelset(Vec2(0.2, 0.1), 0.5), disk_levelset(Vec2(-0.3, 0.4), 0.7)},
                          -1.0, 1.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec2 a(dist(rng), dist(rng)), b(dist(rng), dist(rng));
    const double va = composite_levelset(patch, a.x(), a.y()).value;
    const double vb = composite_levelset(patch, b.x(), b.y()).value;
    CHECK(std::abs(va - vb) <= (a - b).norm() + 1e-12);
  }
}

TEST_CASE("expression level sets evaluate with exact gradients") {
  auto ls = parse_levelset_expression("0.7123 - norm(r, s)");
  CHECK(ls->value(0.3, 0.4) == doctest::Approx(0.7123 - 0.5).epsilon(1e-14));
  const Vec2 g = ls->gradient(0.3, 0.4);
  CHECK(g.x() == doctest::Approx(-0.3 / 0.5).epsilon(1e-12));
  CHECK(g.y() == doctest::Approx(-0.4 / 0.5).epsilon(1e-12));

  auto poly = parse_levelset_expression("1 - r^2 - 0.5*s^2 + sin(r*s)/4");
  const double r = 0.21, s = -0.53;
  CHECK(poly->value(r, s) ==
        doctest::Approx(1 - r * r - 0.5 * s * s + std::sin(r * s) / 4).epsilon(1e-14));
  CHECK_THROWS(parse_levelset_expression("r + unknown(s)"));
  CHECK_THROWS(parse_levelset_expression("r + "));
}
