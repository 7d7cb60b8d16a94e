#include <cmath>
#include <random>

#include "doctest.h"
#include "trimshell/extension.hpp"
#include "trimshell/quadrature.hpp"

using namespace trimshell;

namespace {

std::shared_ptr<AnalyticGeometry> identity_plane() {
  return std::make_shared<AnalyticGeometry>([](const Jet& u, const Jet& v) {
    std::array<Jet, 3> x;
    x[0] = u;
    x[1] = v;
    x[2] = Jet::constant(0.0, u.order());
    return x;
  });
}

TrimmedPatch make_patch(int p, int n, std::vector<std::shared_ptr<LevelSet>> ls,
                        double a = 0.0, double b = 1.0) {
  TrimmedPatch patch;
  patch.basis.ku = KnotVector::clamped_uniform(p, n, a, b);
  patch.basis.kv = KnotVector::clamped_uniform(p, n, a, b);
  patch.geometry = identity_plane();
  patch.levelsets = std::move(ls);
  return patch;
}

IntegrationMesh mesh_for(const TrimmedPatch& patch, int p) {
  CutCellParams prm;
  prm.lagrange_order = p;
  prm.gauss = p + 1;
  return build_integration_mesh(patch, prm, Parallel::serial);
}

double eval_spline_1d(const KnotVector& kv, const Eigen::VectorXd& c, double u) {
  const int span = kv.find_span(u);
  const Eigen::MatrixXd d = kv.eval_basis(u, 0, span);
  double acc = 0.0;
  for (int j = 0; j <= kv.degree; ++j) acc += c[span - kv.degree + j] * d(0, j);
  return acc;
}

}  // namespace

TEST_CASE("power coefficients of hat functions and partition of unity") {
  KnotVector kv = KnotVector::clamped_uniform(1, 4, 0.0, 4.0);
  const Eigen::MatrixXd A = power_coeffs(kv, kv.find_span(1.5));
  CHECK(A(0, 0) == doctest::Approx(1.0));
  CHECK(A(1, 0) == doctest::Approx(-1.0));
  CHECK(A(0, 1) == doctest::Approx(0.0));
  CHECK(A(1, 1) == doctest::Approx(1.0));

  KnotVector kc = KnotVector::clamped_uniform(3, 5, 0.0, 1.0);
  for (int span : kc.nonempty_spans()) {
    const Eigen::MatrixXd Ac = power_coeffs(kc, span);
    for (int k = 0; k < 20; ++k) {
      const double r = (k + 0.5) / 20.0;
      double sum = 0.0;
      for (int i = 0; i <= 3; ++i)
        for (int c = 0; c <= 3; ++c) sum += Ac(c, i) * std::pow(r, c);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("power coefficients agree with a Vandermonde fit of the basis") {
  KnotVector kv({0, 0, 0, 0, 1, 2, 3, 4, 4, 4, 4}, 3);
  const int span = kv.find_span(2.5);
  const Eigen::MatrixXd A = power_coeffs(kv, span);
  const double u0 = kv.knots[span], h = kv.knots[span + 1] - u0;
  Eigen::MatrixXd V(4, 4);
  Eigen::MatrixXd rhs(4, 4);
  for (int k = 0; k < 4; ++k) {
    const double r = (k + 0.5) / 4.0;
    for (int c = 0; c < 4; ++c) V(k, c) = std::pow(r, c);
    const Eigen::MatrixXd d = kv.eval_basis(u0 + r * h, 0, span);
    for (int i = 0; i < 4; ++i) rhs(k, i) = d(0, i);
  }
  const Eigen::MatrixXd fitted = V.fullPivLu().solve(rhs);
  CHECK((fitted - A).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("newton polynomial coefficients") {
  CHECK(newton_poly_coeffs({0.5})[0] == doctest::Approx(-0.5));
  CHECK(newton_poly_coeffs({0.5})[1] == doctest::Approx(1.0));
  const Eigen::VectorXd b2 = newton_poly_coeffs({0.0, 1.0});
  CHECK(b2[0] == doctest::Approx(0.0));
  CHECK(b2[1] == doctest::Approx(-1.0));
  CHECK(b2[2] == doctest::Approx(1.0));

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> kn(4);
    for (auto& k : kn) k = dist(rng);
    const Eigen::VectorXd beta = newton_poly_coeffs(kn);
    double e1 = 0, e2 = 0, e3 = 0, e4 = 1;
    for (double k : kn) e1 += k;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) e2 += kn[i] * kn[j];
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        for (int l = j + 1; l < 4; ++l) e3 += kn[i] * kn[j] * kn[l];
    for (double k : kn) e4 *= k;
    CHECK(beta[4] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(beta[3] == doctest::Approx(-e1).epsilon(1e-12));
    CHECK(beta[2] == doctest::Approx(e2).epsilon(1e-12));
    CHECK(beta[1] == doctest::Approx(-e3).epsilon(1e-12));
    CHECK(beta[0] == doctest::Approx(e4).epsilon(1e-12));
  }
}

TEST_CASE("self-extension weights are the identity") {
  KnotVector kv = KnotVector::clamped_uniform(3, 6, 0.0, 1.0);
  for (int span : {3, 5, 7}) {
    const Eigen::MatrixXd E = extrapolation_weights(kv, span, span);
    CHECK((E - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("extrapolation weights match the direct polynomial-matching oracle") {
  auto oracle = [](const KnotVector& kv, int donor, int trimmed) {
    const int p = kv.degree;
    const double a = kv.knots[trimmed], h = kv.knots[trimmed + 1] - a;
    const Eigen::MatrixXd Ad = power_coeffs(kv, donor);
    const double a_d = kv.knots[donor], h_d = kv.knots[donor + 1] - a_d;
    Eigen::MatrixXd lhs(p + 1, p + 1), rhs(p + 1, p + 1);
    for (int k = 0; k <= p; ++k) {
      const double u = a + h * (k + 0.5) / (p + 1);
      const Eigen::MatrixXd d = kv.eval_basis(u, 0, trimmed);
      for (int j = 0; j <= p; ++j) lhs(k, j) = d(0, j);
      const double rd = (u - a_d) / h_d;
      for (int i = 0; i <= p; ++i) {
        double val = 0.0;
        for (int c = 0; c <= p; ++c) val += Ad(c, i) * std::pow(rd, c);
        rhs(k, i) = val;
      }
    }
    Eigen::MatrixXd W = lhs.fullPivLu().solve(rhs);
    return Eigen::MatrixXd(W.transpose());
  };

  KnotVector paper_kv({0, 0, 0, 1, 2, 3, 3, 3}, 2);
  const int donor = paper_kv.find_span(1.5), trimmed = paper_kv.find_span(2.5);
  const Eigen::MatrixXd E = extrapolation_weights(paper_kv, donor, trimmed);
  const Eigen::MatrixXd W = oracle(paper_kv, donor, trimmed);
  CHECK((E - W).cwiseAbs().maxCoeff() < 1e-10);

  std::mt19937 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + trial % 4;
    const int nspans = 3 + trial % 3;
    std::vector<double> knots;
    for (int i = 0; i < p; ++i) knots.push_back(0.0);
    double u = 0.0;
    std::uniform_real_distribution<double> step(0.3, 1.7);
    for (int i = 0; i <= nspans; ++i) {
      knots.push_back(u);
      u += step(rng);
    }
    for (int i = 0; i < p; ++i) knots.push_back(knots.back());
    KnotVector kv(knots, p);
    const auto spans = kv.nonempty_spans();
    const int d = spans[trial % spans.size()];
    const int t = spans[(trial + 1) % spans.size()];
    const Eigen::MatrixXd Ew = extrapolation_weights(kv, d, t);
    const Eigen::MatrixXd Wo = oracle(kv, d, t);
    const double scale = std::max(1.0, Ew.cwiseAbs().maxCoeff());
    CHECK((Ew - Wo).cwiseAbs().maxCoeff() / scale < 1e-10);
  }
}

TEST_CASE("classification: untrimmed basis is all stable") {
  auto patch = make_patch(3, 4, {});
  const auto mesh = mesh_for(patch, 3);
  const auto cls = classify_functions(patch, mesh, 0.5);
  for (auto c : cls.cls) CHECK(c == FuncClass::stable);
  CHECK(cls.n_stable == patch.basis.num_funcs());
}

TEST_CASE("classification: quartic basis trimmed at 10% of the end span") {
  const int p = 4, n = 6;
  const double h = 1.0 / n;
  const double cutoff = 1.0 - 0.9 * h;
  auto patch = make_patch(p, n, {halfplane_levelset(-1.0, 0.0, cutoff)});
  const auto mesh = mesh_for(patch, p);
  const auto cls = classify_functions(patch, mesh, 0.5);
  const int nu = patch.basis.num_u();
  const int jmid = patch.basis.num_v() / 2;
  for (int i = 0; i < nu; ++i) {
    const double lo = patch.basis.ku.knots[i];
    const double hi = patch.basis.ku.knots[i + p + 1];
    const double visible = std::max(0.0, std::min(cutoff, hi) - lo);
    const double rel = visible / (hi - lo);
    const FuncClass expect = visible <= 1e-14 ? FuncClass::exterior
                             : rel >= 0.5     ? FuncClass::stable
                                              : FuncClass::degenerate;
    CHECK(cls.cls[patch.basis.index(i, jmid)] == expect);
  }
  CHECK(cls.cls[patch.basis.index(nu - 1, jmid)] == FuncClass::degenerate);
  CHECK_THROWS(classify_functions(patch, mesh, 1.5));
}

TEST_CASE("extension matrix is the identity on an untrimmed patch") {
  auto patch = make_patch(3, 4, {});
  const auto mesh = mesh_for(patch, 3);
  const auto cls = classify_functions(patch, mesh, 0.5);
  const auto E = build_extension_matrix(patch, mesh, cls);
  CHECK(E.rows() == patch.basis.num_funcs());
  CHECK(E.cols() == patch.basis.num_funcs());
  CHECK(Eigen::MatrixXd(E).isApprox(Eigen::MatrixXd::Identity(E.rows(), E.cols()), 1e-14));
}

TEST_CASE("extended basis reproduces bivariate monomials on the visible domain") {
  for (int p : {3, 4}) {
    auto patch = make_patch(p, 6, {disk_levelset(Vec2(0.32, 0.47), 0.44)});
    const auto mesh = mesh_for(patch, p);
    const auto cls = classify_functions(patch, mesh, 0.5);
    const auto E = build_extension_matrix(patch, mesh, cls);

    Eigen::MatrixXd Ed(E);
    for (int f = 0; f < cls.num_funcs(); ++f)
      if (cls.cls[f] == FuncClass::exterior) CHECK(Ed.row(f).cwiseAbs().maxCoeff() == 0.0);

    const KnotVector& ku = patch.basis.ku;
    const int nu = ku.num_basis();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nu, nu);
    Eigen::VectorXd grev(nu);
    for (int i = 0; i < nu; ++i) {
      double g = 0.0;
      for (int k = 1; k <= p; ++k) g += ku.knots[i + k];
      grev[i] = g / p;
      const int span = ku.find_span(grev[i]);
      const Eigen::MatrixXd d = ku.eval_basis(grev[i], 0, span);
      for (int j = 0; j <= p; ++j) A(i, span - p + j) = d(0, j);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    auto coeffs_1d = [&](int mono) {
      Eigen::VectorXd rhs(nu);
      for (int i = 0; i < nu; ++i) rhs[i] = std::pow(grev[i], mono);
      return Eigen::VectorXd(lu.solve(rhs));
    };

    for (int a : {0, 1, p}) {
      for (int b : {0, 2, p}) {
        const Eigen::VectorXd cu = coeffs_1d(a), cv = coeffs_1d(b);
        Eigen::VectorXd cstable(cls.n_stable);
        for (int f = 0; f < cls.num_funcs(); ++f)
          if (cls.stable_ordinal[f] >= 0)
            cstable[cls.stable_ordinal[f]] = cu[f % nu] * cv[f / nu];
        const Eigen::VectorXd cfull = E * cstable;
        for (const auto& sd : mesh.spans)
          for (size_t k = 0; k < sd.pts.size(); k += 7) {
            const Vec2 xi = sd.pts[k].xi;
            const LocalBasis lb = eval_local_basis(patch.basis, xi.x(), xi.y(), 0);
            double val = 0.0;
            for (int l = 0; l < lb.count(); ++l)
              val += cfull[lb.global_index(patch.basis, l)] * lb.funcs[l].val();
            const double exact = std::pow(xi.x(), a) * std::pow(xi.y(), b);
            CHECK(val == doctest::Approx(exact).epsilon(1e-9));
          }
      }
    }
  }
}

TEST_CASE("1D Poisson on a trimmed interval matches the boundary-fitted solve") {
  // cubic manufactured solution lies in both spline spaces, so the trimmed
  // and boundary-fitted Galerkin solutions coincide to solver precision
  const double L = 0.83;
  const int p = 3, n = 8;
  auto f_rhs = [&](double x) { return 6.0 * x + 0.6 - 2.0 * L; };
  auto u_exact = [&](double x) { return x * (L - x) * (x + 0.3); };

  Eigen::VectorXd u_fit;
  KnotVector kfit = KnotVector::clamped_uniform(p, n, 0.0, L);
  {
    const int m = kfit.num_basis();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd F = Eigen::VectorXd::Zero(m);
    const auto& g = gauss_rule(p + 1);
    for (int span : kfit.nonempty_spans()) {
      const double a = kfit.knots[span], h = kfit.knots[span + 1] - a;
      for (const auto& gp : g) {
        const double x = a + h * gp.x;
        const Eigen::MatrixXd d = kfit.eval_basis(x, 1, span);
        for (int i = 0; i <= p; ++i)
          for (int j = 0; j <= p; ++j)
            K(span - p + i, span - p + j) += gp.w * h * d(1, i) * d(1, j);
        for (int i = 0; i <= p; ++i) F(span - p + i) += gp.w * h * d(0, i) * f_rhs(x);
      }
    }
    Eigen::MatrixXd Kr = K.block(1, 1, m - 2, m - 2);
    Eigen::VectorXd Fr = F.segment(1, m - 2);
    u_fit = Eigen::VectorXd::Zero(m);
    u_fit.segment(1, m - 2) = Kr.partialPivLu().solve(Fr);
  }

  KnotVector kv = KnotVector::clamped_uniform(p, n, 0.0, 1.0);
  const int m = kv.num_basis();
  std::vector<int> cls(m);
  int nstable = 0;
  for (int i = 0; i < m; ++i) {
    const double lo = kv.knots[i], hi = kv.knots[i + p + 1];
    const double vis = std::max(0.0, std::min(L, hi) - lo);
    cls[i] = vis <= 1e-14 ? 2 : (vis / (hi - lo) >= 0.5 ? 0 : 1);
    if (cls[i] == 0) ++nstable;
  }
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(m, nstable);
  std::vector<int> ord(m, -1);
  {
    int o = 0;
    for (int i = 0; i < m; ++i)
      if (cls[i] == 0) ord[i] = o++;
    for (int i = 0; i < m; ++i)
      if (cls[i] == 0) E(i, ord[i]) = 1.0;
    const auto spans = kv.nonempty_spans();
    auto all_stable = [&](int s) {
      for (int j = s - p; j <= s; ++j)
        if (cls[j] != 0) return false;
      return true;
    };
    for (size_t si = 0; si < spans.size(); ++si) {
      const int s = spans[si];
      if (kv.knots[s] >= L) continue;
      bool has_deg = false;
      for (int j = s - p; j <= s; ++j) has_deg |= (cls[j] == 1);
      if (!has_deg) continue;
      int donor = -1, best = 1 << 20;
      for (size_t dj = 0; dj < spans.size(); ++dj)
        if (all_stable(spans[dj]) && kv.knots[spans[dj]] < L &&
            std::abs(int(dj) - int(si)) < best) {
          best = std::abs(int(dj) - int(si));
          donor = spans[dj];
        }
      REQUIRE(donor >= 0);
      const Eigen::MatrixXd W = extrapolation_weights(kv, donor, s);
      for (int jl = 0; jl <= p; ++jl) {
        const int j = s - p + jl;
        if (cls[j] != 1 || E.row(j).cwiseAbs().maxCoeff() > 0.0) continue;
        for (int il = 0; il <= p; ++il) E(j, ord[donor - p + il]) = W(il, jl);
      }
    }
  }

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(m);
  const auto& g = gauss_rule(p + 2);
  for (int span : kv.nonempty_spans()) {
    const double a = kv.knots[span];
    const double b = std::min(kv.knots[span + 1], L);
    if (b <= a) continue;
    for (const auto& gp : g) {
      const double x = a + (b - a) * gp.x;
      const Eigen::MatrixXd d = kv.eval_basis(x, 1, span);
      for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j)
          K(span - p + i, span - p + j) += gp.w * (b - a) * d(1, i) * d(1, j);
      for (int i = 0; i <= p; ++i) F(span - p + i) += gp.w * (b - a) * d(0, i) * f_rhs(x);
    }
  }
  {
    const int span = kv.find_span(L - 1e-13);
    const Eigen::MatrixXd d = kv.eval_basis(L, 1, span);
    for (int i = 0; i <= p; ++i)
      for (int j = 0; j <= p; ++j)
        K(span - p + i, span - p + j) += -d(0, i) * d(1, j) + d(1, i) * d(0, j);
  }
  Eigen::MatrixXd Kst = E.transpose() * K * E;
  Eigen::VectorXd Fst = E.transpose() * F;
  const int ns = nstable;
  Eigen::MatrixXd Kr = Kst.block(1, 1, ns - 1, ns - 1);
  Eigen::VectorXd Fr = Fst.segment(1, ns - 1);
  Eigen::VectorXd ust = Eigen::VectorXd::Zero(ns);
  ust.segment(1, ns - 1) = Kr.partialPivLu().solve(Fr);
  const Eigen::VectorXd u_full = E * ust;

  for (double x : {0.1, 0.3, 0.45, 0.6, 0.77, 0.82}) {
    const double ut = eval_spline_1d(kv, u_full, x);
    const double uf = eval_spline_1d(kfit, u_fit, x);
    CHECK(std::abs(ut - uf) < 1e-8);
    CHECK(std::abs(ut - u_exact(x)) < 1e-9);
  }
  for (int i = 0; i < m; ++i)
    if (cls[i] == 2) CHECK(u_full[i] == 0.0);
}
