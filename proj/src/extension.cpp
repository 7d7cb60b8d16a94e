#include "trimshell/extension.hpp"

#include <algorithm>
#include <cmath>

namespace trimshell {

BasisClassification classify_functions(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                                       double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
  const TensorBasis& tb = patch.basis;
  const int p1 = tb.ku.degree, p2 = tb.kv.degree;
  const int nf = tb.num_funcs();

  BasisClassification out;
  out.alpha = alpha;
  out.cls.assign(nf, FuncClass::exterior);
  out.rel_support.assign(nf, 0.0);
  out.rel_span_max.assign(nf, 0.0);
  out.stable_ordinal.assign(nf, -1);

  std::vector<double> visible(nf, 0.0), total(nf, 0.0);
  for (const auto& sd : mesh.spans) {
    const double span_area = (sd.r1 - sd.r0) * (sd.s1 - sd.s0);
    for (int b = 0; b <= p2; ++b)
      for (int a = 0; a <= p1; ++a) {
        const int f = tb.index(sd.span_u - p1 + a, sd.span_v - p2 + b);
        visible[f] += sd.visible_area_param;
        total[f] += span_area;
      }
  }

  // visible extent per direction: sum of span widths weighted by the best
  // visible fraction across the transverse spans of the support
  const int su = mesh.nspans_u, sv = mesh.nspans_v;
  std::vector<double> frac(su * sv, 0.0);
  for (const auto& sd : mesh.spans)
    frac[sd.iu + su * sd.iv] =
        sd.visible_area_param / ((sd.r1 - sd.r0) * (sd.s1 - sd.s0));
  // map knot-span index -> span grid coordinate
  std::vector<int> grid_u(tb.ku.knots.size(), -1), grid_v(tb.kv.knots.size(), -1);
  for (const auto& sd : mesh.spans) {
    grid_u[sd.span_u] = sd.iu;
    grid_v[sd.span_v] = sd.iv;
  }

  for (int j = 0; j < tb.num_v(); ++j)
    for (int i = 0; i < tb.num_u(); ++i) {
      const int f = tb.index(i, j);
      if (total[f] <= 0.0) continue;
      out.rel_support[f] = visible[f] / total[f];
      if (visible[f] <= 1e-14 * total[f]) {
        out.cls[f] = FuncClass::exterior;
        continue;
      }
      // a function keeps its conditioning as long as one knot span of its
      // support retains a visible fraction of at least alpha; this keeps the
      // degenerate layer one function deep regardless of where the trimming
      // curve falls within a span
      double best = 0.0;
      for (int k = i; k <= i + p1; ++k) {
        if (tb.ku.knots[k + 1] <= tb.ku.knots[k] || grid_u[k] < 0) continue;
        for (int l = j; l <= j + p2; ++l) {
          if (tb.kv.knots[l + 1] <= tb.kv.knots[l] || grid_v[l] < 0) continue;
          best = std::max(best, frac[grid_u[k] + su * grid_v[l]]);
        }
      }
      out.rel_span_max[f] = std::min(1.0, best);
      out.cls[f] = out.rel_span_max[f] >= alpha ? FuncClass::stable
                                                   : FuncClass::degenerate;
    }
  for (int f = 0; f < nf; ++f)
    if (out.cls[f] == FuncClass::stable) out.stable_ordinal[f] = out.n_stable++;
  if (out.n_stable == 0)
    throw std::runtime_error("no stable basis functions; the configuration is unsolvable");
  return out;
}

namespace {

bool has_all_stable_span(const TrimmedPatch& patch, const IntegrationMesh& mesh,
                         const BasisClassification& cls) {
  const TensorBasis& tb = patch.basis;
  const int p1 = tb.ku.degree, p2 = tb.kv.degree;
  for (const auto& sd : mesh.spans) {
    if (sd.cls == SpanClass::outside) continue;
    bool ok = true;
    for (int b = 0; b <= p2 && ok; ++b)
      for (int a = 0; a <= p1; ++a)
        if (cls.cls[tb.index(sd.span_u - p1 + a, sd.span_v - p2 + b)] != FuncClass::stable) {
          ok = false;
          break;
        }
    if (ok) return true;
  }
  return false;
}

}  // namespace

BasisClassification classify_with_donor_guarantee(const TrimmedPatch& patch,
                                                  const IntegrationMesh& mesh, double alpha) {
  BasisClassification cls = classify_functions(patch, mesh, alpha);
  if (has_all_stable_span(patch, mesh, cls)) return cls;
  const TensorBasis& tb = patch.basis;
  const int p1 = tb.ku.degree, p2 = tb.kv.degree;
  // largest threshold for which some span turns all-stable
  double alpha_max = 0.0;
  for (const auto& sd : mesh.spans) {
    if (sd.cls == SpanClass::outside) continue;
    double span_min = std::numeric_limits<double>::infinity();
    for (int b = 0; b <= p2; ++b)
      for (int a = 0; a <= p1; ++a)
        span_min = std::min(
            span_min, cls.rel_span_max[tb.index(sd.span_u - p1 + a, sd.span_v - p2 + b)]);
    alpha_max = std::max(alpha_max, span_min);
  }
  BasisClassification relaxed = classify_functions(patch, mesh, 0.95 * alpha_max);
  if (has_all_stable_span(patch, mesh, relaxed)) return relaxed;
  return classify_functions(patch, mesh, 1e-6);
}

Eigen::MatrixXd power_coeffs(const KnotVector& kv, int span) {
  const int p = kv.degree;
  const double h = kv.knots[span + 1] - kv.knots[span];
  if (!(h > 0.0)) throw std::invalid_argument("empty span in power_coeffs");
  // Taylor expansion about the left end of the span, scaled to r in [0,1):
  // a_c = h^c B^(c)(u_s) / c!
  const Eigen::MatrixXd ders = kv.eval_basis(kv.knots[span], p, span);
  Eigen::MatrixXd A(p + 1, p + 1);
  double hc = 1.0, fct = 1.0;
  for (int c = 0; c <= p; ++c) {
    if (c > 0) {
      hc *= h;
      fct *= c;
    }
    for (int i = 0; i <= p; ++i) A(c, i) = ders(c, i) * hc / fct;
  }
  return A;
}

Eigen::VectorXd newton_poly_coeffs(const std::vector<double>& local_knots) {
  const int p = static_cast<int>(local_knots.size());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  beta[0] = 1.0;
  int deg = 0;
  for (double rk : local_knots) {
    // multiply by (r - rk)
    for (int c = deg + 1; c >= 1; --c) beta[c] = beta[c - 1] - rk * beta[c];
    beta[0] = -rk * beta[0];
    ++deg;
  }
  return beta;
}

Eigen::MatrixXd extrapolation_weights(const KnotVector& kv, int donor_span, int trimmed_span) {
  const int p = kv.degree;
  const double hs = kv.knots[donor_span + 1] - kv.knots[donor_span];
  const double ht = kv.knots[trimmed_span + 1] - kv.knots[trimmed_span];
  if (!(hs > 0.0 && ht > 0.0)) throw std::invalid_argument("empty span");

  // donor segments in the trimmed span's local frame: r_donor = t0 + t1 * r
  const double t0 = (kv.knots[trimmed_span] - kv.knots[donor_span]) / hs;
  const double t1 = ht / hs;
  const Eigen::MatrixXd A_donor = power_coeffs(kv, donor_span);
  Eigen::MatrixXd A(p + 1, p + 1);
  {
    // powers of (t0 + t1 r)
    Eigen::MatrixXd pw = Eigen::MatrixXd::Zero(p + 1, p + 1);  // pw(k, c): coeff of r^c in (t0+t1 r)^k
    pw(0, 0) = 1.0;
    for (int k = 1; k <= p; ++k)
      for (int c = 0; c <= k; ++c)
        pw(k, c) = t0 * pw(k - 1, c) + (c > 0 ? t1 * pw(k - 1, c - 1) : 0.0);
    for (int i = 0; i <= p; ++i)
      for (int c = 0; c <= p; ++c) {
        double acc = 0.0;
        for (int k = c; k <= p; ++k) acc += A_donor(k, i) * pw(k, c);
        A(c, i) = acc;
      }
  }

  double pfac = 1.0;
  for (int k = 2; k <= p; ++k) pfac *= k;

  Eigen::MatrixXd E(p + 1, p + 1);
  for (int jl = 0; jl <= p; ++jl) {
    const int j = trimmed_span - p + jl;
    std::vector<double> local(p);
    for (int d = 1; d <= p; ++d) local[d - 1] = (kv.knots[j + d] - kv.knots[trimmed_span]) / ht;
    const Eigen::VectorXd beta = newton_poly_coeffs(local);
    for (int il = 0; il <= p; ++il) {
      double e = 0.0;
      double cf = 1.0, pcf = pfac;  // c! and (p-c)!
      for (int c = 0; c <= p; ++c) {
        if (c > 0) {
          cf *= c;
          pcf /= (p - c + 1);
        }
        const double sign = (c % 2 == 0) ? 1.0 : -1.0;
        e += sign * pcf * beta[p - c] * cf * A(c, il);
      }
      E(il, jl) = e / pfac;
    }
  }
  return E;
}

namespace {

struct SpanFuncs {
  // local function index ranges of a mesh span
  int first_u, first_v, p1, p2;
};

}  // namespace

Eigen::SparseMatrix<double> build_extension_matrix(const TrimmedPatch& patch,
                                                   const IntegrationMesh& mesh,
                                                   const BasisClassification& cls) {
  const TensorBasis& tb = patch.basis;
  const int p1 = tb.ku.degree, p2 = tb.kv.degree;
  const int nf = tb.num_funcs();

  auto all_stable = [&](const SpanData& sd) {
    for (int b = 0; b <= p2; ++b)
      for (int a = 0; a <= p1; ++a)
        if (cls.cls[tb.index(sd.span_u - p1 + a, sd.span_v - p2 + b)] != FuncClass::stable)
          return false;
    return true;
  };

  std::vector<const SpanData*> donors;
  for (const auto& sd : mesh.spans)
    if (sd.cls != SpanClass::outside && all_stable(sd)) donors.push_back(&sd);

  std::vector<Eigen::Triplet<double>> trip;
  for (int f = 0; f < nf; ++f)
    if (cls.cls[f] == FuncClass::stable) trip.emplace_back(f, cls.stable_ordinal[f], 1.0);

  std::vector<char> assigned(nf, 0);
  for (const auto& sd : mesh.spans) {
    if (sd.cls == SpanClass::outside) continue;
    bool has_degenerate = false;
    for (int b = 0; b <= p2 && !has_degenerate; ++b)
      for (int a = 0; a <= p1; ++a)
        if (cls.cls[tb.index(sd.span_u - p1 + a, sd.span_v - p2 + b)] == FuncClass::degenerate) {
          has_degenerate = true;
          break;
        }
    if (!has_degenerate) continue;

    // nearest all-stable donor span: Chebyshev distance, ties resolved by the
    // Manhattan distance (an axis-aligned donor extends in one direction only,
    // keeping the weights small), then toward lower span indices
    const SpanData* donor = nullptr;
    long best = std::numeric_limits<long>::max();
    for (const SpanData* cand : donors) {
      const int du = std::abs(cand->iu - sd.iu), dv = std::abs(cand->iv - sd.iv);
      const long key = (static_cast<long>(std::max(du, dv)) << 20) + (du + dv);
      if (key < best) {
        best = key;
        donor = cand;
      }
    }
    if (!donor)
      throw std::runtime_error("no span with only stable functions; configuration unsolvable");

    const Eigen::MatrixXd Wu = extrapolation_weights(tb.ku, donor->span_u, sd.span_u);
    const Eigen::MatrixXd Wv = extrapolation_weights(tb.kv, donor->span_v, sd.span_v);

    for (int b = 0; b <= p2; ++b)
      for (int a = 0; a <= p1; ++a) {
        const int f = tb.index(sd.span_u - p1 + a, sd.span_v - p2 + b);
        if (cls.cls[f] != FuncClass::degenerate || assigned[f]) continue;
        assigned[f] = 1;
        for (int bb = 0; bb <= p2; ++bb)
          for (int aa = 0; aa <= p1; ++aa) {
            const int fs = tb.index(donor->span_u - p1 + aa, donor->span_v - p2 + bb);
            const double w = Wu(aa, a) * Wv(bb, b);
            if (std::abs(w) < 1e-140) continue;
            const double scale = tb.rational() ? tb.weight(fs) / tb.weight(f) : 1.0;
            trip.emplace_back(f, cls.stable_ordinal[fs], w * scale);
          }
      }
  }

  Eigen::SparseMatrix<double> E(nf, cls.n_stable);
  E.setFromTriplets(trip.begin(), trip.end());
  return E;
}

Eigen::SparseMatrix<double> selection_matrix(const BasisClassification& cls,
                                             bool keep_degenerate) {
  std::vector<Eigen::Triplet<double>> trip;
  int col = 0;
  for (int f = 0; f < cls.num_funcs(); ++f) {
    const bool keep = cls.cls[f] == FuncClass::stable ||
                      (keep_degenerate && cls.cls[f] == FuncClass::degenerate);
    if (keep) trip.emplace_back(f, col++, 1.0);
  }
  Eigen::SparseMatrix<double> E(cls.num_funcs(), col);
  E.setFromTriplets(trip.begin(), trip.end());
  return E;
}

Eigen::SparseMatrix<double> expand_for_components(const Eigen::SparseMatrix<double>& E,
                                                  int ncomp) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(E.nonZeros() * ncomp);
  for (int k = 0; k < E.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(E, k); it; ++it)
      for (int c = 0; c < ncomp; ++c)
        trip.emplace_back(ncomp * it.row() + c, ncomp * it.col() + c, it.value());
  Eigen::SparseMatrix<double> E3(E.rows() * ncomp, E.cols() * ncomp);
  E3.setFromTriplets(trip.begin(), trip.end());
  return E3;
}

}  // namespace trimshell
