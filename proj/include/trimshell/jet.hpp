#pragma once

#include <array>
#include <cassert>
#include <cmath>

namespace trimshell {

// Truncated bivariate Taylor expansion of a smooth function about a point.
//
// A Jet of order K stores the coefficients c[a][b] of
//   f(u0 + du, v0 + dv) = sum_{a+b<=K} c[a][b] du^a dv^b + O(h^{K+1})
// so c[a][b] = (d^{a+b} f / du^a dv^b) / (a! b!).  Arithmetic on jets yields the
// exact truncated expansion of the composite expression, which is how all
// higher-order surface derivatives in this project are obtained (no finite
// differences, no symbolic code).  Orders up to 4 are required by the
// fourth-order strong form; 6 leaves headroom.
class Jet {
public:
  static constexpr int kMaxOrder = 6;

  Jet() = default;
  explicit Jet(int order) : order_(order) { assert(order >= 0 && order <= kMaxOrder); }

  static Jet constant(double value, int order) {
    Jet j(order);
    j.c_[0][0] = value;
    return j;
  }
  // Seed jets for the two independent variables.
  static Jet var_u(double value, int order) {
    Jet j(order);
    j.c_[0][0] = value;
    if (order >= 1) j.c_[1][0] = 1.0;
    return j;
  }
  static Jet var_v(double value, int order) {
    Jet j(order);
    j.c_[0][0] = value;
    if (order >= 1) j.c_[0][1] = 1.0;
    return j;
  }

  int order() const { return order_; }
  double val() const { return c_[0][0]; }
  double coeff(int a, int b) const { return c_[a][b]; }
  void set_coeff(int a, int b, double v) { c_[a][b] = v; }

  // Partial derivative of the underlying function, valid to order-1.
  Jet du() const {
    Jet r(order_ > 0 ? order_ - 1 : 0);
    for (int a = 0; a + 1 <= order_; ++a)
      for (int b = 0; a + 1 + b <= order_; ++b)
        r.c_[a][b] = c_[a + 1][b] * (a + 1);
    return r;
  }
  Jet dv() const {
    Jet r(order_ > 0 ? order_ - 1 : 0);
    for (int a = 0; a <= order_ - 1; ++a)
      for (int b = 0; a + b <= order_ - 1; ++b)
        r.c_[a][b] = c_[a][b + 1] * (b + 1);
    return r;
  }

  // Derivative value d^{a+b} f / du^a dv^b at the expansion point.
  double deriv(int a, int b) const {
    assert(a + b <= order_);
    return c_[a][b] * factorial(a) * factorial(b);
  }

  Jet operator-() const {
    Jet r = *this;
    for (int a = 0; a <= order_; ++a)
      for (int b = 0; a + b <= order_; ++b) r.c_[a][b] = -r.c_[a][b];
    return r;
  }

  Jet& operator+=(const Jet& o) { return inplace(o, +1.0); }
  Jet& operator-=(const Jet& o) { return inplace(o, -1.0); }
  Jet& operator+=(double s) { c_[0][0] += s; return *this; }
  Jet& operator-=(double s) { c_[0][0] -= s; return *this; }
  Jet& operator*=(double s) {
    for (int a = 0; a <= order_; ++a)
      for (int b = 0; a + b <= order_; ++b) c_[a][b] *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
  friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
  friend Jet operator+(Jet a, double s) { a += s; return a; }
  friend Jet operator+(double s, Jet a) { a += s; return a; }
  friend Jet operator-(Jet a, double s) { a -= s; return a; }
  friend Jet operator-(double s, const Jet& a) { Jet r = -a; r += s; return r; }
  friend Jet operator*(Jet a, double s) { a *= s; return a; }
  friend Jet operator*(double s, Jet a) { a *= s; return a; }
  friend Jet operator/(Jet a, double s) { a *= 1.0 / s; return a; }

  friend Jet operator*(const Jet& x, const Jet& y) {
    const int k = std::min(x.order_, y.order_);
    Jet r(k);
    for (int a1 = 0; a1 <= std::min(x.order_, k); ++a1)
      for (int b1 = 0; a1 + b1 <= std::min(x.order_, k); ++b1) {
        const double c1 = x.c_[a1][b1];
        if (c1 == 0.0) continue;
        for (int a2 = 0; a1 + a2 <= k; ++a2)
          for (int b2 = 0; a1 + b1 + a2 + b2 <= k; ++b2)
            r.c_[a1 + a2][b1 + b2] += c1 * y.c_[a2][b2];
      }
    return r;
  }

  friend Jet operator/(const Jet& x, const Jet& y) { return x * y.reciprocal(); }

  // f(this) where outer[k] = f^{(k)}(val())/k!.  Horner on the nilpotent part.
  Jet compose(const double* outer, int n_outer) const {
    Jet h = *this;
    h.c_[0][0] = 0.0;
    Jet r = Jet::constant(outer[n_outer - 1], order_);
    for (int k = n_outer - 2; k >= 0; --k) {
      r = r * h;
      r += outer[k];
    }
    return r;
  }

  Jet reciprocal() const {
    assert(val() != 0.0);
    double outer[kMaxOrder + 1];
    const double inv = 1.0 / val();
    double t = inv;
    for (int k = 0; k <= order_; ++k) {
      outer[k] = t;
      t *= -inv;
    }
    return compose(outer, order_ + 1);
  }

  friend Jet sqrt(const Jet& x) { return x.power(0.5); }
  friend Jet sin(const Jet& x) {
    double outer[kMaxOrder + 1];
    const double s = std::sin(x.val()), c = std::cos(x.val());
    double f = 1.0;
    for (int k = 0; k <= x.order_; ++k) {
      if (k > 0) f *= k;
      const double d = (k % 4 == 0) ? s : (k % 4 == 1) ? c : (k % 4 == 2) ? -s : -c;
      outer[k] = d / f;
    }
    return x.compose(outer, x.order_ + 1);
  }
  friend Jet cos(const Jet& x) {
    double outer[kMaxOrder + 1];
    const double s = std::sin(x.val()), c = std::cos(x.val());
    double f = 1.0;
    for (int k = 0; k <= x.order_; ++k) {
      if (k > 0) f *= k;
      const double d = (k % 4 == 0) ? c : (k % 4 == 1) ? -s : (k % 4 == 2) ? -c : s;
      outer[k] = d / f;
    }
    return x.compose(outer, x.order_ + 1);
  }
  friend Jet abs(const Jet& x) { return x.val() < 0.0 ? -x : x; }
  friend Jet pow(const Jet& x, double e) { return x.power(e); }

private:
  Jet power(double alpha) const {
    assert(val() > 0.0);
    double outer[kMaxOrder + 1];
    double t = std::pow(val(), alpha);
    for (int k = 0; k <= order_; ++k) {
      outer[k] = t;
      t *= (alpha - k) / (k + 1) / val();
    }
    return compose(outer, order_ + 1);
  }

  Jet& inplace(const Jet& o, double sign) {
    order_ = std::min(order_, o.order_);
    for (int a = 0; a <= order_; ++a)
      for (int b = 0; a + b <= order_; ++b) c_[a][b] += sign * o.c_[a][b];
    return *this;
  }

  static double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }

  int order_ = 0;
  std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1> c_{};
};

}  // namespace trimshell
