#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "trimshell/spline.hpp"

namespace trimshell {

// Scalar trimming function on the parameter rectangle; the visible side is
// phi >= 0.  Implementations evaluate in jet arithmetic so gradients (and the
// higher derivatives used by tests) come from the same definition.
class LevelSet {
public:
  virtual ~LevelSet() = default;
  virtual Jet eval(const Jet& r, const Jet& s) const = 0;

  double value(double r, double s) const { return eval(Jet::var_u(r, 0), Jet::var_v(s, 0)).val(); }
  Vec2 gradient(double r, double s) const {
    const Jet j = eval(Jet::var_u(r, 1), Jet::var_v(s, 1));
    return Vec2(j.deriv(1, 0), j.deriv(0, 1));
  }
};

class AnalyticLevelSet final : public LevelSet {
public:
  using Fn = std::function<Jet(const Jet&, const Jet&)>;
  explicit AnalyticLevelSet(Fn f) : f_(std::move(f)) {}
  Jet eval(const Jet& r, const Jet& s) const override { return f_(r, s); }

private:
  Fn f_;
};

// phi = (a, b) . (r, s) + c : straight trimming line, visible where positive.
std::shared_ptr<LevelSet> halfplane_levelset(double a, double b, double c);
// phi = radius - |(r, s) - center| : disk of visibility.
std::shared_ptr<LevelSet> disk_levelset(Vec2 center, double radius);

// Arithmetic expressions over (r, s) with + - * / ^, sin cos sqrt abs norm,
// parsed once into an AST and evaluated on jets.  norm(a, b) = sqrt(a^2+b^2).
std::shared_ptr<LevelSet> parse_levelset_expression(const std::string& expr);

}  // namespace trimshell
