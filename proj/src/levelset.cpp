#include "trimshell/levelset.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace trimshell {

std::shared_ptr<LevelSet> halfplane_levelset(double a, double b, double c) {
  return std::make_shared<AnalyticLevelSet>(
      [=](const Jet& r, const Jet& s) { return a * r + b * s + c; });
}

std::shared_ptr<LevelSet> disk_levelset(Vec2 center, double radius) {
  return std::make_shared<AnalyticLevelSet>([=](const Jet& r, const Jet& s) {
    const Jet dx = r - center.x();
    const Jet dy = s - center.y();
    return radius - sqrt(dx * dx + dy * dy);
  });
}

namespace {

// minimal recursive-descent parser for trimming expressions
struct Node {
  enum Kind { kNum, kVarR, kVarS, kAdd, kSub, kMul, kDiv, kPow, kNeg, kCall } kind;
  double num = 0.0;
  std::string fn;
  std::vector<std::unique_ptr<Node>> args;
};

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  std::unique_ptr<Node> parse() {
    auto n = expr();
    skip_ws();
    if (pos_ != s_.size()) throw std::invalid_argument("trailing input in expression");
    return n;
  }

private:
  std::unique_ptr<Node> expr() {
    auto lhs = term();
    for (;;) {
      skip_ws();
      if (accept('+')) {
        lhs = binary(Node::kAdd, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = binary(Node::kSub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }
  std::unique_ptr<Node> term() {
    auto lhs = unary();
    for (;;) {
      skip_ws();
      if (accept('*')) {
        lhs = binary(Node::kMul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = binary(Node::kDiv, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }
  std::unique_ptr<Node> unary() {
    skip_ws();
    if (accept('-')) {
      auto n = std::make_unique<Node>();
      n->kind = Node::kNeg;
      n->args.push_back(unary());
      return n;
    }
    accept('+');
    return power();
  }
  std::unique_ptr<Node> power() {
    auto base = atom();
    skip_ws();
    if (accept('^')) {
      return binary(Node::kPow, std::move(base), unary());  // right-assoc
    }
    return base;
  }
  std::unique_ptr<Node> atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw std::invalid_argument("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      const double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      auto n = std::make_unique<Node>();
      n->kind = Node::kNum;
      n->num = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string name;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_])))
        name += s_[pos_++];
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        if (name != "sin" && name != "cos" && name != "sqrt" && name != "abs" &&
            name != "norm")
          throw std::invalid_argument("unknown function '" + name + "'");
        auto n = std::make_unique<Node>();
        n->kind = Node::kCall;
        n->fn = name;
        ++pos_;
        n->args.push_back(expr());
        skip_ws();
        while (accept(',')) n->args.push_back(expr());
        expect(')');
        return n;
      }
      auto n = std::make_unique<Node>();
      if (name == "r") {
        n->kind = Node::kVarR;
      } else if (name == "s") {
        n->kind = Node::kVarS;
      } else {
        throw std::invalid_argument("unknown identifier '" + name + "'");
      }
      return n;
    }
    throw std::invalid_argument(std::string("unexpected character '") + c + "'");
  }

  std::unique_ptr<Node> binary(Node::Kind k, std::unique_ptr<Node> a, std::unique_ptr<Node> b) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return n;
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw std::invalid_argument(std::string("expected '") + c + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

Jet eval_node(const Node& n, const Jet& r, const Jet& s) {
  switch (n.kind) {
    case Node::kNum: return Jet::constant(n.num, r.order());
    case Node::kVarR: return r;
    case Node::kVarS: return s;
    case Node::kAdd: return eval_node(*n.args[0], r, s) + eval_node(*n.args[1], r, s);
    case Node::kSub: return eval_node(*n.args[0], r, s) - eval_node(*n.args[1], r, s);
    case Node::kMul: return eval_node(*n.args[0], r, s) * eval_node(*n.args[1], r, s);
    case Node::kDiv: return eval_node(*n.args[0], r, s) / eval_node(*n.args[1], r, s);
    case Node::kNeg: return -eval_node(*n.args[0], r, s);
    case Node::kPow: {
      const Jet base = eval_node(*n.args[0], r, s);
      const Node& e = *n.args[1];
      if (e.kind == Node::kNum && e.num == std::floor(e.num) && e.num >= 0.0) {
        Jet acc = Jet::constant(1.0, base.order());
        for (int i = 0; i < static_cast<int>(e.num); ++i) acc = acc * base;
        return acc;
      }
      return pow(base, eval_node(e, r, s).val());
    }
    case Node::kCall: {
      if (n.fn == "norm") {
        Jet acc = Jet::constant(0.0, r.order());
        for (const auto& a : n.args) {
          const Jet x = eval_node(*a, r, s);
          acc += x * x;
        }
        return sqrt(acc);
      }
      if (n.args.size() != 1) throw std::invalid_argument("function expects one argument");
      const Jet x = eval_node(*n.args[0], r, s);
      if (n.fn == "sin") return sin(x);
      if (n.fn == "cos") return cos(x);
      if (n.fn == "sqrt") return sqrt(x);
      if (n.fn == "abs") return abs(x);
      throw std::invalid_argument("unknown function '" + n.fn + "'");
    }
  }
  throw std::logic_error("unreachable");
}

class ExpressionLevelSet final : public LevelSet {
public:
  explicit ExpressionLevelSet(std::unique_ptr<Node> root) : root_(std::move(root)) {}
  Jet eval(const Jet& r, const Jet& s) const override { return eval_node(*root_, r, s); }

private:
  std::unique_ptr<Node> root_;
};

}  // namespace

std::shared_ptr<LevelSet> parse_levelset_expression(const std::string& expr) {
  Parser p(expr);
  return std::make_shared<ExpressionLevelSet>(p.parse());
}

}  // namespace trimshell
