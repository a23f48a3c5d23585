#include "mqm/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace mqm {

struct Expr::Node {
  enum class K { Num, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Bump };
  K k = K::Num;
  double num = 0.0;
  int var = 0;
  int ipow = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using K = Expr::Node::K;
using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr mk(K k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->k = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr mk_num(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->k = K::Num;
  n->num = v;
  return n;
}

bool is_num(const NodePtr& n, double v) { return n->k == K::Num && n->num == v; }

double powi(double x, int e) {
  if (e < 0) {
    if (x == 0.0) throw DomainError("zero raised to a negative power");
    return 1.0 / powi(x, -e);
  }
  double acc = 1.0, base = x;
  int k = e;
  while (k > 0) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

double bump_scalar(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

NodePtr nneg(NodePtr a);

NodePtr nadd(NodePtr a, NodePtr b) {
  if (a->k == K::Num && b->k == K::Num) return mk_num(a->num + b->num);
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  return mk(K::Add, std::move(a), std::move(b));
}

NodePtr nsub(NodePtr a, NodePtr b) {
  if (a->k == K::Num && b->k == K::Num) return mk_num(a->num - b->num);
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return nneg(std::move(b));
  return mk(K::Sub, std::move(a), std::move(b));
}

NodePtr nmul(NodePtr a, NodePtr b) {
  if (a->k == K::Num && b->k == K::Num) return mk_num(a->num * b->num);
  if (is_num(a, 0.0) || is_num(b, 0.0)) return mk_num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  return mk(K::Mul, std::move(a), std::move(b));
}

NodePtr ndiv(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return mk_num(0.0);
  if (is_num(b, 1.0)) return a;
  if (a->k == K::Num && b->k == K::Num && b->num != 0.0)
    return mk_num(a->num / b->num);
  return mk(K::Div, std::move(a), std::move(b));
}

NodePtr nneg(NodePtr a) {
  if (a->k == K::Num) return mk_num(-a->num);
  if (a->k == K::Neg) return a->a;
  return mk(K::Neg, std::move(a));
}

NodePtr npow(NodePtr a, int e) {
  if (e == 1) return a;
  if (a->k == K::Num && (a->num != 0.0 || e > 0)) return mk_num(powi(a->num, e));
  if (e == 0) return mk_num(1.0);
  auto n = std::make_shared<Expr::Node>();
  n->k = K::Pow;
  n->ipow = e;
  n->a = std::move(a);
  return n;
}

NodePtr nfun(K k, NodePtr a) {
  if (a->k == K::Num) {
    switch (k) {
      case K::Sin: return mk_num(std::sin(a->num));
      case K::Cos: return mk_num(std::cos(a->num));
      case K::Exp: return mk_num(std::exp(a->num));
      case K::Bump: return mk_num(bump_scalar(a->num));
      default: break;
    }
  }
  return mk(k, std::move(a));
}

double eval_node(const Expr::Node* n, const Pt& p) {
  switch (n->k) {
    case K::Num: return n->num;
    case K::Var: return p[static_cast<std::size_t>(n->var)];
    case K::Add: return eval_node(n->a.get(), p) + eval_node(n->b.get(), p);
    case K::Sub: return eval_node(n->a.get(), p) - eval_node(n->b.get(), p);
    case K::Mul: {
      const double l = eval_node(n->a.get(), p);
      if (l == 0.0) return 0.0;
      return l * eval_node(n->b.get(), p);
    }
    case K::Div: {
      const double u = eval_node(n->a.get(), p);
      if (u == 0.0) return 0.0;
      const double d = eval_node(n->b.get(), p);
      if (d == 0.0) throw DomainError("division by zero at x=" + fmt17(p[0]) +
                                      ", y=" + fmt17(p[1]));
      return u / d;
    }
    case K::Neg: return -eval_node(n->a.get(), p);
    case K::Pow: return powi(eval_node(n->a.get(), p), n->ipow);
    case K::Sin: return std::sin(eval_node(n->a.get(), p));
    case K::Cos: return std::cos(eval_node(n->a.get(), p));
    case K::Exp: return std::exp(eval_node(n->a.get(), p));
    case K::Bump: return bump_scalar(eval_node(n->a.get(), p));
  }
  return 0.0;
}

NodePtr dnode(const NodePtr& n, int axis) {
  switch (n->k) {
    case K::Num: return mk_num(0.0);
    case K::Var: return mk_num(n->var == axis ? 1.0 : 0.0);
    case K::Add: return nadd(dnode(n->a, axis), dnode(n->b, axis));
    case K::Sub: return nsub(dnode(n->a, axis), dnode(n->b, axis));
    case K::Mul:
      return nadd(nmul(dnode(n->a, axis), n->b), nmul(n->a, dnode(n->b, axis)));
    case K::Div:
      return ndiv(nsub(nmul(dnode(n->a, axis), n->b), nmul(n->a, dnode(n->b, axis))),
                  npow(n->b, 2));
    case K::Neg: return nneg(dnode(n->a, axis));
    case K::Pow:
      return nmul(mk_num(static_cast<double>(n->ipow)),
                  nmul(npow(n->a, n->ipow - 1), dnode(n->a, axis)));
    case K::Sin: return nmul(nfun(K::Cos, n->a), dnode(n->a, axis));
    case K::Cos: return nneg(nmul(nfun(K::Sin, n->a), dnode(n->a, axis)));
    case K::Exp: return nmul(nfun(K::Exp, n->a), dnode(n->a, axis));
    case K::Bump:
      // bump'(t) = bump(t) * (-2t) / (1-t^2)^2, with the bump factor first so
      // the zero short-circuit protects the rational factor at |t| = 1
      return nmul(ndiv(nmul(nfun(K::Bump, n->a), nmul(mk_num(-2.0), n->a)),
                       npow(nsub(mk_num(1.0), nmul(n->a, n->a)), 2)),
                  dnode(n->a, axis));
  }
  return mk_num(0.0);
}

int prec(const Expr::Node* n) {
  switch (n->k) {
    case K::Add:
    case K::Sub: return 1;
    case K::Mul:
    case K::Div: return 2;
    case K::Neg: return 3;
    case K::Pow: return 4;
    case K::Num: return n->num < 0.0 ? 3 : 5;
    default: return 5;
  }
}

std::string pstr(const NodePtr& n, int parent) {
  std::string s;
  switch (n->k) {
    case K::Num: s = fmt17(n->num); break;
    case K::Var: s = n->var == 0 ? "x" : "y"; break;
    case K::Add: s = pstr(n->a, 1) + " + " + pstr(n->b, 2); break;
    case K::Sub: s = pstr(n->a, 1) + " - " + pstr(n->b, 2); break;
    case K::Mul: s = pstr(n->a, 2) + " * " + pstr(n->b, 3); break;
    case K::Div: s = pstr(n->a, 2) + " / " + pstr(n->b, 3); break;
    case K::Neg: s = "-" + pstr(n->a, 3); break;
    case K::Pow: s = pstr(n->a, 5) + "^" + std::to_string(n->ipow); break;
    case K::Sin: s = "sin(" + pstr(n->a, 0) + ")"; break;
    case K::Cos: s = "cos(" + pstr(n->a, 0) + ")"; break;
    case K::Exp: s = "exp(" + pstr(n->a, 0) + ")"; break;
    case K::Bump: s = "bump(" + pstr(n->a, 0) + ")"; break;
  }
  if (prec(n.get()) < parent) return "(" + s + ")";
  return s;
}

bool has_var(const Expr::Node* n) {
  if (!n) return false;
  if (n->k == K::Var) return true;
  return has_var(n->a.get()) || has_var(n->b.get());
}

struct Parser {
  const std::string& s;
  std::size_t i = 0;

  explicit Parser(const std::string& src) : s(src) {}

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  [[noreturn]] void fail(std::size_t off, const std::string& expected) {
    throw ParseError(off, expected);
  }

  NodePtr expr() {
    NodePtr l = term();
    while (true) {
      const char c = peek();
      if (c == '+') {
        ++i;
        l = nadd(l, term());
      } else if (c == '-') {
        ++i;
        l = nsub(l, term());
      } else {
        return l;
      }
    }
  }

  NodePtr term() {
    NodePtr l = factor();
    while (true) {
      const char c = peek();
      if (c == '*') {
        ++i;
        l = nmul(l, factor());
      } else if (c == '/') {
        ++i;
        l = ndiv(l, factor());
      } else {
        return l;
      }
    }
  }

  NodePtr factor() {
    NodePtr a = atom();
    if (peek() == '^') {
      ++i;
      return npow(a, exponent());
    }
    return a;
  }

  int exponent() {
    skip_ws();
    const std::size_t start = i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    const std::size_t digits = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == digits) fail(start, "integer exponent");
    const long v = std::strtol(s.c_str() + start, nullptr, 10);
    if (v > 64 || v < -64) fail(start, "integer exponent with magnitude <= 64");
    return static_cast<int>(v);
  }

  NodePtr atom() {
    skip_ws();
    if (i >= s.size()) fail(i, "number, coordinate, function, '(' or '-'");
    const char c = s[i];
    if (c == '-') {
      ++i;
      // unary minus binds looser than '^': -x^2 means -(x^2)
      return nneg(factor());
    }
    if (c == '(') {
      ++i;
      NodePtr e = expr();
      if (peek() != ')') fail(i, "')'");
      ++i;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    fail(i, "number, coordinate, function, '(' or '-'");
  }

  NodePtr number() {
    const std::size_t start = i;
    char* end = nullptr;
    const double v = std::strtod(s.c_str() + start, &end);
    if (end == s.c_str() + start) fail(start, "number");
    if (!std::isfinite(v)) fail(start, "finite number");
    i = static_cast<std::size_t>(end - s.c_str());
    return mk_num(v);
  }

  NodePtr ident() {
    const std::size_t start = i;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      ++i;
    const std::string name = s.substr(start, i - start);
    if (name == "x") return var_node(0);
    if (name == "y") return var_node(1);
    K k;
    if (name == "sin") k = K::Sin;
    else if (name == "cos") k = K::Cos;
    else if (name == "exp") k = K::Exp;
    else if (name == "bump") k = K::Bump;
    else fail(start, "one of x, y, sin, cos, exp, bump");
    if (peek() != '(') fail(i, "'(' after " + name);
    ++i;
    NodePtr arg = expr();
    if (peek() != ')') fail(i, "')'");
    ++i;
    return nfun(k, arg);
  }

  NodePtr var_node(int axis) {
    auto n = std::make_shared<Expr::Node>();
    n->k = K::Var;
    n->var = axis;
    return n;
  }

  NodePtr top() {
    NodePtr e = expr();
    skip_ws();
    if (i != s.size()) fail(i, "operator or end of input");
    return e;
  }
};

}  // namespace

Expr Expr::number(double v) { return Expr(mk_num(v)); }

Expr Expr::variable(int axis) {
  if (axis != 0 && axis != 1) throw InvalidParam("variable axis must be 0 or 1");
  auto n = std::make_shared<Node>();
  n->k = K::Var;
  n->var = axis;
  return Expr(NodePtr(std::move(n)));
}

Expr Expr::sin(const Expr& a) { return Expr(nfun(K::Sin, a.node_)); }
Expr Expr::cos(const Expr& a) { return Expr(nfun(K::Cos, a.node_)); }
Expr Expr::exp(const Expr& a) { return Expr(nfun(K::Exp, a.node_)); }
Expr Expr::bump(const Expr& a) { return Expr(nfun(K::Bump, a.node_)); }
Expr Expr::pow(int n) const { return Expr(npow(node_, n)); }

Expr operator+(const Expr& a, const Expr& b) { return Expr(nadd(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(nsub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(nmul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(ndiv(a.node_, b.node_)); }
Expr Expr::operator-() const { return Expr(nneg(node_)); }

bool Expr::is_zero_literal() const { return node_ && is_num(node_, 0.0); }
bool Expr::is_constant() const { return node_ && !has_var(node_.get()); }

double Expr::eval(const Pt& p) const {
  if (!node_) throw InvalidParam("evaluating an empty expression");
  return eval_node(node_.get(), p);
}

Expr Expr::derivative(int axis) const {
  if (!node_) throw InvalidParam("differentiating an empty expression");
  if (axis != 0 && axis != 1) throw InvalidParam("derivative axis must be 0 or 1");
  return Expr(dnode(node_, axis));
}

std::string Expr::str() const {
  if (!node_) return "<empty>";
  return pstr(node_, 0);
}

Expr parse_expr(const std::string& src) {
  Parser p(src);
  return Expr(p.top());
}

}  // namespace mqm
