#pragma once

#include <memory>
#include <string>

#include "mqm/errors.hpp"
#include "mqm/types.hpp"

namespace mqm {

// Immutable expression tree over chart coordinates x (and y in 2-d).
//
// Grammar:  expr   := term (('+'|'-') term)*
//           term   := factor (('*'|'/') factor)*
//           factor := atom ('^' int)?
//           atom   := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')' | '-' atom
//           func   := sin | cos | exp | bump
// bump(t) = exp(1 - 1/(1-t^2)) for |t| < 1, else 0.
//
// Evaluation is total on field supports: multiplication returns zero without
// evaluating its right factor when the left factor is exactly zero, and
// division returns zero without evaluating its denominator when the
// numerator is exactly zero. This makes derivatives of bump (which pair a
// vanishing bump factor with a rational factor singular at |t| = 1)
// well-defined on the closure of the support.
class Expr {
 public:
  Expr() = default;

  static Expr number(double v);
  static Expr variable(int axis);  // 0 = x, 1 = y
  static Expr sin(const Expr& a);
  static Expr cos(const Expr& a);
  static Expr exp(const Expr& a);
  static Expr bump(const Expr& a);
  Expr pow(int n) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;

  bool valid() const { return node_ != nullptr; }
  bool is_zero_literal() const;
  bool is_constant() const;  // structurally: no variable nodes

  double eval(const Pt& p) const;  // throws DomainError
  Expr derivative(int axis) const;
  std::string str() const;

  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  const Node* node() const { return node_.get(); }

 private:
  std::shared_ptr<const Node> node_;
};

Expr parse_expr(const std::string& src);  // throws ParseError

}  // namespace mqm
