#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "latsym/grad.hpp"
#include "latsym/jets.hpp"

namespace latsym {

struct ParseError : std::runtime_error {
  int offset;
  ParseError(const std::string& msg, int off)
      : std::runtime_error(msg), offset(off) {}
};

enum class NodeKind { Lit, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Fn { Exp, Log, Sin, Cos, Sqrt };

struct ExprNode {
  NodeKind kind;
  double lit = 0;
  std::string name;  // variable name
  Fn fn = Fn::Exp;
  std::shared_ptr<const ExprNode> a, b;
  int offset = 0;  // byte offset in the original source, -1 for built trees
};

template <class S>
struct ScalarOps;  // constant(), value(), exp() ... per scalar type

/// Immutable expression tree over t, n, m, x1..x8 with arithmetic and
/// exp/log/sin/cos/sqrt/pow.  Evaluation is pure; the same tree may be
/// evaluated from many threads concurrently.
class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view src);
  static Expr literal(double v);
  static Expr var(const std::string& name);
  static Expr call(Fn f, Expr arg);
  static Expr pow(Expr base, Expr exponent);

  friend Expr operator+(const Expr& a, const Expr& b) {
    return binary(NodeKind::Add, a, b);
  }
  friend Expr operator-(const Expr& a, const Expr& b) {
    return binary(NodeKind::Sub, a, b);
  }
  friend Expr operator*(const Expr& a, const Expr& b) {
    return binary(NodeKind::Mul, a, b);
  }
  friend Expr operator/(const Expr& a, const Expr& b) {
    return binary(NodeKind::Div, a, b);
  }
  friend Expr operator-(const Expr& a);

  bool empty() const { return !root_; }
  const ExprNode* root() const { return root_.get(); }

  /// Canonical fully parenthesized form; parse(str()) evaluates identically.
  std::string str() const;

  bool is_literal(double v) const;
  bool uses_var(std::string_view name) const;
  std::vector<std::string> variables() const;

  /// Generic evaluation.  `vars` maps variable names to scalar values; an
  /// unbound variable raises DomainError with the node offset.
  template <class S>
  S eval(const std::vector<std::pair<std::string, S>>& vars) const;

  double eval_site(int n, int m) const;
  Jet3 eval_time(double t, int n = 0, int m = 0) const;
  Taylor eval_taylor(double t, int order, int n = 0, int m = 0) const;

 private:
  static Expr binary(NodeKind k, const Expr& a, const Expr& b);
  std::shared_ptr<const ExprNode> root_;
};

/// Value and exact partial derivatives with respect to named arguments.
/// The partial of an argument the expression does not use is exactly 0.
struct Gradient {
  double value = 0;
  std::vector<std::pair<std::string, double>> partials;
  double partial(std::string_view name) const;
};

Gradient eval_grad(const Expr& e,
                   const std::vector<std::pair<std::string, double>>& args);

// scalar adapters for the generic evaluator ---------------------------------

template <>
struct ScalarOps<double> {
  static double constant(double v) { return v; }
  static double value(double v) { return v; }
  static double exp_(double x) { return std::exp(x); }
  static double log_(double x) { return std::log(x); }
  static double sin_(double x) { return std::sin(x); }
  static double cos_(double x) { return std::cos(x); }
  static double sqrt_(double x) { return std::sqrt(x); }
  static double pow_(double a, double b) { return std::pow(a, b); }
  static double pow_int_(double a, long e) {
    double acc = 1, base = a;
    bool inv = e < 0;
    unsigned long n = inv ? -(unsigned long)e : (unsigned long)e;
    while (n) {
      if (n & 1) acc *= base;
      base *= base;
      n >>= 1;
    }
    return inv ? 1.0 / acc : acc;
  }
};

template <>
struct ScalarOps<Taylor> {
  // the order of constants must match the surrounding computation; the
  // evaluator threads a prototype through `constant`.
  static Taylor exp_(const Taylor& x) { return exp(x); }
  static Taylor log_(const Taylor& x) { return log(x); }
  static Taylor sin_(const Taylor& x) { return sin(x); }
  static Taylor cos_(const Taylor& x) { return cos(x); }
  static Taylor sqrt_(const Taylor& x) { return sqrt(x); }
  static Taylor pow_(const Taylor& a, const Taylor& b) { return pow(a, b); }
  static Taylor pow_int_(const Taylor& a, long e) { return pow_int(a, e); }
  static double value(const Taylor& x) { return x.value(); }
};

template <int N>
struct ScalarOps<Grad<N>> {
  static Grad<N> constant(double v) { return Grad<N>::constant(v); }
  static double value(const Grad<N>& x) { return x.v; }
  static Grad<N> exp_(const Grad<N>& x) { return exp(x); }
  static Grad<N> log_(const Grad<N>& x) { return log(x); }
  static Grad<N> sin_(const Grad<N>& x) { return sin(x); }
  static Grad<N> cos_(const Grad<N>& x) { return cos(x); }
  static Grad<N> sqrt_(const Grad<N>& x) { return sqrt(x); }
  static Grad<N> pow_(const Grad<N>& a, const Grad<N>& b) { return pow(a, b); }
  static Grad<N> pow_int_(const Grad<N>& a, long e) { return pow_int(a, e); }
};

}  // namespace latsym
