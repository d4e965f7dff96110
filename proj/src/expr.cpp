#include "latsym/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace latsym {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

struct Parser {
  std::string_view src;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg, size_t at) {
    throw ParseError(msg + " at byte " + std::to_string(at), (int)at);
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace((unsigned char)src[pos])) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      size_t at = pos;
      if (eat('+'))
        lhs = make_node({NodeKind::Add, 0, "", Fn::Exp, lhs, parse_term(), (int)at});
      else if (eat('-'))
        lhs = make_node({NodeKind::Sub, 0, "", Fn::Exp, lhs, parse_term(), (int)at});
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      size_t at = pos;
      if (eat('*'))
        lhs = make_node({NodeKind::Mul, 0, "", Fn::Exp, lhs, parse_unary(), (int)at});
      else if (eat('/'))
        lhs = make_node({NodeKind::Div, 0, "", Fn::Exp, lhs, parse_unary(), (int)at});
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    size_t at = pos;
    if (eat('-'))
      return make_node({NodeKind::Neg, 0, "", Fn::Exp, parse_unary(), nullptr, (int)at});
    return parse_power();
  }

  // '^' binds tighter than unary minus and associates to the right
  NodePtr parse_power() {
    NodePtr base = parse_atom();
    skip_ws();
    size_t at = pos;
    if (eat('^'))
      return make_node({NodeKind::Pow, 0, "", Fn::Exp, base, parse_unary(), (int)at});
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input", pos);
    size_t at = pos;
    char c = src[pos];
    if (std::isdigit((unsigned char)c) || c == '.') return parse_number();
    if (std::isalpha((unsigned char)c) || c == '_') return parse_ident();
    if (eat('(')) {
      NodePtr e = parse_expr();
      if (!eat(')')) fail("expected ')'", pos);
      return e;
    }
    fail(std::string("unexpected character '") + c + "'", at);
  }

  NodePtr parse_number() {
    size_t at = pos;
    size_t i = pos;
    while (i < src.size() && std::isdigit((unsigned char)src[i])) ++i;
    if (i < src.size() && src[i] == '.') {
      ++i;
      while (i < src.size() && std::isdigit((unsigned char)src[i])) ++i;
    }
    if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
      size_t j = i + 1;
      if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
      if (j < src.size() && std::isdigit((unsigned char)src[j])) {
        i = j;
        while (i < src.size() && std::isdigit((unsigned char)src[i])) ++i;
      }
    }
    std::string tok(src.substr(at, i - at));
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) fail("malformed number", at);
    pos = i;
    return make_node({NodeKind::Lit, v, "", Fn::Exp, nullptr, nullptr, (int)at});
  }

  NodePtr parse_ident() {
    size_t at = pos;
    size_t i = pos;
    while (i < src.size() &&
           (std::isalnum((unsigned char)src[i]) || src[i] == '_'))
      ++i;
    std::string name(src.substr(at, i - at));
    pos = i;
    skip_ws();
    if (pos < src.size() && src[pos] == '(') {
      ++pos;
      std::vector<NodePtr> args;
      args.push_back(parse_expr());
      while (eat(',')) args.push_back(parse_expr());
      if (!eat(')')) fail("expected ')'", pos);
      if (name == "pow") {
        if (args.size() != 2) fail("pow takes two arguments", at);
        return make_node({NodeKind::Pow, 0, "", Fn::Exp, args[0], args[1], (int)at});
      }
      Fn f;
      if (name == "exp") f = Fn::Exp;
      else if (name == "log") f = Fn::Log;
      else if (name == "sin") f = Fn::Sin;
      else if (name == "cos") f = Fn::Cos;
      else if (name == "sqrt") f = Fn::Sqrt;
      else fail("unknown function '" + name + "'", at);
      if (args.size() != 1) fail(name + " takes one argument", at);
      return make_node({NodeKind::Call, 0, "", f, args[0], nullptr, (int)at});
    }
    return make_node({NodeKind::Var, 0, name, Fn::Exp, nullptr, nullptr, (int)at});
  }
};

void print_node(const ExprNode* n, std::string& out) {
  char buf[40];
  switch (n->kind) {
    case NodeKind::Lit:
      std::snprintf(buf, sizeof buf, "%.17g", n->lit);
      out += buf;
      break;
    case NodeKind::Var:
      out += n->name;
      break;
    case NodeKind::Neg:
      out += "(-";
      print_node(n->a.get(), out);
      out += ")";
      break;
    case NodeKind::Call: {
      static const char* names[] = {"exp", "log", "sin", "cos", "sqrt"};
      out += names[(int)n->fn];
      out += "(";
      print_node(n->a.get(), out);
      out += ")";
      break;
    }
    default: {
      static const char* ops[] = {"", "", "", " + ", " - ", " * ", " / ", " ^ "};
      out += "(";
      print_node(n->a.get(), out);
      out += ops[(int)n->kind];
      print_node(n->b.get(), out);
      out += ")";
      break;
    }
  }
}

bool literal_int(const ExprNode* n, long* out) {
  if (!n || n->kind != NodeKind::Lit) return false;
  double v = n->lit;
  if (v != std::floor(v) || std::fabs(v) > 64) return false;
  *out = (long)v;
  return true;
}

[[noreturn]] void domain_fail(const std::string& what, const ExprNode* n) {
  std::string sub;
  print_node(n, sub);
  throw DomainError(what + " in subtree " + sub, n->offset);
}

template <class S, class MkConst>
S eval_rec(const ExprNode* n,
           const std::vector<std::pair<std::string, S>>& vars,
           const MkConst& mk) {
  using Ops = ScalarOps<S>;
  switch (n->kind) {
    case NodeKind::Lit:
      return mk(n->lit);
    case NodeKind::Var: {
      for (const auto& [name, val] : vars)
        if (name == n->name) return val;
      throw DomainError("unbound variable '" + n->name + "'", n->offset);
    }
    case NodeKind::Neg:
      return -eval_rec(n->a.get(), vars, mk);
    case NodeKind::Add:
      return eval_rec(n->a.get(), vars, mk) + eval_rec(n->b.get(), vars, mk);
    case NodeKind::Sub:
      return eval_rec(n->a.get(), vars, mk) - eval_rec(n->b.get(), vars, mk);
    case NodeKind::Mul:
      return eval_rec(n->a.get(), vars, mk) * eval_rec(n->b.get(), vars, mk);
    case NodeKind::Div: {
      S num = eval_rec(n->a.get(), vars, mk);
      S den = eval_rec(n->b.get(), vars, mk);
      if (Ops::value(den) == 0) domain_fail("division by zero", n);
      return num / den;
    }
    case NodeKind::Pow: {
      S base = eval_rec(n->a.get(), vars, mk);
      long e;
      if (literal_int(n->b.get(), &e)) return Ops::pow_int_(base, e);
      S ex = eval_rec(n->b.get(), vars, mk);
      if (Ops::value(base) <= 0)
        domain_fail("pow needs a positive base for non-integer exponents", n);
      return Ops::pow_(base, ex);
    }
    case NodeKind::Call: {
      S x = eval_rec(n->a.get(), vars, mk);
      switch (n->fn) {
        case Fn::Exp:
          return Ops::exp_(x);
        case Fn::Log:
          if (Ops::value(x) <= 0) domain_fail("log of non-positive value", n);
          return Ops::log_(x);
        case Fn::Sin:
          return Ops::sin_(x);
        case Fn::Cos:
          return Ops::cos_(x);
        case Fn::Sqrt:
          if (Ops::value(x) < 0) domain_fail("sqrt of negative value", n);
          if (Ops::value(x) == 0 && !std::is_same_v<S, double>)
            domain_fail("sqrt at zero has no derivatives", n);
          return Ops::sqrt_(x);
      }
      __builtin_unreachable();
    }
  }
  __builtin_unreachable();
}

void collect_vars(const ExprNode* n, std::set<std::string>& out) {
  if (!n) return;
  if (n->kind == NodeKind::Var) out.insert(n->name);
  collect_vars(n->a.get(), out);
  collect_vars(n->b.get(), out);
}

}  // namespace

Expr Expr::parse(std::string_view src) {
  bool blank = true;
  for (char c : src)
    if (!std::isspace((unsigned char)c)) blank = false;
  if (blank) throw ParseError("empty expression", 0);
  Parser p{src};
  NodePtr root = p.parse_expr();
  p.skip_ws();
  if (p.pos != src.size()) p.fail("trailing input", p.pos);
  Expr e;
  e.root_ = std::move(root);
  return e;
}

Expr Expr::literal(double v) {
  Expr e;
  e.root_ = make_node({NodeKind::Lit, v, "", Fn::Exp, nullptr, nullptr, -1});
  return e;
}

Expr Expr::var(const std::string& name) {
  Expr e;
  e.root_ = make_node({NodeKind::Var, 0, name, Fn::Exp, nullptr, nullptr, -1});
  return e;
}

Expr Expr::call(Fn f, Expr arg) {
  Expr e;
  e.root_ = make_node({NodeKind::Call, 0, "", f, arg.root_, nullptr, -1});
  return e;
}

Expr Expr::pow(Expr base, Expr exponent) {
  Expr e;
  e.root_ = make_node(
      {NodeKind::Pow, 0, "", Fn::Exp, base.root_, exponent.root_, -1});
  return e;
}

Expr Expr::binary(NodeKind k, const Expr& a, const Expr& b) {
  Expr e;
  e.root_ = make_node({k, 0, "", Fn::Exp, a.root_, b.root_, -1});
  return e;
}

Expr operator-(const Expr& a) {
  Expr e;
  e.root_ = make_node({NodeKind::Neg, 0, "", Fn::Exp, a.root_, nullptr, -1});
  return e;
}

std::string Expr::str() const {
  if (!root_) return "";
  std::string out;
  print_node(root_.get(), out);
  return out;
}

bool Expr::is_literal(double v) const {
  return root_ && root_->kind == NodeKind::Lit && root_->lit == v;
}

bool Expr::uses_var(std::string_view name) const {
  std::set<std::string> vs;
  collect_vars(root_.get(), vs);
  return vs.count(std::string(name)) > 0;
}

std::vector<std::string> Expr::variables() const {
  std::set<std::string> vs;
  collect_vars(root_.get(), vs);
  return {vs.begin(), vs.end()};
}

template <class S>
S Expr::eval(const std::vector<std::pair<std::string, S>>& vars) const {
  if (!root_) throw DomainError("empty expression", -1);
  if constexpr (std::is_same_v<S, Taylor>) {
    int order = vars.empty() ? 3 : vars.front().second.order();
    auto mk = [order](double v) { return Taylor::constant(v, order); };
    return eval_rec(root_.get(), vars, mk);
  } else {
    auto mk = [](double v) { return ScalarOps<S>::constant(v); };
    return eval_rec(root_.get(), vars, mk);
  }
}

double Expr::eval_site(int n, int m) const {
  return eval<double>({{"n", (double)n}, {"m", (double)m}});
}

Taylor Expr::eval_taylor(double t, int order, int n, int m) const {
  return eval<Taylor>({{"t", Taylor::variable(t, order)},
                       {"n", Taylor::constant(n, order)},
                       {"m", Taylor::constant(m, order)}});
}

Jet3 Expr::eval_time(double t, int n, int m) const {
  return eval_taylor(t, 3, n, m).jet3();
}

Gradient eval_grad(const Expr& e,
                   const std::vector<std::pair<std::string, double>>& args) {
  constexpr int kMax = 12;
  if ((int)args.size() > kMax)
    throw DomainError("eval_grad supports at most 12 arguments", -1);
  std::vector<std::pair<std::string, Grad<kMax>>> bound;
  bound.reserve(args.size());
  for (size_t i = 0; i < args.size(); ++i)
    bound.emplace_back(args[i].first, Grad<kMax>::seeded(args[i].second, (int)i));
  Grad<kMax> r = e.eval<Grad<kMax>>(bound);
  Gradient g;
  g.value = r.v;
  for (size_t i = 0; i < args.size(); ++i)
    g.partials.emplace_back(args[i].first, r.d[i]);
  return g;
}

double Gradient::partial(std::string_view name) const {
  for (const auto& [k, v] : partials)
    if (k == name) return v;
  throw DomainError("no partial for argument '" + std::string(name) + "'", -1);
}

template double Expr::eval<double>(
    const std::vector<std::pair<std::string, double>>&) const;
template Taylor Expr::eval<Taylor>(
    const std::vector<std::pair<std::string, Taylor>>&) const;
template Grad<8> Expr::eval<Grad<8>>(
    const std::vector<std::pair<std::string, Grad<8>>>&) const;
template Grad<12> Expr::eval<Grad<12>>(
    const std::vector<std::pair<std::string, Grad<12>>>&) const;

}  // namespace latsym
