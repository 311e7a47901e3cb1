#pragma once

// Expression trees for vector-field components and their evaluation over any
// numeric algebra (double, TruncatedSeries, GradedSeries).
//
// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' INTEGER)?
//   primary := NUMBER | 't' | 'pi' | 'x' INDEX | FUNC '(' expr ')' | '(' expr ')'
//   FUNC    := 'sin' | 'cos' | 'exp'

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strobo/algebra.hpp"
#include "strobo/errors.hpp"

namespace strobo {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { constant, time, state, pi, neg, sin, cos, exp, add, sub, mul, div, pow };

  Kind kind = Kind::constant;
  double value = 0.0;         // constant
  std::size_t index = 0;      // state variable (0-based) or integer exponent
  ExprPtr lhs;                // unary operand / left operand
  ExprPtr rhs;                // right operand
  bool depends_on_state = false;
  bool depends_on_time = false;

  static std::shared_ptr<Expr> node(Kind k, double v = 0.0, std::size_t index = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->value = v;
    e->index = index;
    return e;
  }
  static ExprPtr make_constant(double v) { return node(Kind::constant, v); }
  static ExprPtr make_leaf(Kind k, std::size_t index = 0) {
    auto e = node(k, 0.0, index);
    e->depends_on_state = k == Kind::state;
    e->depends_on_time = k == Kind::time;
    return e;
  }
  static ExprPtr make_unary(Kind k, ExprPtr operand) {
    auto e = node(k);
    e->depends_on_state = operand->depends_on_state;
    e->depends_on_time = operand->depends_on_time;
    e->lhs = std::move(operand);
    return e;
  }
  static ExprPtr make_binary(Kind k, ExprPtr a, ExprPtr b) {
    auto e = node(k);
    e->depends_on_state = a->depends_on_state || b->depends_on_state;
    e->depends_on_time = a->depends_on_time || b->depends_on_time;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
  }
  static ExprPtr make_pow(ExprPtr base, std::size_t exponent) {
    auto e = node(Kind::pow, 0.0, exponent);
    e->depends_on_state = base->depends_on_state;
    e->depends_on_time = base->depends_on_time;
    e->lhs = std::move(base);
    return e;
  }

  bool is_constant() const { return !depends_on_state && !depends_on_time; }
};

inline bool operator==(const Expr& a, const Expr& b);

inline bool same_tree(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::constant:
      return a.value == b.value;
    case Expr::Kind::state:
      return a.index == b.index;
    case Expr::Kind::pow:
      return a.index == b.index && same_tree(a.lhs, b.lhs);
    default:
      return same_tree(a.lhs, b.lhs) && same_tree(a.rhs, b.rhs);
  }
}

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t dim, std::string context)
      : text_(text), dim_(dim), context_(std::move(context)) {}

  ExprPtr parse() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) fail(ParseError::Kind::syntax, "unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg) const { fail_at(kind, pos_, msg); }

  [[noreturn]] void fail_at(ParseError::Kind kind, std::size_t at, const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(kind, context_, line, col, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      fail(ParseError::Kind::syntax, std::string("expected '") + c + "'");
    }
  }

  ExprPtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::make_binary(Expr::Kind::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::make_binary(Expr::Kind::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::make_binary(Expr::Kind::mul, lhs, parse_unary());
      } else if (accept('/')) {
        skip_ws();
        const std::size_t at = pos_;
        auto rhs = parse_unary();
        if (!rhs->is_constant()) {
          fail_at(ParseError::Kind::division, at, "denominator must be a constant expression");
        }
        if (eval_constant(*rhs) == 0.0) fail_at(ParseError::Kind::division, at, "division by zero");
        lhs = Expr::make_binary(Expr::Kind::div, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (accept('-')) return Expr::make_unary(Expr::Kind::neg, parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    auto base = parse_primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_ || (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' ||
                                                  text_[pos_] == 'E'))) {
      fail_at(ParseError::Kind::syntax, start, "exponent must be a non-negative integer literal");
    }
    std::size_t exponent = 0;
    std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
    return Expr::make_pow(base, exponent);
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail(ParseError::Kind::syntax, "unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (accept('(')) {
      auto e = parse_expr();
      expect(')');
      return e;
    }
    fail(ParseError::Kind::syntax, std::string("unexpected '") + c + "'");
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      fail_at(ParseError::Kind::syntax, start, "malformed number");
    }
    return Expr::make_constant(v);
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    const bool is_func = name == "sin" || name == "cos" || name == "exp";
    skip_ws();
    const bool called = pos_ < text_.size() && text_[pos_] == '(';
    if (is_func) {
      if (!called) fail_at(ParseError::Kind::arity, start, "function '" + name + "' expects one argument");
      ++pos_;
      auto arg = parse_expr();
      if (accept(',')) fail_at(ParseError::Kind::arity, start, "function '" + name + "' takes exactly one argument");
      expect(')');
      const auto kind = name == "sin" ? Expr::Kind::sin
                        : name == "cos" ? Expr::Kind::cos
                                        : Expr::Kind::exp;
      return Expr::make_unary(kind, arg);
    }
    ExprPtr leaf;
    if (name == "t") {
      leaf = Expr::make_leaf(Expr::Kind::time);
    } else if (name == "pi") {
      leaf = Expr::make_leaf(Expr::Kind::pi);
    } else if (name.size() > 1 && name[0] == 'x' &&
               name.find_first_not_of("0123456789", 1) == std::string::npos && name[1] != '0') {
      std::size_t j = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), j);
      if (ec != std::errc() || j < 1 || j > dim_) {
        fail_at(ParseError::Kind::unknown_identifier, start,
                "unknown identifier '" + name + "' (state variables are x1..x" + std::to_string(dim_) + ")");
      }
      leaf = Expr::make_leaf(Expr::Kind::state, j - 1);
    } else {
      fail_at(ParseError::Kind::unknown_identifier, start, "unknown identifier '" + name + "'");
    }
    if (called) fail_at(ParseError::Kind::arity, start, "'" + name + "' is not a function");
    return leaf;
  }

  static double eval_constant(const Expr& e);

  std::string_view text_;
  std::size_t dim_;
  std::string context_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one component expression over the state variables x1..x<dim>.
inline ExprPtr parse_expression(std::string_view text, std::size_t dim, std::string context = {}) {
  return detail::ExprParser(text, dim, std::move(context)).parse();
}

/// Fully parenthesized rendering; parse(print(e)) reproduces e.
inline std::string print_expression(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::constant: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.value);
      return buf;
    }
    case K::time:
      return "t";
    case K::pi:
      return "pi";
    case K::state:
      return "x" + std::to_string(e.index + 1);
    case K::neg:
      return "(-" + print_expression(*e.lhs) + ")";
    case K::sin:
      return "sin(" + print_expression(*e.lhs) + ")";
    case K::cos:
      return "cos(" + print_expression(*e.lhs) + ")";
    case K::exp:
      return "exp(" + print_expression(*e.lhs) + ")";
    case K::pow:
      return "(" + print_expression(*e.lhs) + "^" + std::to_string(e.index) + ")";
    case K::add:
      return "(" + print_expression(*e.lhs) + "+" + print_expression(*e.rhs) + ")";
    case K::sub:
      return "(" + print_expression(*e.lhs) + "-" + print_expression(*e.rhs) + ")";
    case K::mul:
      return "(" + print_expression(*e.lhs) + "*" + print_expression(*e.rhs) + ")";
    case K::div:
      return "(" + print_expression(*e.lhs) + "/" + print_expression(*e.rhs) + ")";
  }
  return {};
}

/// Real-valued evaluation.
inline double eval_real(const Expr& e, double t, std::span<const double> x) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::constant:
      return e.value;
    case K::time:
      return t;
    case K::pi:
      return std::numbers::pi;
    case K::state:
      return x[e.index];
    case K::neg:
      return -eval_real(*e.lhs, t, x);
    case K::sin:
      return std::sin(eval_real(*e.lhs, t, x));
    case K::cos:
      return std::cos(eval_real(*e.lhs, t, x));
    case K::exp:
      return std::exp(eval_real(*e.lhs, t, x));
    case K::pow: {
      const double b = eval_real(*e.lhs, t, x);
      double r = 1.0;
      for (std::size_t q = 0; q < e.index; ++q) r *= b;
      return r;
    }
    case K::add:
      return eval_real(*e.lhs, t, x) + eval_real(*e.rhs, t, x);
    case K::sub:
      return eval_real(*e.lhs, t, x) - eval_real(*e.rhs, t, x);
    case K::mul:
      return eval_real(*e.lhs, t, x) * eval_real(*e.rhs, t, x);
    case K::div: {
      const double d = eval_real(*e.rhs, t, x);
      if (d == 0.0) throw EvaluationError("division by zero constant");
      return eval_real(*e.lhs, t, x) / d;
    }
  }
  return 0.0;
}

inline double detail::ExprParser::eval_constant(const Expr& e) { return eval_real(e, 0.0, {}); }

namespace detail {

template <class A>
A ipow(const A& base, std::size_t exponent) {
  A result = lift(base, 1.0);
  A b = base;
  while (exponent > 0) {
    if (exponent & 1u) result = result * b;
    exponent >>= 1u;
    if (exponent > 0) b = b * b;
  }
  return result;
}

}  // namespace detail

/// Evaluates `e` with state entries drawn from algebra A. Sub-expressions that
/// do not involve the state are evaluated in double precision and enter the
/// algebra as scalars. `x` must be non-empty.
template <class A>
A eval_ast(const Expr& e, double t, std::span<const A> x) {
  using K = Expr::Kind;
  if (!e.depends_on_state) return lift(x[0], eval_real(e, t, {}));
  switch (e.kind) {
    case K::state:
      return x[e.index];
    case K::neg:
      return -eval_ast(*e.lhs, t, x);
    case K::sin: {
      using std::sin;
      return sin(eval_ast(*e.lhs, t, x));
    }
    case K::cos: {
      using std::cos;
      return cos(eval_ast(*e.lhs, t, x));
    }
    case K::exp: {
      using std::exp;
      return exp(eval_ast(*e.lhs, t, x));
    }
    case K::pow:
      return detail::ipow(eval_ast(*e.lhs, t, x), e.index);
    case K::add:
      if (!e.lhs->depends_on_state) return eval_ast(*e.rhs, t, x) + eval_real(*e.lhs, t, {});
      if (!e.rhs->depends_on_state) return eval_ast(*e.lhs, t, x) + eval_real(*e.rhs, t, {});
      return eval_ast(*e.lhs, t, x) + eval_ast(*e.rhs, t, x);
    case K::sub:
      if (!e.lhs->depends_on_state) return -eval_ast(*e.rhs, t, x) + eval_real(*e.lhs, t, {});
      if (!e.rhs->depends_on_state) return eval_ast(*e.lhs, t, x) + (-eval_real(*e.rhs, t, {}));
      return eval_ast(*e.lhs, t, x) - eval_ast(*e.rhs, t, x);
    case K::mul:
      if (!e.lhs->depends_on_state) return eval_ast(*e.rhs, t, x) * eval_real(*e.lhs, t, {});
      if (!e.rhs->depends_on_state) return eval_ast(*e.lhs, t, x) * eval_real(*e.rhs, t, {});
      return eval_ast(*e.lhs, t, x) * eval_ast(*e.rhs, t, x);
    case K::div: {
      const double d = eval_real(*e.rhs, t, {});
      if (d == 0.0) throw EvaluationError("division by zero constant");
      return eval_ast(*e.lhs, t, x) * (1.0 / d);
    }
    default:
      break;
  }
  return lift(x[0], eval_real(e, t, {}));
}

}  // namespace strobo
