#pragma once

// Hand-written tokenizer, recursive-descent parser, and evaluator for the
// small expression language that defines self-maps and set-membership
// predicates on the command line.
//
// Arithmetic: variables x1..xn, numeric literals, + - * / ^, unary minus,
// parentheses, exp, abs, min, max. Precedence ^ > unary - > * / > + -, with
// ^ right-associative and the other binaries left-associative.
//
// Predicates: comparisons <, <=, >, >= between arithmetic expressions,
// `a =~ b : tol` for closeness within an explicit tolerance, and the
// connectives and/or/not. Exact `=` on reals is rejected at parse time.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "selfmap.hpp"
#include "setfamily.hpp"

namespace nobully::dsl {

enum class TokenKind {
  number, ident, plus, minus, star, slash, caret, lparen, rparen, comma,
  colon, lt, le, gt, ge, approx, eq, kw_and, kw_or, kw_not, end
};

struct Token {
  TokenKind kind = TokenKind::end;
  double number = 0.0;
  std::string text;
  std::size_t pos = 0;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](TokenKind k, std::size_t pos, std::string text = {},
                  double num = 0.0) {
    out.push_back(Token{k, num, std::move(text), pos});
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.'))
        ++i;
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[i])))
            ++i;
        }
      }
      const std::string text(src.substr(start, i - start));
      char* endp = nullptr;
      const double v = std::strtod(text.c_str(), &endp);
      if (endp != text.c_str() + text.size())
        throw parse_error("bad numeric literal '" + text + "' at column " +
                              std::to_string(start + 1),
                          start);
      push(TokenKind::number, start, text, v);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                                src[i] == '_'))
        ++i;
      const std::string text(src.substr(start, i - start));
      if (text == "and") push(TokenKind::kw_and, start, text);
      else if (text == "or") push(TokenKind::kw_or, start, text);
      else if (text == "not") push(TokenKind::kw_not, start, text);
      else push(TokenKind::ident, start, text);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two('<', '=')) { push(TokenKind::le, start); i += 2; continue; }
    if (two('>', '=')) { push(TokenKind::ge, start); i += 2; continue; }
    if (two('=', '~')) { push(TokenKind::approx, start); i += 2; continue; }
    if (two('=', '=')) { push(TokenKind::eq, start); i += 2; continue; }
    switch (c) {
      case '+': push(TokenKind::plus, start); break;
      case '-': push(TokenKind::minus, start); break;
      case '*': push(TokenKind::star, start); break;
      case '/': push(TokenKind::slash, start); break;
      case '^': push(TokenKind::caret, start); break;
      case '(': push(TokenKind::lparen, start); break;
      case ')': push(TokenKind::rparen, start); break;
      case ',': push(TokenKind::comma, start); break;
      case ':': push(TokenKind::colon, start); break;
      case '<': push(TokenKind::lt, start); break;
      case '>': push(TokenKind::gt, start); break;
      case '=': push(TokenKind::eq, start); break;
      default:
        throw parse_error("unexpected character '" + std::string(1, c) +
                              "' at column " + std::to_string(start + 1),
                          start);
    }
    ++i;
  }
  push(TokenKind::end, src.size());
  return out;
}

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
 public:
  enum class Kind { number, variable, add, sub, mul, div, pow, negate, call };

  Kind kind = Kind::number;
  double number = 0.0;          // Kind::number
  int var = 0;                  // Kind::variable, 0-based
  std::string callee;           // Kind::call
  std::vector<ExprPtr> args;    // operands
  std::size_t pos = 0;
};

class Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

class Predicate {
 public:
  enum class Kind { lt, le, gt, ge, near, logical_and, logical_or, logical_not };

  Kind kind = Kind::lt;
  ExprPtr lhs, rhs;       // comparisons
  double tolerance = 0.0;  // near
  PredicatePtr a, b;      // connectives (b empty for not)
  std::size_t pos = 0;
};

namespace detail {

inline std::string column_of(std::size_t pos) {
  return "column " + std::to_string(pos + 1);
}

// shortest decimal form that parses back to the same double
inline std::string format_double(double v) {
  for (int prec = 6; prec <= 17; ++prec) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    const std::string s = os.str();
    if (std::strtod(s.c_str(), nullptr) == v) return s;
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  ExprPtr parse_full_expr() {
    ExprPtr e = expr();
    expect_end();
    return e;
  }

  PredicatePtr parse_full_predicate() {
    PredicatePtr p = predicate();
    expect_end();
    return p;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& take() { return toks_[i_++]; }
  bool at(TokenKind k) const { return peek().kind == k; }

  bool accept(TokenKind k) {
    if (!at(k)) return false;
    ++i_;
    return true;
  }

  void expect_end() {
    if (!at(TokenKind::end))
      throw parse_error("unexpected trailing input at " + column_of(peek().pos),
                        peek().pos);
  }

  [[noreturn]] void fail(const std::string& what, std::size_t pos) {
    throw parse_error(what + " at " + column_of(pos), pos);
  }

  ExprPtr make(Expr::Kind k, std::vector<ExprPtr> args, std::size_t pos) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->args = std::move(args);
    e->pos = pos;
    return e;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (at(TokenKind::plus) || at(TokenKind::minus)) {
      const Token op = take();
      ExprPtr rhs = term();
      lhs = make(op.kind == TokenKind::plus ? Expr::Kind::add : Expr::Kind::sub,
                 {lhs, rhs}, op.pos);
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    while (at(TokenKind::star) || at(TokenKind::slash)) {
      const Token op = take();
      ExprPtr rhs = factor();
      lhs = make(op.kind == TokenKind::star ? Expr::Kind::mul : Expr::Kind::div,
                 {lhs, rhs}, op.pos);
    }
    return lhs;
  }

  ExprPtr factor() {
    if (at(TokenKind::minus)) {
      const Token op = take();
      return make(Expr::Kind::negate, {factor()}, op.pos);
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (at(TokenKind::caret)) {
      const Token op = take();
      return make(Expr::Kind::pow, {base, factor()}, op.pos);  // right-assoc
    }
    return base;
  }

  ExprPtr primary() {
    if (at(TokenKind::number)) {
      const Token t = take();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::number;
      e->number = t.number;
      e->pos = t.pos;
      return e;
    }
    if (at(TokenKind::lparen)) {
      const Token open = take();
      ExprPtr e = expr();
      if (!accept(TokenKind::rparen))
        fail("expected ')' to close '(' from " + column_of(open.pos), peek().pos);
      return e;
    }
    if (at(TokenKind::ident)) {
      const Token t = take();
      if (at(TokenKind::lparen)) {
        take();
        std::vector<ExprPtr> args;
        args.push_back(expr());
        while (accept(TokenKind::comma)) args.push_back(expr());
        if (!accept(TokenKind::rparen))
          fail("expected ')' in call to '" + t.text + "'", peek().pos);
        if (t.text == "exp" || t.text == "abs") {
          if (args.size() != 1)
            fail("'" + t.text + "' takes exactly one argument", t.pos);
        } else if (t.text == "min" || t.text == "max") {
          if (args.size() < 2)
            fail("'" + t.text + "' takes at least two arguments", t.pos);
        } else {
          fail("unknown function '" + t.text + "'", t.pos);
        }
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::call;
        e->callee = t.text;
        e->args = std::move(args);
        e->pos = t.pos;
        return e;
      }
      if (t.text.size() >= 2 && t.text[0] == 'x' && t.text[1] != '0' &&
          t.text.find_first_not_of("0123456789", 1) == std::string::npos) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::variable;
        e->var = std::atoi(t.text.c_str() + 1) - 1;
        e->pos = t.pos;
        return e;
      }
      fail("unknown identifier '" + t.text + "' (variables are x1, x2, ...)",
           t.pos);
    }
    if (at(TokenKind::end)) fail("unexpected end of input", peek().pos);
    fail("unexpected token", peek().pos);
  }

  // ---- predicates ----

  PredicatePtr predicate() {
    PredicatePtr lhs = conjunction();
    while (at(TokenKind::kw_or)) {
      const Token op = take();
      PredicatePtr rhs = conjunction();
      auto p = std::make_shared<Predicate>();
      p->kind = Predicate::Kind::logical_or;
      p->a = lhs;
      p->b = rhs;
      p->pos = op.pos;
      lhs = p;
    }
    return lhs;
  }

  PredicatePtr conjunction() {
    PredicatePtr lhs = punit();
    while (at(TokenKind::kw_and)) {
      const Token op = take();
      PredicatePtr rhs = punit();
      auto p = std::make_shared<Predicate>();
      p->kind = Predicate::Kind::logical_and;
      p->a = lhs;
      p->b = rhs;
      p->pos = op.pos;
      lhs = p;
    }
    return lhs;
  }

  PredicatePtr punit() {
    if (at(TokenKind::kw_not)) {
      const Token op = take();
      auto p = std::make_shared<Predicate>();
      p->kind = Predicate::Kind::logical_not;
      p->a = punit();
      p->pos = op.pos;
      return p;
    }
    if (at(TokenKind::lparen)) {
      // could be a grouped predicate or a parenthesized arithmetic operand;
      // try the predicate reading first and fall back on failure
      const std::size_t mark = i_;
      try {
        take();
        PredicatePtr inner = predicate();
        if (!accept(TokenKind::rparen))
          fail("expected ')'", peek().pos);
        return inner;
      } catch (const parse_error&) {
        i_ = mark;
      }
    }
    return comparison();
  }

  PredicatePtr comparison() {
    ExprPtr lhs = expr();
    if (at(TokenKind::eq))
      fail("exact '=' on reals is not supported; use 'a =~ b : tol'",
           peek().pos);
    if (accept(TokenKind::approx)) {
      const std::size_t opos = toks_[i_ - 1].pos;
      ExprPtr rhs = expr();
      if (!accept(TokenKind::colon))
        fail("'=~' needs an explicit tolerance: a =~ b : tol", peek().pos);
      if (!at(TokenKind::number))
        fail("tolerance after ':' must be a numeric literal", peek().pos);
      const Token tol = take();
      auto p = std::make_shared<Predicate>();
      p->kind = Predicate::Kind::near;
      p->lhs = lhs;
      p->rhs = rhs;
      p->tolerance = tol.number;
      p->pos = opos;
      return p;
    }
    Predicate::Kind k;
    if (accept(TokenKind::lt)) k = Predicate::Kind::lt;
    else if (accept(TokenKind::le)) k = Predicate::Kind::le;
    else if (accept(TokenKind::gt)) k = Predicate::Kind::gt;
    else if (accept(TokenKind::ge)) k = Predicate::Kind::ge;
    else fail("expected a comparison operator", peek().pos);
    const std::size_t opos = toks_[i_ - 1].pos;
    ExprPtr rhs = expr();
    auto p = std::make_shared<Predicate>();
    p->kind = k;
    p->lhs = lhs;
    p->rhs = rhs;
    p->pos = opos;
    return p;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline ExprPtr parse_expr(std::string_view src) {
  return detail::Parser(src).parse_full_expr();
}

inline PredicatePtr parse_predicate(std::string_view src) {
  return detail::Parser(src).parse_full_predicate();
}

inline int max_var_index(const Expr& e) {  // 1-based; 0 when no variables
  int m = e.kind == Expr::Kind::variable ? e.var + 1 : 0;
  for (const auto& a : e.args) m = std::max(m, max_var_index(*a));
  return m;
}

inline int max_var_index(const Predicate& p) {
  int m = 0;
  if (p.lhs) m = std::max(m, max_var_index(*p.lhs));
  if (p.rhs) m = std::max(m, max_var_index(*p.rhs));
  if (p.a) m = std::max(m, max_var_index(*p.a));
  if (p.b) m = std::max(m, max_var_index(*p.b));
  return m;
}

inline void bind_check(const Expr& e, int n) {
  const int m = max_var_index(e);
  if (m > n)
    throw input_error("expression uses x" + std::to_string(m) +
                      " but only x1..x" + std::to_string(n) + " are bound");
}

inline void bind_check(const Predicate& p, int n) {
  const int m = max_var_index(p);
  if (m > n)
    throw input_error("predicate uses x" + std::to_string(m) +
                      " but only x1..x" + std::to_string(n) + " are bound");
}

inline std::string to_string(const Expr& e);

namespace detail {

inline int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    case Expr::Kind::negate: return 3;
    case Expr::Kind::pow: return 4;
    default: return 5;
  }
}

inline std::string wrap(const Expr& child, int min_prec) {
  const std::string s = to_string(child);
  return precedence(child) < min_prec ? "(" + s + ")" : s;
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  using detail::precedence;
  using detail::wrap;
  switch (e.kind) {
    case Expr::Kind::number: return detail::format_double(e.number);
    case Expr::Kind::variable: return "x" + std::to_string(e.var + 1);
    case Expr::Kind::add:
      return wrap(*e.args[0], 1) + " + " + wrap(*e.args[1], 2);
    case Expr::Kind::sub:
      return wrap(*e.args[0], 1) + " - " + wrap(*e.args[1], 2);
    case Expr::Kind::mul:
      return wrap(*e.args[0], 2) + " * " + wrap(*e.args[1], 3);
    case Expr::Kind::div:
      return wrap(*e.args[0], 2) + " / " + wrap(*e.args[1], 3);
    case Expr::Kind::negate: return "-" + wrap(*e.args[0], 3);
    case Expr::Kind::pow:
      return wrap(*e.args[0], 5) + "^" + wrap(*e.args[1], 4);
    case Expr::Kind::call: {
      std::string s = e.callee + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i)
        s += (i ? ", " : "") + to_string(*e.args[i]);
      return s + ")";
    }
  }
  return {};
}

inline std::string to_string(const Predicate& p) {
  auto cmp = [&](const char* op) {
    return to_string(*p.lhs) + " " + op + " " + to_string(*p.rhs);
  };
  switch (p.kind) {
    case Predicate::Kind::lt: return cmp("<");
    case Predicate::Kind::le: return cmp("<=");
    case Predicate::Kind::gt: return cmp(">");
    case Predicate::Kind::ge: return cmp(">=");
    case Predicate::Kind::near:
      return to_string(*p.lhs) + " =~ " + to_string(*p.rhs) + " : " +
             detail::format_double(p.tolerance);
    case Predicate::Kind::logical_and:
      return "(" + to_string(*p.a) + " and " + to_string(*p.b) + ")";
    case Predicate::Kind::logical_or:
      return "(" + to_string(*p.a) + " or " + to_string(*p.b) + ")";
    case Predicate::Kind::logical_not: return "not (" + to_string(*p.a) + ")";
  }
  return {};
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Expr::Kind::number:
      if (a.number != b.number) return false;
      break;
    case Expr::Kind::variable:
      if (a.var != b.var) return false;
      break;
    case Expr::Kind::call:
      if (a.callee != b.callee) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

inline double eval_expr(const Expr& e, std::span<const double> x) {
  switch (e.kind) {
    case Expr::Kind::number: return e.number;
    case Expr::Kind::variable:
      if (e.var < 0 || static_cast<std::size_t>(e.var) >= x.size())
        throw eval_error("variable x" + std::to_string(e.var + 1) +
                         " is outside the point's dimension");
      return x[static_cast<std::size_t>(e.var)];
    case Expr::Kind::add: return eval_expr(*e.args[0], x) + eval_expr(*e.args[1], x);
    case Expr::Kind::sub: return eval_expr(*e.args[0], x) - eval_expr(*e.args[1], x);
    case Expr::Kind::mul: return eval_expr(*e.args[0], x) * eval_expr(*e.args[1], x);
    case Expr::Kind::div: {
      const double den = eval_expr(*e.args[1], x);
      if (den == 0.0)
        throw eval_error("division by zero in '" + to_string(e) + "'");
      return eval_expr(*e.args[0], x) / den;
    }
    case Expr::Kind::pow:
      return std::pow(eval_expr(*e.args[0], x), eval_expr(*e.args[1], x));
    case Expr::Kind::negate: return -eval_expr(*e.args[0], x);
    case Expr::Kind::call: {
      if (e.callee == "exp") return std::exp(eval_expr(*e.args[0], x));
      if (e.callee == "abs") return std::abs(eval_expr(*e.args[0], x));
      double acc = eval_expr(*e.args[0], x);
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        const double v = eval_expr(*e.args[i], x);
        acc = e.callee == "min" ? std::min(acc, v) : std::max(acc, v);
      }
      return acc;
    }
  }
  throw internal_error("unhandled expression node");
}

inline bool eval_predicate(const Predicate& p, std::span<const double> x) {
  switch (p.kind) {
    case Predicate::Kind::lt: return eval_expr(*p.lhs, x) < eval_expr(*p.rhs, x);
    case Predicate::Kind::le: return eval_expr(*p.lhs, x) <= eval_expr(*p.rhs, x);
    case Predicate::Kind::gt: return eval_expr(*p.lhs, x) > eval_expr(*p.rhs, x);
    case Predicate::Kind::ge: return eval_expr(*p.lhs, x) >= eval_expr(*p.rhs, x);
    case Predicate::Kind::near:
      return std::abs(eval_expr(*p.lhs, x) - eval_expr(*p.rhs, x)) <=
             p.tolerance;
    case Predicate::Kind::logical_and:
      return eval_predicate(*p.a, x) && eval_predicate(*p.b, x);
    case Predicate::Kind::logical_or:
      return eval_predicate(*p.a, x) || eval_predicate(*p.b, x);
    case Predicate::Kind::logical_not: return !eval_predicate(*p.a, x);
  }
  throw internal_error("unhandled predicate node");
}

struct MapSpec {
  enum class Wrapper { none, softmax };

  int n = 0;
  std::vector<ExprPtr> outputs;
  Wrapper wrapper = Wrapper::none;
};

// One expression per line; an optional leading line `wrapper: softmax`.
// Blank lines and lines starting with '#' are ignored.
inline MapSpec parse_map_text(std::string_view text) {
  MapSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string body = line.substr(b, e - b + 1);
    if (first_content && body.rfind("wrapper:", 0) == 0) {
      const std::string mode = body.substr(8).find_first_not_of(" \t") ==
                                       std::string::npos
                                   ? ""
                                   : body.substr(body.find_first_not_of(" \t", 8));
      if (mode == "softmax") spec.wrapper = MapSpec::Wrapper::softmax;
      else if (mode == "none") spec.wrapper = MapSpec::Wrapper::none;
      else throw input_error("line " + std::to_string(lineno) +
                             ": unknown wrapper '" + mode + "'");
      first_content = false;
      continue;
    }
    first_content = false;
    try {
      spec.outputs.push_back(parse_expr(body));
    } catch (const parse_error& pe) {
      throw input_error("line " + std::to_string(lineno) + ": " + pe.what());
    }
  }
  spec.n = static_cast<int>(spec.outputs.size());
  if (spec.n == 0) throw input_error("map needs at least one output expression");
  for (const auto& o : spec.outputs) bind_check(*o, spec.n);
  return spec;
}

// identity | cyclic | softmax-demo | constant:<c1,...,cn>
inline MapSpec builtin_map(std::string_view name, int n) {
  if (n < 1) throw input_error("builtin maps need a dimension of at least 1");
  auto var = [](int idx0) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::variable;
    e->var = idx0;
    return ExprPtr(e);
  };
  MapSpec spec;
  spec.n = n;
  if (name == "identity") {
    for (int i = 0; i < n; ++i) spec.outputs.push_back(var(i));
    return spec;
  }
  if (name == "cyclic") {
    for (int i = 0; i < n; ++i) spec.outputs.push_back(var((i + 1) % n));
    return spec;
  }
  if (name == "softmax-demo") {
    spec.wrapper = MapSpec::Wrapper::softmax;
    for (int i = 0; i < n; ++i) spec.outputs.push_back(var(i));
    return spec;
  }
  if (name.rfind("constant:", 0) == 0) {
    std::istringstream in{std::string(name.substr(9))};
    std::string piece;
    std::vector<double> values;
    while (std::getline(in, piece, ',')) {
      char* endp = nullptr;
      const double v = std::strtod(piece.c_str(), &endp);
      if (endp == piece.c_str() || *endp != '\0')
        throw input_error("malformed constant vector entry '" + piece + "'");
      values.push_back(v);
    }
    if (values.size() != static_cast<std::size_t>(n))
      throw input_error("constant vector has " + std::to_string(values.size()) +
                        " entries, expected " + std::to_string(n));
    for (double v : values) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::number;
      e->number = v;
      spec.outputs.push_back(e);
    }
    return spec;
  }
  throw input_error("unknown builtin map '" + std::string(name) +
                    "' (try identity, cyclic, softmax-demo, constant:<list>)");
}

inline SelfMap to_selfmap(const MapSpec& spec, double tolerance = 1e-9) {
  for (const auto& o : spec.outputs) bind_check(*o, spec.n);
  return SelfMap(
      spec.n,
      [spec](std::span<const double> x) {
        std::vector<double> y(spec.outputs.size());
        for (std::size_t i = 0; i < spec.outputs.size(); ++i)
          y[i] = eval_expr(*spec.outputs[i], x);
        if (spec.wrapper == MapSpec::Wrapper::softmax) {
          double hi = y[0];
          for (double v : y) hi = std::max(hi, v);
          double sum = 0.0;
          for (double& v : y) {
            v = std::exp(v - hi);
            sum += v;
          }
          for (double& v : y) v /= sum;
        }
        return y;
      },
      tolerance);
}

struct FamilySpec {
  int n = 0;
  std::vector<PredicatePtr> sets;
};

// One predicate per line, set i on line i. Blank lines and '#' comments are
// ignored.
inline FamilySpec parse_family_text(std::string_view text) {
  FamilySpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    try {
      spec.sets.push_back(parse_predicate(line.substr(b, e - b + 1)));
    } catch (const parse_error& pe) {
      throw input_error("line " + std::to_string(lineno) + ": " + pe.what());
    }
  }
  spec.n = static_cast<int>(spec.sets.size());
  if (spec.n == 0) throw input_error("family needs at least one predicate");
  for (const auto& s : spec.sets) bind_check(*s, spec.n);
  return spec;
}

inline SetFamily to_setfamily(const FamilySpec& spec) {
  SetFamily fam;
  fam.n = spec.n;
  for (const auto& s : spec.sets)
    fam.members.push_back(
        [s](std::span<const double> x) { return eval_predicate(*s, x); });
  return fam;
}

}  // namespace nobully::dsl
