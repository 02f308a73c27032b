#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rankdb/error.hpp"
#include "rankdb/rational.hpp"
#include "rankdb/table.hpp"

namespace rankdb {

/// Result of evaluating an expression. Arithmetic stays exact until an
/// irrational builtin (sqrt, fractional powers) forces a double.
using ExprValue = std::variant<Rational, double, std::string>;

inline bool is_numeric(const ExprValue& v) { return v.index() != 2; }

inline double as_double(const ExprValue& v) {
  if (v.index() == 0) return std::get<0>(v).to_double();
  if (v.index() == 1) return std::get<1>(v);
  throw Error(Errc::domain, "string used as a number");
}

inline ExprValue from_value(const Value& v) {
  switch (v.index()) {
    case 0: return std::get<0>(v);
    case 1: return Rational(std::get<1>(v));
    default: return std::get<2>(v);
  }
}

/// Rounds a numeric result onto the 10^-places grid, exactly.
inline Rational quantize(const ExprValue& v, int places) {
  if (v.index() == 0) return std::get<0>(v).round_to(places);
  if (v.index() == 1) return Rational::from_double(std::get<1>(v), places);
  throw Error(Errc::domain, "expected a number, got string '" + std::get<2>(v) + "'");
}

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Resolves identifiers and non-builtin calls during evaluation.
struct ExprEnv {
  std::function<std::optional<ExprValue>(std::string_view)> lookup;
  std::function<std::optional<ExprValue>(std::string_view, const std::vector<ExprValue>&)> call;
};

class Expr {
 public:
  enum class Kind { number, string, ident, neg, logical_not, binary, ternary, call };

  Kind kind;
  std::string text;  // identifier, call name, string literal, or binary operator
  Rational number;
  std::vector<ExprPtr> args;

  static ExprPtr make_number(Rational q) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::number;
    e->number = q;
    return e;
  }
  static ExprPtr make(Kind k, std::string text, std::vector<ExprPtr> args = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->text = std::move(text);
    e->args = std::move(args);
    return e;
  }

  ExprValue eval(const ExprEnv& env) const;

  /// Identifiers referenced as variables (not as call names).
  std::set<std::string> free_identifiers() const {
    std::set<std::string> out;
    collect(out);
    return out;
  }

  /// Names used in call position that are not builtins.
  std::set<std::string> called_names() const {
    std::set<std::string> out;
    collect_calls(out);
    return out;
  }

  std::string str() const;

 private:
  void collect(std::set<std::string>& out) const {
    if (kind == Kind::ident) out.insert(text);
    for (const auto& a : args) a->collect(out);
  }
  void collect_calls(std::set<std::string>& out) const;
};

namespace expr_detail {

inline bool is_builtin(std::string_view name) {
  return name == "sqrt" || name == "min" || name == "max" || name == "clamp" || name == "abs";
}

inline bool truthy(const ExprValue& v) {
  if (v.index() == 0) return std::get<0>(v) != Rational(0);
  if (v.index() == 1) return std::get<1>(v) != 0.0;
  return !std::get<2>(v).empty();
}

inline ExprValue boolean(bool b) { return Rational(b ? 1 : 0); }

inline int compare_values(const ExprValue& a, const ExprValue& b) {
  if (a.index() == 2 || b.index() == 2) {
    if (a.index() != b.index()) throw Error(Errc::domain, "cannot compare a string with a number");
    const auto& x = std::get<2>(a);
    const auto& y = std::get<2>(b);
    return x < y ? -1 : (y < x ? 1 : 0);
  }
  if (a.index() == 0 && b.index() == 0) {
    auto c = std::get<0>(a) <=> std::get<0>(b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  double x = as_double(a), y = as_double(b);
  return x < y ? -1 : (y < x ? 1 : 0);
}

template <class Exact, class Approx>
ExprValue arith(const ExprValue& a, const ExprValue& b, Exact exact, Approx approx) {
  if (a.index() == 0 && b.index() == 0) return exact(std::get<0>(a), std::get<0>(b));
  return approx(as_double(a), as_double(b));
}

inline ExprValue power(const ExprValue& base, const ExprValue& exp) {
  if (base.index() == 0 && exp.index() == 0 && std::get<0>(exp).is_integer()) {
    std::int64_t n = std::get<0>(exp).num();
    if (n >= -64 && n <= 64) {
      Rational b = std::get<0>(base);
      Rational r(1);
      for (std::int64_t i = 0; i < (n < 0 ? -n : n); ++i) r = r * b;
      return n < 0 ? Rational(1) / r : r;
    }
  }
  return std::pow(as_double(base), as_double(exp));
}

inline ExprValue square_root(const ExprValue& v) {
  if (v.index() == 0) {
    Rational q = std::get<0>(v);
    if (q < Rational(0)) throw Error(Errc::domain, "sqrt of a negative number");
    auto isqrt = [](std::int64_t n) -> std::optional<std::int64_t> {
      auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<long double>(n))));
      for (std::int64_t c = std::max<std::int64_t>(0, r - 1); c <= r + 1; ++c) {
        if (static_cast<__int128>(c) * c == n) return c;
      }
      return std::nullopt;
    };
    auto n = isqrt(q.num());
    auto d = isqrt(q.den());
    if (n && d) return Rational(*n, *d);
  }
  double x = as_double(v);
  if (x < 0) throw Error(Errc::domain, "sqrt of a negative number");
  return std::sqrt(x);
}

inline const ExprValue& pick(const ExprValue& a, const ExprValue& b, bool want_max) {
  int c = compare_values(a, b);
  return (want_max ? c < 0 : c > 0) ? b : a;
}

}  // namespace expr_detail

inline void Expr::collect_calls(std::set<std::string>& out) const {
  if (kind == Kind::call && !expr_detail::is_builtin(text)) out.insert(text);
  for (const auto& a : args) a->collect_calls(out);
}

inline ExprValue Expr::eval(const ExprEnv& env) const {
  using namespace expr_detail;
  switch (kind) {
    case Kind::number: return number;
    case Kind::string: return text;
    case Kind::ident: {
      if (env.lookup) {
        if (auto v = env.lookup(text)) return *v;
      }
      throw Error(Errc::unknown_name, "identifier '" + text + "'");
    }
    case Kind::neg: {
      ExprValue v = args[0]->eval(env);
      if (v.index() == 0) return -std::get<0>(v);
      return -as_double(v);
    }
    case Kind::logical_not: return boolean(!truthy(args[0]->eval(env)));
    case Kind::ternary: return truthy(args[0]->eval(env)) ? args[1]->eval(env) : args[2]->eval(env);
    case Kind::binary: {
      if (text == "&&") return boolean(truthy(args[0]->eval(env)) && truthy(args[1]->eval(env)));
      if (text == "||") return boolean(truthy(args[0]->eval(env)) || truthy(args[1]->eval(env)));
      ExprValue a = args[0]->eval(env);
      ExprValue b = args[1]->eval(env);
      if (text == "==") return boolean(compare_values(a, b) == 0);
      if (text == "!=") return boolean(compare_values(a, b) != 0);
      if (text == "<") return boolean(compare_values(a, b) < 0);
      if (text == "<=") return boolean(compare_values(a, b) <= 0);
      if (text == ">") return boolean(compare_values(a, b) > 0);
      if (text == ">=") return boolean(compare_values(a, b) >= 0);
      if (text == "+") return arith(a, b, [](auto x, auto y) { return x + y; }, [](double x, double y) { return x + y; });
      if (text == "-") return arith(a, b, [](auto x, auto y) { return x - y; }, [](double x, double y) { return x - y; });
      if (text == "*") return arith(a, b, [](auto x, auto y) { return x * y; }, [](double x, double y) { return x * y; });
      if (text == "/") {
        if (as_double(b) == 0.0) throw Error(Errc::domain, "division by zero");
        return arith(a, b, [](auto x, auto y) { return x / y; }, [](double x, double y) { return x / y; });
      }
      if (text == "^") return power(a, b);
      throw Error(Errc::invalid_argument, "operator '" + text + "'");
    }
    case Kind::call: {
      std::vector<ExprValue> vals;
      for (const auto& a : args) vals.push_back(a->eval(env));
      auto arity = [&](std::size_t n) {
        if (vals.size() != n) throw Error(Errc::invalid_argument, text + " takes " + std::to_string(n) + " arguments");
      };
      if (text == "sqrt") {
        arity(1);
        return square_root(vals[0]);
      }
      if (text == "abs") {
        arity(1);
        return compare_values(vals[0], Rational(0)) < 0 ? (vals[0].index() == 0 ? ExprValue(-std::get<0>(vals[0]))
                                                                                 : ExprValue(-as_double(vals[0])))
                                                        : vals[0];
      }
      if (text == "min" || text == "max") {
        if (vals.empty()) throw Error(Errc::invalid_argument, text + " needs arguments");
        ExprValue best = vals[0];
        for (std::size_t i = 1; i < vals.size(); ++i) best = pick(best, vals[i], text == "max");
        return best;
      }
      if (text == "clamp") {
        arity(3);
        return pick(pick(vals[0], vals[1], true), vals[2], false);
      }
      if (env.call) {
        if (auto v = env.call(text, vals)) return *v;
      }
      throw Error(Errc::unknown_name, "function '" + text + "'");
    }
  }
  throw Error(Errc::invalid_argument, "bad expression node");
}

inline std::string Expr::str() const {
  switch (kind) {
    case Kind::number: return number.to_string().find('/') == std::string::npos ? number.to_string()
                                                                                  : "(" + number.to_string() + ")";
    case Kind::string: {
      std::string out = "\"";
      for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case Kind::ident: return text;
    case Kind::neg: return "-" + args[0]->str();
    case Kind::logical_not: return "!" + args[0]->str();
    case Kind::ternary: return "(" + args[0]->str() + " ? " + args[1]->str() + " : " + args[2]->str() + ")";
    case Kind::binary: return "(" + args[0]->str() + " " + text + " " + args[1]->str() + ")";
    case Kind::call: {
      std::string out = text + "(";
      for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + args[i]->str();
      return out + ")";
    }
  }
  return "?";
}

/// Converts a byte offset into a 1-based line/column pair.
inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

/// Recursive-descent parser. It stops at the first character that cannot
/// continue the expression, so callers can embed expressions in larger syntax.
class ExprParser {
 public:
  explicit ExprParser(std::string_view text, std::size_t pos = 0) : text_(text), pos_(pos) {}

  ExprPtr parse_expression() { return ternary(); }

  /// Parses the whole input; trailing characters are an error.
  static ExprPtr parse_all(std::string_view text) {
    ExprParser p(text);
    ExprPtr e = p.parse_expression();
    p.skip_ws();
    if (p.pos_ != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos_]) + "'");
    return e;
  }

  std::size_t position() const noexcept { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_;

  [[noreturn]] void fail(const std::string& what) const {
    auto [line, col] = line_column(text_, pos_);
    throw ParseError(what, line, col);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  ExprPtr ternary() {
    ExprPtr c = logical_or();
    if (accept("?")) {
      ExprPtr a = ternary();
      expect(":");
      ExprPtr b = ternary();
      return Expr::make(Expr::Kind::ternary, "", {c, a, b});
    }
    return c;
  }

  ExprPtr logical_or() {
    ExprPtr e = logical_and();
    while (accept("||")) e = Expr::make(Expr::Kind::binary, "||", {e, logical_and()});
    return e;
  }

  ExprPtr logical_and() {
    ExprPtr e = comparison();
    while (accept("&&")) e = Expr::make(Expr::Kind::binary, "&&", {e, comparison()});
    return e;
  }

  ExprPtr comparison() {
    ExprPtr e = additive();
    skip_ws();
    for (std::string_view op : {"<=", ">=", "==", "!=", "<", ">", "="}) {
      // `->` belongs to the surrounding syntax, never to a comparison.
      if (text_.substr(pos_, op.size()) == op && !(op == ">" && pos_ > 0 && text_[pos_ - 1] == '-')) {
        pos_ += op.size();
        std::string canonical = op == "=" ? "==" : std::string(op);
        return Expr::make(Expr::Kind::binary, canonical, {e, additive()});
      }
    }
    return e;
  }

  ExprPtr additive() {
    ExprPtr e = multiplicative();
    for (;;) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '+') {
        ++pos_;
        e = Expr::make(Expr::Kind::binary, "+", {e, multiplicative()});
      } else if (pos_ < text_.size() && text_[pos_] == '-' && !(pos_ + 1 < text_.size() && text_[pos_ + 1] == '>')) {
        ++pos_;
        e = Expr::make(Expr::Kind::binary, "-", {e, multiplicative()});
      } else {
        return e;
      }
    }
  }

  ExprPtr multiplicative() {
    ExprPtr e = unary();
    for (;;) {
      if (accept("*")) {
        e = Expr::make(Expr::Kind::binary, "*", {e, unary()});
      } else if (accept("/")) {
        e = Expr::make(Expr::Kind::binary, "/", {e, unary()});
      } else {
        return e;
      }
    }
  }

  ExprPtr unary() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '-' && !(pos_ + 1 < text_.size() && text_[pos_ + 1] == '>')) {
      ++pos_;
      return Expr::make(Expr::Kind::neg, "", {unary()});
    }
    if (pos_ < text_.size() && text_[pos_] == '!' && !(pos_ + 1 < text_.size() && text_[pos_ + 1] == '=')) {
      ++pos_;
      return Expr::make(Expr::Kind::logical_not, "", {unary()});
    }
    ExprPtr base = primary();
    if (accept("^")) return Expr::make(Expr::Kind::binary, "^", {base, unary()});
    return base;
  }

  ExprPtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = ternary();
      expect(")");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
      try {
        return Expr::make_number(Rational::parse(text_.substr(start, pos_ - start)));
      } catch (const Error&) {
        pos_ = start;
        fail("malformed number");
      }
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      ++pos_;
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != quote) {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        s += text_[pos_++];
      }
      if (pos_ >= text_.size()) fail("unterminated string");
      ++pos_;
      return Expr::make(Expr::Kind::string, s);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = identifier();
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        ++pos_;
        std::vector<ExprPtr> args;
        if (!accept(")")) {
          do {
            args.push_back(ternary());
          } while (accept(","));
          expect(")");
        }
        return Expr::make(Expr::Kind::call, name, std::move(args));
      }
      return Expr::make(Expr::Kind::ident, name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
};

}  // namespace rankdb
