#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "rankdb/error.hpp"
#include "rankdb/expr.hpp"
#include "rankdb/planner.hpp"

namespace rankdb {

/// Parses query text such as
///   project(restrict(join(houses, offers), 0.1*(4+bdrm)), [id, bdrm, price])
/// Restriction conditions are expressions; a bare identifier naming a catalog
/// condition refers to that condition. Calls inside conditions resolve against
/// the catalog's maps.
class QueryParser {
 public:
  QueryParser(std::string_view text, const Catalog* catalog) : text_(text), cat_(catalog) {}

  Query parse() {
    Query e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  const Catalog* cat_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    auto [line, col] = line_column(text_, pos_);
    throw ParseError(what, line, col);
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
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == ':')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> attribute_list() {
    expect('[');
    std::vector<std::string> out;
    if (accept(']')) return out;
    do {
      out.push_back(identifier());
    } while (accept(','));
    expect(']');
    return out;
  }

  std::map<std::string, std::string> rename_list() {
    expect('[');
    std::map<std::string, std::string> out;
    if (accept(']')) return out;
    do {
      std::string from = identifier();
      skip_ws();
      if (text_.substr(pos_, 2) != "->") fail("expected '->'");
      pos_ += 2;
      std::string to = identifier();
      if (!out.emplace(from, to).second) fail("attribute '" + from + "' renamed twice");
    } while (accept(','));
    expect(']');
    return out;
  }

  RestrictionCondition condition() {
    skip_ws();
    std::size_t start = pos_;
    ExprParser p(text_, pos_);
    ExprPtr e = p.parse_expression();
    pos_ = p.position();
    ChainPtr chain = cat_ ? cat_->chain : ScoreChain::rational_unit();
    if (e->kind == Expr::Kind::ident && cat_) {
      auto it = cat_->conditions.find(e->text);
      if (it != cat_->conditions.end()) return it->second;
    }
    try {
      return RestrictionCondition::expression(e, chain, cat_ ? cat_->maps : RestrictionCondition::MapTable{});
    } catch (const Error& err) {
      pos_ = start;
      fail(err.message());
    }
  }

  Query expr() {
    skip_ws();
    std::size_t start = pos_;
    std::string name = identifier();
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '(') return q::base(name);
    ++pos_;
    Query out;
    if (name == "join" || name == "union" || name == "difference" || name == "semijoin" || name == "product") {
      Query a = expr();
      expect(',');
      Query b = expr();
      if (name == "join") out = q::join(a, b);
      if (name == "union") out = q::unite(a, b);
      if (name == "difference") out = q::difference(a, b);
      if (name == "semijoin") out = q::semijoin(a, b);
      if (name == "product") out = q::product(a, b);
    } else if (name == "divide" || name == "residuum") {
      Query a = expr();
      expect(',');
      Query b = expr();
      expect(',');
      Query c = expr();
      out = name == "divide" ? q::divide(a, b, c) : q::residuum(a, b, c);
    } else if (name == "restrict") {
      Query a = expr();
      expect(',');
      out = q::restrict(a, condition());
    } else if (name == "project") {
      Query a = expr();
      expect(',');
      out = q::project(a, attribute_list());
    } else if (name == "rename") {
      Query a = expr();
      expect(',');
      out = q::rename(a, rename_list());
    } else {
      pos_ = start;
      fail("unknown operator '" + name + "'");
    }
    expect(')');
    return out;
  }
};

inline Query parse_query(std::string_view text, const Catalog* catalog = nullptr) {
  return QueryParser(text, catalog).parse();
}

}  // namespace rankdb
