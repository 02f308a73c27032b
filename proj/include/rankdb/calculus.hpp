#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rankdb/algebra.hpp"
#include "rankdb/error.hpp"
#include "rankdb/expr.hpp"
#include "rankdb/order_map.hpp"
#include "rankdb/planner.hpp"
#include "rankdb/table.hpp"

namespace rankdb {

class FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

/// Formula of first-order Gödel logic without function symbols.
/// Disjunction, negation and equivalence are abbreviations built from these.
class FormulaNode {
 public:
  enum class Kind { falsum, atom, conj, implies, forall, exists };

  Kind kind = Kind::falsum;
  std::string name;               // relation symbol, or the bound variable of a quantifier
  std::vector<std::string> vars;  // atom arguments
  std::vector<Formula> kids;
};

namespace fm {

inline Formula falsum() { return std::make_shared<FormulaNode>(); }

inline Formula atom(std::string rel, std::vector<std::string> vars) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaNode::Kind::atom;
  n->name = std::move(rel);
  n->vars = std::move(vars);
  return n;
}

inline Formula binary(FormulaNode::Kind k, Formula a, Formula b) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = k;
  n->kids = {std::move(a), std::move(b)};
  return n;
}

inline Formula conj(Formula a, Formula b) { return binary(FormulaNode::Kind::conj, std::move(a), std::move(b)); }
inline Formula implies(Formula a, Formula b) { return binary(FormulaNode::Kind::implies, std::move(a), std::move(b)); }

inline Formula quantifier(FormulaNode::Kind k, std::string var, Formula body) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = k;
  n->name = std::move(var);
  n->kids = {std::move(body)};
  return n;
}
inline Formula forall(std::string var, Formula body) {
  return quantifier(FormulaNode::Kind::forall, std::move(var), std::move(body));
}
inline Formula exists(std::string var, Formula body) {
  return quantifier(FormulaNode::Kind::exists, std::move(var), std::move(body));
}

/// ¬φ = φ ⇒ 0
inline Formula negation(Formula a) { return implies(std::move(a), falsum()); }
inline Formula verum() { return negation(falsum()); }
/// φ ⇔ ψ = (φ ⇒ ψ) ∧ (ψ ⇒ φ)
inline Formula iff(const Formula& a, const Formula& b) { return conj(implies(a, b), implies(b, a)); }
/// φ ∨ ψ = ((φ ⇒ ψ) ⇒ ψ) ∧ ((ψ ⇒ φ) ⇒ φ)
inline Formula disj(const Formula& a, const Formula& b) {
  return conj(implies(implies(a, b), b), implies(implies(b, a), a));
}

}  // namespace fm

inline std::set<std::string> free_vars(const Formula& phi) {
  using K = FormulaNode::Kind;
  switch (phi->kind) {
    case K::falsum: return {};
    case K::atom: return {phi->vars.begin(), phi->vars.end()};
    case K::conj:
    case K::implies: {
      auto a = free_vars(phi->kids[0]);
      auto b = free_vars(phi->kids[1]);
      a.insert(b.begin(), b.end());
      return a;
    }
    case K::forall:
    case K::exists: {
      auto a = free_vars(phi->kids[0]);
      a.erase(phi->name);
      return a;
    }
  }
  return {};
}

inline std::string to_string(const Formula& phi) {
  using K = FormulaNode::Kind;
  switch (phi->kind) {
    case K::falsum: return "false";
    case K::atom: {
      std::string out = phi->name + "(";
      for (std::size_t i = 0; i < phi->vars.size(); ++i) out += (i ? ", " : "") + phi->vars[i];
      return out + ")";
    }
    case K::conj: return "(" + to_string(phi->kids[0]) + " & " + to_string(phi->kids[1]) + ")";
    case K::implies: return "(" + to_string(phi->kids[0]) + " -> " + to_string(phi->kids[1]) + ")";
    case K::forall: return "(forall " + phi->name + ". " + to_string(phi->kids[0]) + ")";
    case K::exists: return "(exists " + phi->name + ". " + to_string(phi->kids[0]) + ")";
  }
  return "?";
}

/// Replaces free occurrences of variables per `subst`. Bound variables that
/// would capture a substituted name are renamed first.
inline Formula substitute(const Formula& phi, const std::map<std::string, std::string>& subst) {
  using K = FormulaNode::Kind;
  switch (phi->kind) {
    case K::falsum: return phi;
    case K::atom: {
      auto vars = phi->vars;
      for (auto& v : vars) {
        auto it = subst.find(v);
        if (it != subst.end()) v = it->second;
      }
      return fm::atom(phi->name, vars);
    }
    case K::conj:
    case K::implies:
      return fm::binary(phi->kind, substitute(phi->kids[0], subst), substitute(phi->kids[1], subst));
    case K::forall:
    case K::exists: {
      auto inner = subst;
      inner.erase(phi->name);
      std::string bound = phi->name;
      Formula body = phi->kids[0];
      bool captures = std::any_of(inner.begin(), inner.end(), [&](const auto& kv) { return kv.second == bound; });
      if (captures) {
        auto used = free_vars(body);
        for (const auto& kv : inner) used.insert(kv.second);
        std::string fresh = bound;
        for (int i = 1; used.count(fresh); ++i) fresh = bound + "_" + std::to_string(i);
        body = substitute(body, {{bound, fresh}});
        bound = fresh;
      }
      return fm::quantifier(phi->kind, bound, substitute(body, inner));
    }
  }
  return phi;
}

/// Parses `forall x. (r(x, y) -> s(y))`. Connectives, loosest first:
/// `<->`, `->` (right associative), `|`, `&`, then `!` and quantifiers.
/// `false`/`0` and `true`/`1` are the constants.
class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse() {
    Formula f = iff();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

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

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  Formula iff() {
    Formula a = implication();
    while (accept("<->")) a = fm::iff(a, implication());
    return a;
  }

  Formula implication() {
    Formula a = disjunction();
    if (accept("->")) return fm::implies(a, implication());
    return a;
  }

  Formula disjunction() {
    Formula a = conjunction();
    while (accept("|")) a = fm::disj(a, conjunction());
    return a;
  }

  Formula conjunction() {
    Formula a = unary();
    while (accept("&")) a = fm::conj(a, unary());
    return a;
  }

  Formula unary() {
    skip_ws();
    if (accept("!")) return fm::negation(unary());
    if (accept("(")) {
      Formula f = iff();
      if (!accept(")")) fail("expected ')'");
      return f;
    }
    if (accept("0")) return fm::falsum();
    if (accept("1")) return fm::verum();
    std::size_t start = pos_;
    std::string word = identifier();
    if (word == "false") return fm::falsum();
    if (word == "true") return fm::verum();
    if (word == "not") return fm::negation(unary());
    if (word == "forall" || word == "exists") {
      std::vector<std::string> vars{identifier()};
      while (accept(",")) vars.push_back(identifier());
      if (!accept(".")) fail("expected '.' after quantified variables");
      Formula body = iff();
      for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        body = word == "forall" ? fm::forall(*it, body) : fm::exists(*it, body);
      }
      return body;
    }
    if (!accept("(")) {
      pos_ = start;
      fail("expected an atom such as " + word + "(x)");
    }
    std::vector<std::string> args;
    if (!accept(")")) {
      do {
        args.push_back(identifier());
      } while (accept(","));
      if (!accept(")")) fail("expected ')'");
    }
    return fm::atom(word, args);
  }
};

inline Formula parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

/// Interpretation of one relation symbol: scored value vectors, absent = bottom.
struct Relation {
  std::size_t arity = 0;
  std::map<std::vector<Value>, Score> scores;
};

/// A finite structure: universe plus finite interpretations of the symbols.
struct Structure {
  ChainPtr chain = ScoreChain::rational_unit();
  std::vector<Value> universe;  // sorted, distinct
  std::map<std::string, Relation> relations;

  void normalize() {
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  }

  /// Throws unless every interpreted vector uses universe values only.
  void validate() const {
    for (const auto& [name, rel] : relations) {
      for (const auto& [vec, s] : rel.scores) {
        if (vec.size() != rel.arity) throw Error(Errc::invalid_argument, "arity mismatch in '" + name + "'");
        require_same_chain(*s.chain(), *chain);
        for (const auto& v : vec) {
          if (!std::binary_search(universe.begin(), universe.end(), v)) {
            throw Error(Errc::domain, "value '" + value_str(v) + "' of '" + name + "' is outside the universe");
          }
        }
      }
    }
  }
};

using Valuation = std::map<std::string, Value>;

inline Score evaluate(const Formula& phi, const Structure& m, Valuation& v) {
  using K = FormulaNode::Kind;
  switch (phi->kind) {
    case K::falsum: return m.chain->bottom();
    case K::atom: {
      auto it = m.relations.find(phi->name);
      if (it == m.relations.end()) throw Error(Errc::unknown_name, "relation symbol '" + phi->name + "'");
      if (it->second.arity != phi->vars.size()) {
        throw Error(Errc::invalid_argument, "'" + phi->name + "' has arity " + std::to_string(it->second.arity) +
                                                ", used with " + std::to_string(phi->vars.size()) + " arguments");
      }
      std::vector<Value> key;
      for (const auto& x : phi->vars) {
        auto b = v.find(x);
        if (b == v.end()) throw Error(Errc::unknown_name, "unbound variable '" + x + "'");
        key.push_back(b->second);
      }
      auto s = it->second.scores.find(key);
      return s == it->second.scores.end() ? m.chain->bottom() : s->second;
    }
    case K::conj: return meet(evaluate(phi->kids[0], m, v), evaluate(phi->kids[1], m, v));
    case K::implies: return residuum(evaluate(phi->kids[0], m, v), evaluate(phi->kids[1], m, v));
    case K::forall:
    case K::exists: {
      bool all = phi->kind == K::forall;
      Score acc = all ? m.chain->top() : m.chain->bottom();
      std::optional<Value> saved;
      if (auto it = v.find(phi->name); it != v.end()) saved = it->second;
      for (const auto& u : m.universe) {
        v[phi->name] = u;
        Score s = evaluate(phi->kids[0], m, v);
        acc = all ? meet(acc, s) : join_sup(acc, s);
        if (all ? acc.is_bottom() : acc.is_top()) break;
      }
      if (saved) {
        v[phi->name] = *saved;
      } else {
        v.erase(phi->name);
      }
      return acc;
    }
  }
  throw Error(Errc::invalid_argument, "bad formula");
}

inline Score evaluate(const Formula& phi, const Structure& m, const Valuation& v) {
  Valuation copy = v;
  return evaluate(phi, m, copy);
}

/// The table a formula induces: free variables become string attributes and
/// each valuation over the universe scores the formula's value.
inline RankedTable table_of(const Structure& m, const Formula& phi) {
  auto fv = free_vars(phi);
  std::vector<std::string> vars(fv.begin(), fv.end());
  std::vector<Attribute> attrs;
  for (const auto& x : vars) attrs.push_back({x, AttrType::str, std::nullopt});
  TableBuilder b(Scheme(attrs), m.chain);
  Valuation val;
  std::vector<std::size_t> idx(vars.size(), 0);
  if (!vars.empty() && m.universe.empty()) return std::move(b).build();
  for (;;) {
    std::vector<Tuple::Cell> cells;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      val[vars[i]] = m.universe[idx[i]];
      cells.emplace_back(vars[i], value_str(m.universe[idx[i]]));
    }
    b.put(Tuple(std::move(cells)), evaluate(phi, m, val));
    std::size_t i = 0;
    while (i < vars.size() && ++idx[i] == m.universe.size()) idx[i++] = 0;
    if (i == vars.size()) break;
  }
  return std::move(b).build();
}

/// Applies `f` to every score of every interpretation.
inline Structure compose_structure(const Structure& m, const OrderMap& f) {
  Structure out = m;
  for (auto& [name, rel] : out.relations) {
    std::map<std::vector<Value>, Score> next;
    for (const auto& [vec, s] : rel.scores) {
      Score t = f.apply(s);
      if (!t.is_bottom()) next.emplace(vec, t);
    }
    rel.scores = std::move(next);
  }
  return out;
}

/// Structure whose symbols are catalog tables; atom arguments follow the
/// tables' attribute names in sorted order.
inline Structure structure_from_catalog(const Catalog& cat) {
  Structure m;
  m.chain = cat.chain;
  for (const auto& [name, t] : cat.tables) {
    Relation rel;
    rel.arity = t.scheme().size();
    for (const auto& [tuple, s] : t.entries()) {
      std::vector<Value> vec;
      for (const auto& [attr, v] : tuple.cells()) {
        vec.push_back(v);
        m.universe.push_back(v);
      }
      rel.scores.emplace(std::move(vec), s);
    }
    m.relations.emplace(name, std::move(rel));
  }
  m.normalize();
  return m;
}

struct FormulaTranslation {
  Formula formula;
  Structure structure;
};

namespace calculus_detail {

class AlgebraToFormula {
 public:
  explicit AlgebraToFormula(const Catalog& cat) : cat_(cat) {
    m_.chain = cat.chain;
  }

  FormulaTranslation run(const Query& e) {
    Formula f = translate(e);
    m_.normalize();
    return {f, m_};
  }

 private:
  const Catalog& cat_;
  Structure m_;
  int fresh_ = 0;
  int conditions_ = 0;

  std::string fresh_var() { return "_b" + std::to_string(++fresh_); }

  void add_relation(const std::string& symbol, const RankedTable& t) {
    if (m_.relations.count(symbol)) return;
    Relation rel;
    rel.arity = t.scheme().size();
    for (const auto& [tuple, s] : t.entries()) {
      std::vector<Value> vec;
      for (const auto& [attr, v] : tuple.cells()) {
        vec.push_back(v);
        m_.universe.push_back(v);
      }
      rel.scores.emplace(std::move(vec), s);
    }
    m_.relations.emplace(symbol, std::move(rel));
  }

  Formula exists_over(const std::vector<std::string>& dropped, Formula body) {
    for (const auto& a : dropped) {
      std::string b = fresh_var();
      body = fm::exists(b, substitute(body, {{a, b}}));
    }
    return body;
  }

  Formula translate(const Query& e) {
    using Op = QueryNode::Op;
    switch (e->op) {
      case Op::base: {
        const RankedTable& t = cat_.table(e->name);
        add_relation(e->name, t);
        return fm::atom(e->name, t.scheme().names());
      }
      case Op::join: return fm::conj(translate(e->kids[0]), translate(e->kids[1]));
      case Op::restrict: {
        // θ becomes a fresh symbol interpreted on the argument's answer set;
        // elsewhere the conjunction is bottom anyway.
        RankedTable arg = evaluate(e->kids[0], cat_);
        auto deps = e->cond->dependencies();
        std::vector<std::string> vars(deps.begin(), deps.end());
        TableBuilder b(arg.scheme().restrict_to(vars), cat_.chain);
        for (const auto& [tuple, s] : arg.entries()) b.put(tuple.project(vars), (*e->cond)(tuple));
        std::string symbol = "theta" + std::to_string(++conditions_);
        add_relation(symbol, std::move(b).build());
        return fm::conj(fm::atom(symbol, vars), translate(e->kids[0]));
      }
      case Op::project: {
        Scheme s = infer_scheme(e->kids[0], cat_);
        return exists_over(s.minus(s.restrict_to(e->attrs)).names(), translate(e->kids[0]));
      }
      case Op::unite: return fm::disj(translate(e->kids[0]), translate(e->kids[1]));
      case Op::divide: {
        Scheme divisor = infer_scheme(e->kids[2], cat_);
        Formula body = fm::implies(translate(e->kids[2]), translate(e->kids[1]));
        for (const auto& a : divisor.names()) {
          std::string b = fresh_var();
          body = fm::forall(b, substitute(body, {{a, b}}));
        }
        return fm::conj(translate(e->kids[0]), body);
      }
      case Op::residuum:
        return fm::conj(translate(e->kids[0]), fm::implies(translate(e->kids[1]), translate(e->kids[2])));
      case Op::semijoin: {
        Scheme a = infer_scheme(e->kids[0], cat_);
        Scheme b = infer_scheme(e->kids[1], cat_);
        return fm::conj(translate(e->kids[0]), exists_over(b.minus(a).names(), translate(e->kids[1])));
      }
      case Op::rename: return substitute(translate(e->kids[0]), e->renames);
      case Op::difference:
      case Op::product:
        throw Error(Errc::unsupported, std::string(op_name(e->op)) + " has no counterpart formula");
    }
    throw Error(Errc::invalid_argument, "bad query node");
  }
};

}  // namespace calculus_detail

/// Formula and structure such that table_of(structure, formula) equals the
/// query result (with attributes retyped to strings).
inline FormulaTranslation algebra_to_formula(const Query& e, const Catalog& cat) {
  infer_scheme(e, cat);
  return calculus_detail::AlgebraToFormula(cat).run(e);
}

struct AlgebraTranslation {
  Query expr;
  Catalog catalog;
};

namespace calculus_detail {

inline const char* kDomainTable = "dom";
inline const char* kDomainAttr = "_d";
inline const char* kUnitTable = "unit";
inline const char* kZeroTable = "zero";

inline std::string relation_table(const std::string& symbol) { return "rel:" + symbol; }
inline std::string position_attr(std::size_t i) { return "_" + std::to_string(i + 1); }

inline Query domain_of(const std::set<std::string>& vars) {
  Query out;
  for (const auto& x : vars) {
    Query d = q::rename(q::base(kDomainTable), {{kDomainAttr, x}});
    out = out ? q::join(out, d) : d;
  }
  return out ? out : q::base(kUnitTable);
}

inline std::set<std::string> set_minus(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline Query to_algebra(const Formula& phi, const Structure& m) {
  using K = FormulaNode::Kind;
  switch (phi->kind) {
    case K::falsum: return q::base(kZeroTable);
    case K::atom: {
      Query e = q::base(relation_table(phi->name));
      std::map<std::string, std::size_t> first;
      for (std::size_t i = 0; i < phi->vars.size(); ++i) {
        auto [it, fresh] = first.emplace(phi->vars[i], i);
        if (!fresh) {
          auto eq = Expr::make(Expr::Kind::binary, "==",
                               {Expr::make(Expr::Kind::ident, position_attr(it->second)),
                                Expr::make(Expr::Kind::ident, position_attr(i))});
          e = q::restrict(e, RestrictionCondition::expression(eq, m.chain));
        }
      }
      std::vector<std::string> keep;
      std::map<std::string, std::string> renames;
      for (const auto& [var, i] : first) {
        keep.push_back(position_attr(i));
        renames.emplace(position_attr(i), var);
      }
      if (keep.size() != phi->vars.size()) e = q::project(e, keep);
      return renames.empty() ? e : q::rename(e, renames);
    }
    case K::conj: return q::join(to_algebra(phi->kids[0], m), to_algebra(phi->kids[1], m));
    case K::implies: {
      auto fa = free_vars(phi->kids[0]);
      auto fb = free_vars(phi->kids[1]);
      auto all = fa;
      all.insert(fb.begin(), fb.end());
      auto pad = [&](Query e, const std::set<std::string>& have) {
        auto missing = set_minus(all, have);
        return missing.empty() ? e : q::join(e, domain_of(missing));
      };
      return q::residuum(domain_of(all), pad(to_algebra(phi->kids[0], m), fa), pad(to_algebra(phi->kids[1], m), fb));
    }
    case K::exists:
    case K::forall: {
      auto fv = free_vars(phi->kids[0]);
      Query body = to_algebra(phi->kids[0], m);
      if (!fv.count(phi->name)) {
        if (!m.universe.empty()) return body;
        // over an empty universe the quantifier ranges over nothing
        if (phi->kind == K::exists) return q::join(body, q::base(kZeroTable));
        return fv.empty() ? q::base(kUnitTable) : q::join(body, domain_of(fv));
      }
      auto rest = fv;
      rest.erase(phi->name);
      if (phi->kind == K::exists) return q::project(body, {rest.begin(), rest.end()});
      return q::divide(domain_of(rest), body, q::rename(q::base(kDomainTable), {{kDomainAttr, phi->name}}));
    }
  }
  throw Error(Errc::invalid_argument, "bad formula");
}

}  // namespace calculus_detail

/// Algebra expression over a catalog derived from `m` whose value equals
/// table_of(m, phi). The catalog holds one table per symbol (attributes
/// _1.._n), the universe `dom` on `_d` at top, `unit` = {∅ -> top} and the
/// empty table `zero` on ∅.
inline AlgebraTranslation formula_to_algebra(const Formula& phi, const Structure& m) {
  using namespace calculus_detail;
  Catalog cat;
  cat.chain = m.chain;
  for (const auto& [name, rel] : m.relations) {
    std::vector<Attribute> attrs;
    for (std::size_t i = 0; i < rel.arity; ++i) attrs.push_back({position_attr(i), AttrType::str, std::nullopt});
    TableBuilder b(Scheme(attrs), m.chain);
    for (const auto& [vec, s] : rel.scores) {
      std::vector<Tuple::Cell> cells;
      for (std::size_t i = 0; i < vec.size(); ++i) cells.emplace_back(position_attr(i), value_str(vec[i]));
      b.put(Tuple(std::move(cells)), s);
    }
    cat.add_table(relation_table(name), std::move(b).build());
  }
  TableBuilder dom(Scheme({{kDomainAttr, AttrType::str, std::nullopt}}), m.chain);
  for (const auto& u : m.universe) dom.put(Tuple({{kDomainAttr, value_str(u)}}), m.chain->top());
  cat.add_table(kDomainTable, std::move(dom).build());
  cat.add_table(kUnitTable, unit_table(m.chain));
  cat.add_table(kZeroTable, empty_table(Scheme{}, m.chain));
  return {to_algebra(phi, m), std::move(cat)};
}

}  // namespace rankdb
