#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rankdb/error.hpp"
#include "rankdb/expr.hpp"
#include "rankdb/order_map.hpp"
#include "rankdb/table.hpp"

namespace rankdb {

/// A restriction condition θ: tuples -> scores. Given either as an expression
/// over attribute values (clamped into the chain) or as an explicit table
/// whose missing tuples score bottom. Optional post-maps turn θ into θ∘f.
class RestrictionCondition {
 public:
  using MapTable = std::map<std::string, OrderMap, std::less<>>;

  static RestrictionCondition expression(ExprPtr e, ChainPtr chain, MapTable maps = {}) {
    RestrictionCondition c(std::move(chain));
    for (const auto& called : e->called_names()) {
      if (!maps.count(called)) throw Error(Errc::unknown_name, "map '" + called + "' used in condition");
    }
    c.expr_ = std::move(e);
    c.maps_ = std::move(maps);
    return c;
  }

  static RestrictionCondition parse(std::string_view text, ChainPtr chain, MapTable maps = {}) {
    return expression(ExprParser::parse_all(text), std::move(chain), std::move(maps));
  }

  static RestrictionCondition from_table(RankedTable t) {
    RestrictionCondition c(t.chain());
    c.table_ = std::make_shared<RankedTable>(std::move(t));
    return c;
  }

  static RestrictionCondition constant(const Score& s) {
    return expression(Expr::make_number(s.value()), s.chain());
  }

  const ChainPtr& chain() const noexcept { return chain_; }
  const std::string& name() const noexcept { return name_; }
  bool is_expression() const noexcept { return expr_ != nullptr; }
  const ExprPtr& expr() const noexcept { return expr_; }
  const std::shared_ptr<const RankedTable>& table() const noexcept { return table_; }
  const std::vector<OrderMap>& post_maps() const noexcept { return post_; }

  RestrictionCondition named(std::string n) const {
    RestrictionCondition c = *this;
    c.name_ = std::move(n);
    return c;
  }

  /// θ∘f: f applied to every score θ produces.
  RestrictionCondition then(const OrderMap& f) const {
    require_same_chain(*f.chain(), *chain_);
    RestrictionCondition c = *this;
    c.post_.push_back(f);
    if (!c.name_.empty()) c.name_ = (f.name().empty() ? std::string("f") : f.name()) + "(" + c.name_ + ")";
    return c;
  }

  /// Attribute names the condition reads.
  std::set<std::string> dependencies() const {
    if (expr_) return expr_->free_identifiers();
    auto names = table_->scheme().names();
    return {names.begin(), names.end()};
  }

  Score operator()(const Tuple& r) const {
    Score s = base(r);
    for (const auto& f : post_) s = f.apply(s);
    return s;
  }

  /// Display form: the name when given, otherwise the expression text.
  std::string str() const {
    if (!name_.empty()) return name_;
    std::string inner = expr_ ? expr_->str() : "<table " + table_->scheme().str() + ">";
    for (const auto& f : post_) inner = (f.name().empty() ? std::string("f") : f.name()) + "(" + inner + ")";
    return inner;
  }

 private:
  explicit RestrictionCondition(ChainPtr chain) : chain_(std::move(chain)) {}

  Score to_score(const ExprValue& v) const {
    if (v.index() == 2) {
      if (chain_->kind() == ScoreChain::Kind::symbolic) return chain_->parse(std::get<2>(v));
      throw Error(Errc::domain, "condition produced the string '" + std::get<2>(v) + "'");
    }
    Rational q = v.index() == 0 ? std::get<0>(v) : quantize(v, kAnalyticPlaces);
    if (chain_->kind() == ScoreChain::Kind::symbolic) {
      if (q != Rational(0) && q != Rational(1)) {
        throw Error(Errc::domain, "numeric conditions on a symbolic chain must yield 0 or 1");
      }
      return q == Rational(0) ? chain_->bottom() : chain_->top();
    }
    q = std::max(chain_->bottom_value(), std::min(chain_->top_value(), q));
    return chain_->make(q);
  }

  Score base(const Tuple& r) const {
    if (table_) {
      Tuple key = r.project(table_->scheme());
      return table_->lookup(key);
    }
    ExprEnv env;
    env.lookup = [&](std::string_view id) -> std::optional<ExprValue> {
      if (const Value* v = r.find(id)) return from_value(*v);
      return std::nullopt;
    };
    env.call = [&](std::string_view fn, const std::vector<ExprValue>& args) -> std::optional<ExprValue> {
      auto it = maps_.find(fn);
      if (it == maps_.end()) return std::nullopt;
      if (args.size() != 1) throw Error(Errc::invalid_argument, "map '" + std::string(fn) + "' takes one argument");
      return it->second.apply(to_score(args[0])).value();
    };
    return to_score(expr_->eval(env));
  }

  ChainPtr chain_;
  std::string name_;
  ExprPtr expr_;
  std::shared_ptr<const RankedTable> table_;
  MapTable maps_;
  std::vector<OrderMap> post_;
};

}  // namespace rankdb
