#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rankdb/algebra.hpp"
#include "rankdb/condition.hpp"
#include "rankdb/error.hpp"
#include "rankdb/order_map.hpp"
#include "rankdb/table.hpp"

namespace rankdb {

/// Named tables, conditions and maps over one active chain.
struct Catalog {
  ChainPtr chain = ScoreChain::rational_unit();
  std::map<std::string, RankedTable> tables;
  std::map<std::string, RestrictionCondition> conditions;
  RestrictionCondition::MapTable maps;

  const RankedTable& table(const std::string& name) const {
    auto it = tables.find(name);
    if (it == tables.end()) throw Error(Errc::unknown_name, "table '" + name + "'");
    return it->second;
  }

  void add_table(const std::string& name, RankedTable t) {
    require_same_chain(*t.chain(), *chain);
    tables.insert_or_assign(name, std::move(t));
  }
};

class QueryNode;
using Query = std::shared_ptr<const QueryNode>;

/// Algebra expression tree.
class QueryNode {
 public:
  enum class Op { base, join, restrict, project, unite, difference, divide, residuum, semijoin, rename, product };

  Op op = Op::base;
  std::string name;                            // base table
  std::vector<Query> kids;
  std::optional<RestrictionCondition> cond;    // restrict
  std::vector<std::string> attrs;              // project
  std::map<std::string, std::string> renames;  // rename: old -> new
};

inline const char* op_name(QueryNode::Op op) {
  switch (op) {
    case QueryNode::Op::base: return "base";
    case QueryNode::Op::join: return "join";
    case QueryNode::Op::restrict: return "restrict";
    case QueryNode::Op::project: return "project";
    case QueryNode::Op::unite: return "union";
    case QueryNode::Op::difference: return "difference";
    case QueryNode::Op::divide: return "divide";
    case QueryNode::Op::residuum: return "residuum";
    case QueryNode::Op::semijoin: return "semijoin";
    case QueryNode::Op::rename: return "rename";
    case QueryNode::Op::product: return "product";
  }
  return "?";
}

namespace q {

inline Query node(QueryNode::Op op, std::vector<Query> kids) {
  auto n = std::make_shared<QueryNode>();
  n->op = op;
  n->kids = std::move(kids);
  return n;
}

inline Query base(std::string name) {
  auto n = std::make_shared<QueryNode>();
  n->name = std::move(name);
  return n;
}
inline Query join(Query a, Query b) { return node(QueryNode::Op::join, {std::move(a), std::move(b)}); }
inline Query restrict(Query a, RestrictionCondition c) {
  auto n = std::make_shared<QueryNode>();
  n->op = QueryNode::Op::restrict;
  n->kids = {std::move(a)};
  n->cond = std::move(c);
  return n;
}
inline Query project(Query a, std::vector<std::string> attrs) {
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  auto n = std::make_shared<QueryNode>();
  n->op = QueryNode::Op::project;
  n->kids = {std::move(a)};
  n->attrs = std::move(attrs);
  return n;
}
inline Query unite(Query a, Query b) { return node(QueryNode::Op::unite, {std::move(a), std::move(b)}); }
inline Query difference(Query a, Query b) { return node(QueryNode::Op::difference, {std::move(a), std::move(b)}); }
inline Query divide(Query dividend, Query mediator, Query divisor) {
  return node(QueryNode::Op::divide, {std::move(dividend), std::move(mediator), std::move(divisor)});
}
inline Query residuum(Query d3, Query d1, Query d2) {
  return node(QueryNode::Op::residuum, {std::move(d3), std::move(d1), std::move(d2)});
}
inline Query semijoin(Query a, Query b) { return node(QueryNode::Op::semijoin, {std::move(a), std::move(b)}); }
inline Query product(Query a, Query b) { return node(QueryNode::Op::product, {std::move(a), std::move(b)}); }
inline Query rename(Query a, std::map<std::string, std::string> m) {
  auto n = std::make_shared<QueryNode>();
  n->op = QueryNode::Op::rename;
  n->kids = {std::move(a)};
  n->renames = std::move(m);
  return n;
}

}  // namespace q

namespace planner_detail {

inline std::string child_path(const std::string& path, const QueryNode& n, std::size_t i) {
  return path + (path.empty() ? "" : "/") + op_name(n.op) + "[" + std::to_string(i) + "]";
}

inline Error located(const Error& e, const std::string& path) {
  if (e.message().find(" (at ") != std::string::npos) return e;
  return Error(e.code(), e.message() + " (at " + (path.empty() ? std::string("root") : path) + ")");
}

}  // namespace planner_detail

/// Scheme of the result, computed bottom-up without touching table data.
inline Scheme infer_scheme(const Query& e, const Catalog& cat, const std::string& path = "") {
  using Op = QueryNode::Op;
  std::vector<Scheme> k;
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    k.push_back(infer_scheme(e->kids[i], cat, planner_detail::child_path(path, *e, i)));
  }
  try {
    switch (e->op) {
      case Op::base: return cat.table(e->name).scheme();
      case Op::join:
      case Op::product: return k[0].unite(k[1]);
      case Op::restrict:
        for (const auto& dep : e->cond->dependencies()) {
          if (!k[0].contains(dep)) throw Error(Errc::scheme_mismatch, "condition reads '" + dep + "', not in " + k[0].str());
        }
        return k[0];
      case Op::project: return k[0].restrict_to(e->attrs);
      case Op::unite:
      case Op::difference:
        if (!(k[0] == k[1])) throw Error(Errc::scheme_mismatch, k[0].str() + " vs " + k[1].str());
        return k[0];
      case Op::residuum:
        if (!(k[0] == k[1]) || !(k[0] == k[2])) {
          throw Error(Errc::scheme_mismatch, "residuum operands " + k[0].str() + ", " + k[1].str() + ", " + k[2].str());
        }
        return k[0];
      case Op::divide:
        if (!k[0].intersect(k[2]).empty()) throw Error(Errc::scheme_mismatch, "dividend and divisor share attributes");
        if (!(k[1] == k[0].unite(k[2]))) {
          throw Error(Errc::scheme_mismatch, "mediator must be on " + k[0].unite(k[2]).str() + ", got " + k[1].str());
        }
        return k[0];
      case Op::semijoin:
        k[0].unite(k[1]);
        return k[0];
      case Op::rename: {
        std::vector<Attribute> attrs;
        for (const auto& [from, to] : e->renames) {
          if (!k[0].contains(from)) throw Error(Errc::scheme_mismatch, "cannot rename missing attribute '" + from + "'");
        }
        std::set<std::string> seen;
        for (auto a : k[0].attributes()) {
          auto it = e->renames.find(a.name);
          if (it != e->renames.end()) a.name = it->second;
          if (!seen.insert(a.name).second) throw Error(Errc::scheme_mismatch, "renaming produces '" + a.name + "' twice");
          attrs.push_back(a);
        }
        return Scheme(attrs);
      }
    }
  } catch (const Error& err) {
    throw planner_detail::located(err, path);
  }
  throw Error(Errc::invalid_argument, "bad query node");
}

inline RankedTable evaluate(const Query& e, const Catalog& cat, const std::string& path = "") {
  using Op = QueryNode::Op;
  std::vector<RankedTable> k;
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    k.push_back(evaluate(e->kids[i], cat, planner_detail::child_path(path, *e, i)));
  }
  try {
    switch (e->op) {
      case Op::base: return cat.table(e->name);
      case Op::join: return natural_join(k[0], k[1]);
      case Op::restrict: return restrict(k[0], *e->cond);
      case Op::project: return project(k[0], e->attrs);
      case Op::unite: return unite(k[0], k[1]);
      case Op::difference: return difference(k[0], k[1]);
      case Op::divide: return divide(k[0], k[1], k[2]);
      case Op::residuum: return residuum_tables(k[0], k[1], k[2]);
      case Op::semijoin: return semijoin(k[0], k[1]);
      case Op::rename: return rename(k[0], e->renames);
      case Op::product: return product_join(k[0], k[1]);
    }
  } catch (const Error& err) {
    throw planner_detail::located(err, path);
  }
  throw Error(Errc::invalid_argument, "bad query node");
}

/// Text form accepted by the query parser.
inline std::string to_string(const Query& e) {
  using Op = QueryNode::Op;
  auto args = [&](std::initializer_list<std::string> extra) {
    std::string out = std::string(op_name(e->op)) + "(";
    bool first = true;
    for (const auto& k : e->kids) {
      out += (first ? "" : ", ") + to_string(k);
      first = false;
    }
    for (const auto& x : extra) out += ", " + x;
    return out + ")";
  };
  switch (e->op) {
    case Op::base: return e->name;
    case Op::restrict: return args({e->cond->str()});
    case Op::project: {
      std::string list = "[";
      for (std::size_t i = 0; i < e->attrs.size(); ++i) list += (i ? ", " : "") + e->attrs[i];
      return args({list + "]"});
    }
    case Op::rename: {
      std::string list = "[";
      bool first = true;
      for (const auto& [from, to] : e->renames) {
        list += (first ? "" : ", ") + from + " -> " + to;
        first = false;
      }
      return args({list + "]"});
    }
    default: return args({});
  }
}

/// Indented tree, one operator per line.
inline std::string to_tree(const Query& e, int depth = 0) {
  using Op = QueryNode::Op;
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  std::string head = pad + op_name(e->op);
  if (e->op == Op::base) head = pad + e->name;
  if (e->op == Op::restrict) head += " " + e->cond->str();
  if (e->op == Op::project) {
    head += " [";
    for (std::size_t i = 0; i < e->attrs.size(); ++i) head += (i ? ", " : "") + e->attrs[i];
    head += "]";
  }
  if (e->op == Op::rename) {
    head += " [";
    bool first = true;
    for (const auto& [from, to] : e->renames) {
      head += (first ? "" : ", ") + from + " -> " + to;
      first = false;
    }
    head += "]";
  }
  std::string out = head + "\n";
  for (const auto& k : e->kids) out += to_tree(k, depth + 1);
  return out;
}

// Rewrite rules. Each applies at the root of `e` only and returns nullopt
// when its side condition does not hold.

namespace planner_detail {

inline bool deps_within(const RestrictionCondition& c, const Scheme& s) {
  auto deps = c.dependencies();
  return std::all_of(deps.begin(), deps.end(), [&](const std::string& d) { return s.contains(d); });
}

}  // namespace planner_detail

/// restrict(join(A, B), θ) -> join(restrict(A, θ), B) when θ reads only A
/// (or the mirror image for B).
inline std::optional<Query> rewrite_push_restriction(const Query& e, const Catalog& cat) {
  using Op = QueryNode::Op;
  if (e->op != Op::restrict || e->kids[0]->op != Op::join) return std::nullopt;
  const Query& j = e->kids[0];
  if (planner_detail::deps_within(*e->cond, infer_scheme(j->kids[0], cat))) {
    return q::join(q::restrict(j->kids[0], *e->cond), j->kids[1]);
  }
  if (planner_detail::deps_within(*e->cond, infer_scheme(j->kids[1], cat))) {
    return q::join(j->kids[0], q::restrict(j->kids[1], *e->cond));
  }
  return std::nullopt;
}

/// project(restrict(A, θ), S) -> restrict(project(A, S), θ) when θ reads only S.
inline std::optional<Query> rewrite_commute_project_restrict(const Query& e, const Catalog& cat) {
  using Op = QueryNode::Op;
  if (e->op != Op::project || e->kids[0]->op != Op::restrict) return std::nullopt;
  const Query& r = e->kids[0];
  Scheme kept = infer_scheme(r->kids[0], cat).restrict_to(e->attrs);
  if (!planner_detail::deps_within(*r->cond, kept)) return std::nullopt;
  return q::restrict(q::project(r->kids[0], e->attrs), *r->cond);
}

/// project(union(A, B), S) -> union(project(A, S), project(B, S)).
inline std::optional<Query> rewrite_project_over_union(const Query& e, const Catalog&) {
  using Op = QueryNode::Op;
  if (e->op != Op::project || e->kids[0]->op != Op::unite) return std::nullopt;
  const Query& u = e->kids[0];
  return q::unite(q::project(u->kids[0], e->attrs), q::project(u->kids[1], e->attrs));
}

/// project(project(A, R), S) -> project(A, S) for S within R.
inline std::optional<Query> rewrite_project_cascade(const Query& e, const Catalog&) {
  using Op = QueryNode::Op;
  if (e->op != Op::project || e->kids[0]->op != Op::project) return std::nullopt;
  const auto& inner = e->kids[0]->attrs;
  for (const auto& a : e->attrs) {
    if (!std::binary_search(inner.begin(), inner.end(), a)) return std::nullopt;
  }
  return q::project(e->kids[0]->kids[0], e->attrs);
}

/// semijoin(A, B) and project(join(A, B), scheme(A)) both become
/// join(A, project(B, shared attributes)).
inline std::optional<Query> rewrite_semijoin(const Query& e, const Catalog& cat) {
  using Op = QueryNode::Op;
  Query a, b;
  if (e->op == Op::semijoin) {
    a = e->kids[0];
    b = e->kids[1];
  } else if (e->op == Op::project && e->kids[0]->op == Op::join) {
    const Query& j = e->kids[0];
    for (int side = 0; side < 2 && !a; ++side) {
      if (infer_scheme(j->kids[side], cat).names() == e->attrs) {
        a = j->kids[side];
        b = j->kids[1 - side];
      }
    }
    if (!a) return std::nullopt;
  } else {
    return std::nullopt;
  }
  Scheme sa = infer_scheme(a, cat);
  Scheme sb = infer_scheme(b, cat);
  if (sb.is_subset_of(sa) && sb.names() == sa.intersect(sb).names()) return q::join(a, b);
  return q::join(a, q::project(b, sa.intersect(sb).names()));
}

using RewriteRule = std::function<std::optional<Query>(const Query&, const Catalog&)>;

/// Rules in the order they are tried at each node.
inline const std::vector<std::pair<std::string, RewriteRule>>& rewrite_rules() {
  static const std::vector<std::pair<std::string, RewriteRule>> rules{
      {"semijoin", rewrite_semijoin},
      {"push-restriction", rewrite_push_restriction},
      {"commute-project-restrict", rewrite_commute_project_restrict},
      {"project-cascade", rewrite_project_cascade},
      {"project-over-union", rewrite_project_over_union},
  };
  return rules;
}

namespace planner_detail {

inline Query with_kids(const Query& e, std::vector<Query> kids) {
  auto n = std::make_shared<QueryNode>(*e);
  n->kids = std::move(kids);
  return n;
}

// One bottom-up pass; `fired` collects rule names in application order.
inline Query rewrite_pass(const Query& e, const Catalog& cat, std::vector<std::string>& fired) {
  std::vector<Query> kids;
  bool changed = false;
  for (const auto& k : e->kids) {
    kids.push_back(rewrite_pass(k, cat, fired));
    changed = changed || kids.back() != k;
  }
  Query cur = changed ? with_kids(e, std::move(kids)) : e;
  for (const auto& [name, rule] : rewrite_rules()) {
    if (auto next = rule(cur, cat)) {
      fired.push_back(name);
      return *next;
    }
  }
  return cur;
}

}  // namespace planner_detail

struct OptimizeResult {
  Query expr;
  std::vector<std::string> applied;
};

/// Applies the rewrite rules bottom-up until nothing changes.
inline OptimizeResult optimize(const Query& e, const Catalog& cat, int max_passes = 64) {
  infer_scheme(e, cat);
  OptimizeResult out{e, {}};
  for (int i = 0; i < max_passes; ++i) {
    std::size_t before = out.applied.size();
    out.expr = planner_detail::rewrite_pass(out.expr, cat, out.applied);
    if (out.applied.size() == before) return out;
  }
  throw Error(Errc::invalid_argument, "rewriting did not reach a fixpoint");
}

/// A leaf of a join chain: restrictions, projections and renames over one base table.
inline bool is_leaf_expression(const Query& e) {
  using Op = QueryNode::Op;
  switch (e->op) {
    case Op::base: return true;
    case Op::restrict:
    case Op::project:
    case Op::rename: return is_leaf_expression(e->kids[0]);
    default: return false;
  }
}

/// Leaves of the top-level join tree, left to right.
inline std::vector<Query> join_chain_leaves(const Query& e) {
  if (e->op == QueryNode::Op::join) {
    auto l = join_chain_leaves(e->kids[0]);
    auto r = join_chain_leaves(e->kids[1]);
    l.insert(l.end(), r.begin(), r.end());
    return l;
  }
  return {e};
}

struct NormalizeResult {
  Query expr;
  std::vector<std::string> offending;  // paths of subtrees that block the join-chain form
  bool is_join_chain() const { return offending.empty(); }
};

/// Rewrites toward D1 ⋈ ... ⋈ Dn with each Di a leaf expression.
inline NormalizeResult normalize_to_join_chain(const Query& e, const Catalog& cat) {
  NormalizeResult out{optimize(e, cat).expr, {}};
  std::function<void(const Query&, const std::string&)> walk = [&](const Query& n, const std::string& path) {
    if (n->op == QueryNode::Op::join) {
      for (std::size_t i = 0; i < 2; ++i) walk(n->kids[i], planner_detail::child_path(path, *n, i));
    } else if (!is_leaf_expression(n)) {
      out.offending.push_back((path.empty() ? std::string("root") : path) + " (" + op_name(n->op) + ")");
    }
  };
  walk(out.expr, "");
  return out;
}

}  // namespace rankdb
