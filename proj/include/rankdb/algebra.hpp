#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankdb/condition.hpp"
#include "rankdb/error.hpp"
#include "rankdb/table.hpp"

namespace rankdb {

namespace algebra_detail {

inline void same_scheme(const RankedTable& a, const RankedTable& b, const char* op) {
  if (!(a.scheme() == b.scheme())) {
    throw Error(Errc::scheme_mismatch, std::string(op) + " needs equal schemes, got " + a.scheme().str() + " and " +
                                           b.scheme().str());
  }
  require_same_chain(*a.chain(), *b.chain());
}

template <class Combine>
RankedTable join_with(const RankedTable& d1, const RankedTable& d2, Combine combine) {
  require_same_chain(*d1.chain(), *d2.chain());
  Scheme out = d1.scheme().unite(d2.scheme());
  auto shared = d1.scheme().intersect(d2.scheme()).names();
  std::map<Tuple, std::vector<const std::pair<const Tuple, Score>*>> index;
  for (const auto& e : d2.entries()) index[e.first.project(shared)].push_back(&e);
  TableBuilder b(out, d1.chain());
  for (const auto& [r, s1] : d1.entries()) {
    auto it = index.find(r.project(shared));
    if (it == index.end()) continue;
    for (const auto* e : it->second) b.put(join_tuples(r, e->first), combine(s1, e->second));
  }
  return std::move(b).build();
}

}  // namespace algebra_detail

/// {∅ -> top}: the neutral element of the join.
inline RankedTable unit_table(const ChainPtr& chain) {
  TableBuilder b(Scheme{}, chain);
  b.put(Tuple{}, chain->top());
  return std::move(b).build();
}

inline RankedTable empty_table(const Scheme& scheme, const ChainPtr& chain) { return RankedTable(scheme, chain); }

/// Natural join; joinable pairs score the minimum of their scores.
inline RankedTable natural_join(const RankedTable& d1, const RankedTable& d2) {
  return algebra_detail::join_with(d1, d2, [](const Score& a, const Score& b) { return meet(a, b); });
}

/// Pointwise meet with θ. θ may read any subset of the scheme.
inline RankedTable restrict(const RankedTable& d, const RestrictionCondition& theta) {
  require_same_chain(*d.chain(), *theta.chain());
  for (const auto& dep : theta.dependencies()) {
    if (!d.scheme().contains(dep)) {
      throw Error(Errc::scheme_mismatch, "condition reads '" + dep + "', which is not in " + d.scheme().str());
    }
  }
  TableBuilder b(d.scheme(), d.chain());
  for (const auto& [r, s] : d.entries()) b.put(r, meet(s, theta(r)));
  return std::move(b).build();
}

/// Projection onto `names`; each tuple scores the maximum over its extensions.
inline RankedTable project(const RankedTable& d, const std::vector<std::string>& names) {
  Scheme out = d.scheme().restrict_to(names);
  auto keep = out.names();
  TableBuilder b(out, d.chain());
  for (const auto& [r, s] : d.entries()) b.put_max(r.project(keep), s);
  return std::move(b).build();
}

inline RankedTable unite(const RankedTable& d1, const RankedTable& d2) {
  algebra_detail::same_scheme(d1, d2, "union");
  TableBuilder b(d1.scheme(), d1.chain());
  for (const auto& [r, s] : d1.entries()) b.put_max(r, s);
  for (const auto& [r, s] : d2.entries()) b.put_max(r, s);
  return std::move(b).build();
}

/// Pointwise abjunction: d1(r) where it exceeds d2(r), bottom elsewhere.
inline RankedTable difference(const RankedTable& d1, const RankedTable& d2) {
  algebra_detail::same_scheme(d1, d2, "difference");
  TableBuilder b(d1.scheme(), d1.chain());
  for (const auto& [r, s] : d1.entries()) b.put(r, abjunction(s, d2.lookup(r)));
  return std::move(b).build();
}

/// Division of `mediator` (on R ∪ S) by `divisor` (on S), bounded by
/// `dividend` (on R): score(r) = min(dividend(r), inf_s divisor(s) -> mediator(rs)).
/// Only answer-set tuples of dividend and divisor can matter.
inline RankedTable divide(const RankedTable& dividend, const RankedTable& mediator, const RankedTable& divisor) {
  require_same_chain(*dividend.chain(), *mediator.chain());
  require_same_chain(*dividend.chain(), *divisor.chain());
  const Scheme& r = dividend.scheme();
  const Scheme& s = divisor.scheme();
  if (!r.intersect(s).empty()) {
    throw Error(Errc::scheme_mismatch, "dividend " + r.str() + " and divisor " + s.str() + " share attributes");
  }
  if (!(mediator.scheme() == r.unite(s))) {
    throw Error(Errc::scheme_mismatch, "mediator must be on " + r.unite(s).str() + ", got " + mediator.scheme().str());
  }
  TableBuilder b(r, dividend.chain());
  for (const auto& [rt, v3] : dividend.entries()) {
    Score val = v3;
    for (const auto& [st, v2] : divisor.entries()) {
      Score m = mediator.lookup(join_tuples(rt, st));
      if (v2 > m) val = meet(val, m);
      if (val.is_bottom()) break;
    }
    b.put(rt, val);
  }
  return std::move(b).build();
}

/// Pointwise d3(r) ∧ (d1(r) -> d2(r)).
inline RankedTable residuum_tables(const RankedTable& d3, const RankedTable& d1, const RankedTable& d2) {
  algebra_detail::same_scheme(d3, d1, "residuum");
  algebra_detail::same_scheme(d3, d2, "residuum");
  TableBuilder b(d3.scheme(), d3.chain());
  for (const auto& [r, s] : d3.entries()) b.put(r, meet(s, residuum(d1.lookup(r), d2.lookup(r))));
  return std::move(b).build();
}

/// Degree to which d1 is contained in d2: inf over r of d1(r) -> d2(r).
inline Score subsethood(const RankedTable& d1, const RankedTable& d2) {
  algebra_detail::same_scheme(d1, d2, "subsethood");
  Score out = d1.chain()->top();
  for (const auto& [r, s] : d1.entries()) {
    Score t = d2.lookup(r);
    if (s > t) out = meet(out, t);
  }
  return out;
}

inline Score similarity(const RankedTable& d1, const RankedTable& d2) {
  return meet(subsethood(d1, d2), subsethood(d2, d1));
}

/// d1 restricted to tuples that join with d2, scored by the best partner.
inline RankedTable semijoin(const RankedTable& d1, const RankedTable& d2) {
  return natural_join(d1, project(d2, d1.scheme().intersect(d2.scheme()).names()));
}

/// Renames attributes; `mapping` sends old names to new names.
inline RankedTable rename(const RankedTable& d, const std::map<std::string, std::string>& mapping) {
  std::vector<Attribute> attrs;
  std::set<std::string> targets;
  for (const auto& [from, to] : mapping) {
    if (!d.scheme().contains(from)) throw Error(Errc::scheme_mismatch, "cannot rename missing attribute '" + from + "'");
  }
  for (auto a : d.scheme().attributes()) {
    auto it = mapping.find(a.name);
    if (it != mapping.end()) a.name = it->second;
    if (!targets.insert(a.name).second) throw Error(Errc::scheme_mismatch, "renaming produces '" + a.name + "' twice");
    attrs.push_back(std::move(a));
  }
  TableBuilder b(Scheme(attrs), d.chain());
  for (const auto& [r, s] : d.entries()) {
    std::vector<Tuple::Cell> cells;
    for (const auto& [n, v] : r.cells()) {
      auto it = mapping.find(n);
      cells.emplace_back(it == mapping.end() ? n : it->second, v);
    }
    b.put(Tuple(std::move(cells)), s);
  }
  return std::move(b).build();
}

/// Join scored by the arithmetic product. Not invariant under order
/// transformations; kept to contrast with the min-based join.
inline RankedTable product_join(const RankedTable& d1, const RankedTable& d2) {
  if (d1.chain()->kind() != ScoreChain::Kind::rational_unit) {
    throw Error(Errc::unsupported, "product join needs the rational chain");
  }
  return algebra_detail::join_with(d1, d2, [&](const Score& a, const Score& b) {
    return d1.chain()->make(a.value() * b.value());
  });
}

}  // namespace rankdb
