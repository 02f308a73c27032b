#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "rankdb/error.hpp"
#include "rankdb/table.hpp"

namespace rankdb {

/// A cone of tuples. Answer-set members are listed; tuples outside the answer
/// set are summarized by `zero_tuples`. `all_tuples` marks the whole Tupl(R).
struct Cone {
  bool all_tuples = false;
  bool zero_tuples = false;
  std::set<Tuple> members;

  bool contains(const Tuple& r, const RankedTable& d) const {
    if (all_tuples || members.count(r)) return true;
    return zero_tuples && !d.entries().count(r);
  }
};

namespace ordinal_detail {

inline void require_same_scheme(const RankedTable& a, const RankedTable& b) {
  if (!(a.scheme() == b.scheme())) {
    throw Error(Errc::scheme_mismatch, a.scheme().str() + " vs " + b.scheme().str());
  }
  require_same_chain(*a.chain(), *b.chain());
}

inline std::set<Tuple> support_union(const RankedTable& a, const RankedTable& b) {
  std::set<Tuple> out;
  for (const auto& e : a.entries()) out.insert(e.first);
  for (const auto& e : b.entries()) out.insert(e.first);
  return out;
}

// Whether Tupl(R) holds a tuple outside `support`.
inline bool has_fresh_tuple(const Scheme& scheme, std::size_t support) {
  auto n = scheme.domain_size();
  return !n || *n > support;
}

}  // namespace ordinal_detail

/// U(D,r): tuples scoring at least D(r).
inline Cone upper_cone(const RankedTable& d, const Tuple& r) {
  Score s = d.score_of(r);
  Cone c;
  if (s.is_bottom()) {
    c.all_tuples = true;
    return c;
  }
  for (const auto& [t, v] : d.entries()) {
    if (v >= s) c.members.insert(t);
  }
  return c;
}

/// L(D,r): tuples scoring at most D(r); always holds the zero tuples.
inline Cone lower_cone(const RankedTable& d, const Tuple& r) {
  Score s = d.score_of(r);
  Cone c;
  c.zero_tuples = true;
  for (const auto& [t, v] : d.entries()) {
    if (v <= s) c.members.insert(t);
  }
  if (s.is_top() || (c.members.size() == d.size())) c.all_tuples = true;
  return c;
}

struct InclusionResult {
  bool holds = true;
  std::optional<Tuple> witness;  // some r with U(d1,r) not inside U(d2,r)

  explicit operator bool() const noexcept { return holds; }
};

/// Decides d1 ⊑ d2 by comparing U-cones tuple by tuple. Tuples outside both
/// answer sets are interchangeable, so one of them stands in for all.
/// Quadratic; serves as the reference procedure.
inline InclusionResult included_by_upper_cones(const RankedTable& d1, const RankedTable& d2) {
  ordinal_detail::require_same_scheme(d1, d2);
  auto support = ordinal_detail::support_union(d1, d2);
  bool fresh = ordinal_detail::has_fresh_tuple(d1.scheme(), support.size());
  ChainPtr chain = d1.chain();
  struct Point {
    const Tuple* tuple;
    Score s1, s2;
  };
  std::vector<Point> universe;
  for (const auto& t : support) universe.push_back({&t, d1.lookup(t), d2.lookup(t)});
  if (fresh) universe.push_back({nullptr, chain->bottom(), chain->bottom()});
  for (const auto& r : universe) {
    for (const auto& q : universe) {
      if (q.s1 >= r.s1 && q.s2 < r.s2) {
        if (r.tuple) return {false, *r.tuple};
        return {false, std::nullopt};
      }
    }
  }
  return {};
}

/// Same relation decided through L-cones: d1 ⊑ d2 iff L(d1,r) ⊆ L(d2,r) for all r.
inline InclusionResult included_by_lower_cones(const RankedTable& d1, const RankedTable& d2) {
  ordinal_detail::require_same_scheme(d1, d2);
  auto support = ordinal_detail::support_union(d1, d2);
  bool fresh = ordinal_detail::has_fresh_tuple(d1.scheme(), support.size());
  ChainPtr chain = d1.chain();
  std::vector<std::pair<Score, Score>> universe;
  std::vector<const Tuple*> names;
  for (const auto& t : support) {
    universe.emplace_back(d1.lookup(t), d2.lookup(t));
    names.push_back(&t);
  }
  if (fresh) {
    universe.emplace_back(chain->bottom(), chain->bottom());
    names.push_back(nullptr);
  }
  for (std::size_t i = 0; i < universe.size(); ++i) {
    for (std::size_t j = 0; j < universe.size(); ++j) {
      // j lies in L(d1, i) but not in L(d2, i); then U(d1, j) is not inside U(d2, j)
      if (universe[j].first <= universe[i].first && universe[j].second > universe[i].second) {
        if (names[j]) return {false, *names[j]};
        return {false, std::nullopt};
      }
    }
  }
  return {};
}

/// d1 ⊑ d2. When a tuple outside both answer sets exists (always for
/// infinite domains) this reduces to: the answer set of d2 lies within that
/// of d1, and d2 is monotone in d1 on d1's answer set. Otherwise falls back to
/// the cone comparison over the enumerated finite domain.
inline InclusionResult ordinally_included(const RankedTable& d1, const RankedTable& d2) {
  ordinal_detail::require_same_scheme(d1, d2);
  auto support = ordinal_detail::support_union(d1, d2);
  if (!ordinal_detail::has_fresh_tuple(d1.scheme(), support.size())) return included_by_upper_cones(d1, d2);

  for (const auto& [t, s] : d2.entries()) {
    if (!d1.entries().count(t)) return {false, t};
  }
  // Walk d1's answer set from the top score down, tracking the least d2
  // score seen so far among tuples at or above the current d1 level.
  auto rows = d1.sorted_rows();
  std::size_t i = 0;
  std::optional<Score> floor;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].second == rows[i].second) {
      Score s2 = d2.lookup(rows[j].first);
      if (!floor || s2 < *floor) floor = s2;
      ++j;
    }
    for (std::size_t k = i; k < j; ++k) {
      if (d2.lookup(rows[k].first) > *floor) return {false, rows[k].first};
    }
    i = j;
  }
  return {};
}

inline bool ordinally_equivalent(const RankedTable& d1, const RankedTable& d2) {
  return ordinally_included(d1, d2).holds && ordinally_included(d2, d1).holds;
}

/// Answer-set tuples grouped by equal score, groups in descending score.
using RankSignature = std::vector<std::set<Tuple>>;

inline RankSignature rank_signature(const RankedTable& d) {
  RankSignature out;
  std::optional<Score> level;
  for (const auto& [t, s] : d.sorted_rows()) {
    if (!level || s != *level) {
      out.emplace_back();
      level = s;
    }
    out.back().insert(t);
  }
  return out;
}

}  // namespace rankdb
