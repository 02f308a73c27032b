#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rankdb/error.hpp"
#include "rankdb/rational.hpp"
#include "rankdb/score_chain.hpp"

namespace rankdb {

enum class AttrType { str, integer, decimal };

inline const char* type_suffix(AttrType t) {
  switch (t) {
    case AttrType::str: return "str";
    case AttrType::integer: return "int";
    case AttrType::decimal: return "dec";
  }
  return "?";
}

/// Domain value. The alternative index mirrors AttrType.
using Value = std::variant<std::string, std::int64_t, Rational>;

inline AttrType type_of(const Value& v) { return static_cast<AttrType>(v.index()); }

inline std::string value_str(const Value& v) {
  switch (v.index()) {
    case 0: return std::get<0>(v);
    case 1: return std::to_string(std::get<1>(v));
    default: return std::get<2>(v).to_string();
  }
}

inline Value parse_value(std::string_view text, AttrType type) {
  switch (type) {
    case AttrType::str: return std::string(text);
    case AttrType::integer: {
      Rational r = Rational::parse(text);
      if (!r.is_integer()) throw Error(Errc::parse, "not an integer: '" + std::string(text) + "'");
      return r.num();
    }
    case AttrType::decimal: return Rational::parse(text);
  }
  throw Error(Errc::invalid_argument, "bad attribute type");
}

struct Attribute {
  std::string name;
  AttrType type = AttrType::str;
  /// Explicitly finite domain; absent means the type's (infinite) domain.
  std::optional<std::vector<Value>> domain;

  friend bool operator==(const Attribute& a, const Attribute& b) {
    return a.name == b.name && a.type == b.type && a.domain == b.domain;
  }
};

/// A finite set of attributes kept sorted by name. The empty scheme is legal.
class Scheme {
 public:
  Scheme() = default;
  Scheme(std::vector<Attribute> attrs) : attrs_(std::move(attrs)) {  // NOLINT
    std::sort(attrs_.begin(), attrs_.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < attrs_.size(); ++i) {
      if (attrs_[i - 1].name == attrs_[i].name) {
        throw Error(Errc::scheme_mismatch, "duplicate attribute '" + attrs_[i].name + "'");
      }
    }
    for (const auto& a : attrs_) {
      if (!a.domain) continue;
      for (const auto& v : *a.domain) {
        if (type_of(v) != a.type) throw Error(Errc::scheme_mismatch, "domain value of wrong type in '" + a.name + "'");
      }
    }
  }

  const std::vector<Attribute>& attributes() const noexcept { return attrs_; }
  std::size_t size() const noexcept { return attrs_.size(); }
  bool empty() const noexcept { return attrs_.empty(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& a : attrs_) out.push_back(a.name);
    return out;
  }

  const Attribute* find(std::string_view name) const {
    auto it = std::lower_bound(attrs_.begin(), attrs_.end(), name,
                               [](const Attribute& a, std::string_view n) { return a.name < n; });
    return it != attrs_.end() && it->name == name ? &*it : nullptr;
  }
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  bool contains_all(const std::vector<std::string>& names) const {
    return std::all_of(names.begin(), names.end(), [&](const auto& n) { return contains(n); });
  }

  /// Union; shared attributes must agree on type and domain.
  Scheme unite(const Scheme& other) const {
    std::vector<Attribute> out = attrs_;
    for (const auto& a : other.attrs_) {
      if (const Attribute* mine = find(a.name)) {
        if (!(*mine == a)) throw Error(Errc::scheme_mismatch, "attribute '" + a.name + "' declared with different types");
      } else {
        out.push_back(a);
      }
    }
    return Scheme(std::move(out));
  }

  Scheme intersect(const Scheme& other) const {
    std::vector<Attribute> out;
    for (const auto& a : attrs_) {
      if (other.contains(a.name)) out.push_back(a);
    }
    return Scheme(std::move(out));
  }

  Scheme minus(const Scheme& other) const {
    std::vector<Attribute> out;
    for (const auto& a : attrs_) {
      if (!other.contains(a.name)) out.push_back(a);
    }
    return Scheme(std::move(out));
  }

  Scheme restrict_to(const std::vector<std::string>& names) const {
    std::vector<Attribute> out;
    for (const auto& n : names) {
      const Attribute* a = find(n);
      if (!a) throw Error(Errc::scheme_mismatch, "attribute '" + n + "' not in scheme " + str());
      out.push_back(*a);
    }
    return Scheme(std::move(out));
  }

  bool is_subset_of(const Scheme& other) const {
    return std::all_of(attrs_.begin(), attrs_.end(), [&](const Attribute& a) {
      const Attribute* b = other.find(a.name);
      return b && *b == a;
    });
  }

  /// |Tupl(R)| when every attribute has an explicit finite domain and the
  /// product fits `cap`; nullopt otherwise. The empty scheme has one tuple.
  std::optional<std::size_t> domain_size(std::size_t cap = std::size_t(1) << 40) const {
    std::size_t n = 1;
    for (const auto& a : attrs_) {
      if (!a.domain) return std::nullopt;
      std::size_t k = std::set<Value>(a.domain->begin(), a.domain->end()).size();
      if (k != 0 && n > cap / k) return std::nullopt;
      n *= k;
    }
    return n;
  }

  std::string str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
      if (i) out += ", ";
      out += attrs_[i].name;
    }
    return out + "}";
  }

  friend bool operator==(const Scheme& a, const Scheme& b) { return a.attrs_ == b.attrs_; }

 private:
  std::vector<Attribute> attrs_;
};

/// Assignment of values to attribute names, kept sorted by name. Ordering is
/// lexicographic over (name, value) cells, which is the canonical tuple order
/// used for deterministic output and tie-breaking.
class Tuple {
 public:
  using Cell = std::pair<std::string, Value>;

  Tuple() = default;
  Tuple(std::vector<Cell> cells) : cells_(std::move(cells)) {  // NOLINT
    std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < cells_.size(); ++i) {
      if (cells_[i - 1].first == cells_[i].first) {
        throw Error(Errc::scheme_mismatch, "attribute '" + cells_[i].first + "' assigned twice");
      }
    }
  }

  const std::vector<Cell>& cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return cells_.size(); }

  const Value* find(std::string_view name) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), name,
                               [](const Cell& c, std::string_view n) { return c.first < n; });
    return it != cells_.end() && it->first == name ? &it->second : nullptr;
  }

  const Value& at(std::string_view name) const {
    const Value* v = find(name);
    if (!v) throw Error(Errc::scheme_mismatch, "tuple has no attribute '" + std::string(name) + "'");
    return *v;
  }

  bool conforms_to(const Scheme& scheme) const {
    const auto& attrs = scheme.attributes();
    if (attrs.size() != cells_.size()) return false;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      if (attrs[i].name != cells_[i].first || type_of(cells_[i].second) != attrs[i].type) return false;
      if (attrs[i].domain &&
          std::find(attrs[i].domain->begin(), attrs[i].domain->end(), cells_[i].second) == attrs[i].domain->end()) {
        return false;
      }
    }
    return true;
  }

  Tuple project(const std::vector<std::string>& names) const {
    std::vector<Cell> out;
    out.reserve(names.size());
    for (const auto& n : names) out.emplace_back(n, at(n));
    return Tuple(std::move(out));
  }

  Tuple project(const Scheme& scheme) const { return project(scheme.names()); }

  std::string str() const {
    std::string out = "(";
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (i) out += ", ";
      out += cells_[i].first + "=" + value_str(cells_[i].second);
    }
    return out + ")";
  }

  friend bool operator==(const Tuple&, const Tuple&) = default;
  friend auto operator<=>(const Tuple& a, const Tuple& b) { return a.cells_ <=> b.cells_; }

 private:
  std::vector<Cell> cells_;
};

/// True when r and s agree on every shared attribute.
inline bool joinable(const Tuple& r, const Tuple& s) {
  const auto& a = r.cells();
  const auto& b = s.cells();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      if (a[i].second != b[j].second) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

/// The tuple on the union scheme that restricts to r and s.
inline Tuple join_tuples(const Tuple& r, const Tuple& s) {
  if (!joinable(r, s)) throw Error(Errc::not_joinable, r.str() + " and " + s.str());
  std::vector<Tuple::Cell> cells = r.cells();
  for (const auto& c : s.cells()) {
    if (!r.find(c.first)) cells.push_back(c);
  }
  return Tuple(std::move(cells));
}

/// Every tuple of a scheme whose attributes all have finite domains.
inline std::vector<Tuple> enumerate_tuples(const Scheme& scheme, std::size_t limit = 1'000'000) {
  auto size = scheme.domain_size();
  if (!size) throw Error(Errc::unsupported, "scheme " + scheme.str() + " has an infinite domain");
  if (*size > limit) throw Error(Errc::unsupported, "scheme " + scheme.str() + " has too many tuples to enumerate");
  std::vector<std::vector<Tuple::Cell>> partial{{}};
  for (const auto& a : scheme.attributes()) {
    std::set<Value> values(a.domain->begin(), a.domain->end());
    std::vector<std::vector<Tuple::Cell>> next;
    for (const auto& p : partial) {
      for (const auto& v : values) {
        auto q = p;
        q.emplace_back(a.name, v);
        next.push_back(std::move(q));
      }
    }
    partial = std::move(next);
  }
  std::vector<Tuple> out;
  out.reserve(partial.size());
  for (auto& p : partial) out.emplace_back(std::move(p));
  return out;
}

/// A ranked data table: a finite-support map from tuples on a scheme to scores.
/// Absent tuples score bottom; no stored entry is bottom.
class RankedTable {
 public:
  using Entries = std::map<Tuple, Score>;

  RankedTable(Scheme scheme, ChainPtr chain) : scheme_(std::move(scheme)), chain_(std::move(chain)) {}

  RankedTable(Scheme scheme, ChainPtr chain, Entries entries)
      : scheme_(std::move(scheme)), chain_(std::move(chain)) {
    for (auto& [t, s] : entries) {
      if (!t.conforms_to(scheme_)) throw Error(Errc::scheme_mismatch, "tuple " + t.str() + " does not conform to " + scheme_.str());
      require_same_chain(*s.chain(), *chain_);
      if (s.is_bottom()) throw Error(Errc::invalid_argument, "bottom scores are encoded by absence");
    }
    entries_ = std::move(entries);
  }

  const Scheme& scheme() const noexcept { return scheme_; }
  const ChainPtr& chain() const noexcept { return chain_; }
  const Entries& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  Score score_of(const Tuple& r) const {
    if (!r.conforms_to(scheme_)) throw Error(Errc::scheme_mismatch, "tuple " + r.str() + " does not conform to " + scheme_.str());
    return lookup(r);
  }

  /// Score without the conformance check (tuple is known to be well formed).
  Score lookup(const Tuple& r) const {
    auto it = entries_.find(r);
    return it == entries_.end() ? chain_->bottom() : it->second;
  }

  /// Whether Tupl(R) contains a tuple outside the answer set.
  bool has_zero_tuple() const {
    auto n = scheme_.domain_size();
    return !n || *n > entries_.size();
  }

  /// Answer-set tuples in descending score, canonical order within ties.
  std::vector<std::pair<Tuple, Score>> sorted_rows() const {
    std::vector<std::pair<Tuple, Score>> rows(entries_.begin(), entries_.end());
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return b.second < a.second; });
    return rows;
  }

  friend bool operator==(const RankedTable& a, const RankedTable& b) {
    if (!(a.scheme_ == b.scheme_) || !a.chain_->same_as(*b.chain_) || a.entries_.size() != b.entries_.size()) {
      return false;
    }
    auto it = b.entries_.begin();
    for (const auto& [t, s] : a.entries_) {
      if (!(t == it->first) || s.value() != it->second.value()) return false;
      ++it;
    }
    return true;
  }

  std::string str() const {
    std::string out = "table " + scheme_.str() + " [";
    bool first = true;
    for (const auto& [t, s] : sorted_rows()) {
      out += first ? "" : ", ";
      out += t.str() + "->" + s.str(true);
      first = false;
    }
    return out + "]";
  }

 private:
  Scheme scheme_;
  ChainPtr chain_;
  Entries entries_;
};

/// Accumulates entries for a table under construction. Bottom scores are dropped.
class TableBuilder {
 public:
  TableBuilder(Scheme scheme, ChainPtr chain) : scheme_(std::move(scheme)), chain_(std::move(chain)) {}

  void put(Tuple t, Score s) {
    if (s.is_bottom()) {
      entries_.erase(t);
      return;
    }
    entries_.insert_or_assign(std::move(t), std::move(s));
  }

  /// Keeps the larger of the existing and the new score.
  void put_max(Tuple t, Score s) {
    if (s.is_bottom()) return;
    auto it = entries_.find(t);
    if (it == entries_.end()) {
      entries_.emplace(std::move(t), std::move(s));
    } else if (it->second < s) {
      it->second = std::move(s);
    }
  }

  RankedTable build() && { return RankedTable(std::move(scheme_), std::move(chain_), std::move(entries_)); }

 private:
  Scheme scheme_;
  ChainPtr chain_;
  RankedTable::Entries entries_;
};

/// Scores occurring in the table, ascending. Includes bottom whenever the
/// scheme admits a tuple outside the answer set (always, for infinite domains).
inline std::vector<Score> range_of(const RankedTable& d) {
  std::vector<Score> out;
  if (d.has_zero_tuple()) out.push_back(d.chain()->bottom());
  for (const auto& [t, s] : d.entries()) out.push_back(s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Embeds a classic relation: members score top.
inline RankedTable from_classic(const std::set<Tuple>& relation, const Scheme& scheme, ChainPtr chain) {
  TableBuilder b(scheme, chain);
  for (const auto& t : relation) b.put(t, chain->top());
  return std::move(b).build();
}

/// The classic relation {r : D(r) = top}; requires range within {bottom, top}.
inline std::set<Tuple> to_classic(const RankedTable& d) {
  std::set<Tuple> out;
  for (const auto& [t, s] : d.entries()) {
    if (!s.is_top()) throw Error(Errc::not_crisp, "tuple " + t.str() + " has intermediate score " + s.str());
    out.insert(t);
  }
  return out;
}

/// Copy of `d` with every attribute retyped to `str` (values rendered as text).
inline RankedTable as_string_typed(const RankedTable& d) {
  std::vector<Attribute> attrs;
  for (const auto& a : d.scheme().attributes()) attrs.push_back({a.name, AttrType::str, std::nullopt});
  TableBuilder b(Scheme(attrs), d.chain());
  for (const auto& [t, s] : d.entries()) {
    std::vector<Tuple::Cell> cells;
    for (const auto& [n, v] : t.cells()) cells.emplace_back(n, value_str(v));
    b.put(Tuple(std::move(cells)), s);
  }
  return std::move(b).build();
}

}  // namespace rankdb
