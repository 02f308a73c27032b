#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rankdb/error.hpp"
#include "rankdb/expr.hpp"
#include "rankdb/ordinal.hpp"
#include "rankdb/score_chain.hpp"
#include "rankdb/table.hpp"

namespace rankdb {

/// Order properties a map claims; each claim is checked on the scores the map
/// is actually applied to.
struct MapProperties {
  bool preserving = false;
  bool reflecting = false;
  bool isomorphism = false;
  bool fixed_bottom = false;
  bool fixed_top = false;

  static MapProperties embedding() { return {true, true, false, false, false}; }
  static MapProperties iso() { return {true, true, true, true, true}; }
};

/// Decimal places of the grid onto which analytic maps are quantized.
inline constexpr int kAnalyticPlaces = 6;

/// A self-map of a score chain.
class OrderMap {
 public:
  enum class Kind { piecewise, linear, analytic, graph };

  /// Constant value on the half-open interval (lo, hi].
  struct Piece {
    Rational lo, hi, value;
  };

  Kind kind() const noexcept { return kind_; }
  const ChainPtr& chain() const noexcept { return chain_; }
  const MapProperties& properties() const noexcept { return props_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  const std::optional<Rational>& at_bottom() const noexcept { return at_bottom_; }
  const std::vector<std::pair<Rational, Rational>>& points() const noexcept { return points_; }

  OrderMap with_properties(MapProperties p) const {
    OrderMap m = *this;
    m.props_ = p;
    return m;
  }
  OrderMap named(std::string n) const {
    OrderMap m = *this;
    m.name_ = std::move(n);
    return m;
  }

  /// Piecewise-constant map: `at_bottom` is f(bottom); pieces are (lo, hi].
  static OrderMap piecewise(ChainPtr chain, std::optional<Rational> at_bottom, std::vector<Piece> pieces,
                            MapProperties props = {}) {
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (!(pieces[i].lo < pieces[i].hi)) throw Error(Errc::invalid_argument, "empty piece");
      if (i && pieces[i].lo < pieces[i - 1].hi) throw Error(Errc::invalid_argument, "overlapping pieces");
      chain->make(pieces[i].value);
    }
    if (at_bottom) chain->make(*at_bottom);
    OrderMap m(Kind::piecewise, std::move(chain), props);
    m.at_bottom_ = at_bottom;
    m.pieces_ = std::move(pieces);
    return m;
  }

  /// Piecewise-linear interpolation through points with strictly increasing x.
  static OrderMap linear(ChainPtr chain, std::vector<std::pair<Rational, Rational>> points, MapProperties props = {}) {
    if (points.size() < 2) throw Error(Errc::invalid_argument, "linear map needs two points");
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (!(points[i - 1].first < points[i].first)) throw Error(Errc::invalid_argument, "repeated abscissa");
    }
    for (const auto& [x, y] : points) {
      chain->make(x);
      chain->make(y);
    }
    OrderMap m(Kind::linear, std::move(chain), props);
    m.points_ = std::move(points);
    return m;
  }

  /// Map given by an expression in `x`; results land on the 10^-6 grid.
  static OrderMap analytic(ChainPtr chain, ExprPtr body, MapProperties props = {}) {
    if (chain->kind() != ScoreChain::Kind::rational_unit) {
      throw Error(Errc::unsupported, "expression maps need the rational chain");
    }
    for (const auto& id : body->free_identifiers()) {
      if (id != "x") throw Error(Errc::unknown_name, "map expression may only use x, found '" + id + "'");
    }
    OrderMap m(Kind::analytic, std::move(chain), props);
    m.body_ = std::move(body);
    return m;
  }

  /// Map defined on a finite set of inputs.
  static OrderMap graph(ChainPtr chain, std::vector<std::pair<Rational, Rational>> pairs, MapProperties props = {}) {
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 1; i < pairs.size(); ++i) {
      if (pairs[i - 1].first == pairs[i].first) throw Error(Errc::invalid_argument, "input mapped twice");
    }
    for (const auto& [x, y] : pairs) {
      chain->make(x);
      chain->make(y);
    }
    OrderMap m(Kind::graph, std::move(chain), props);
    m.points_ = std::move(pairs);
    return m;
  }

  static OrderMap identity(const ChainPtr& chain) {
    if (chain->kind() == ScoreChain::Kind::rational_unit) {
      return linear(chain, {{Rational(0), Rational(0)}, {Rational(1), Rational(1)}}, MapProperties::iso()).named("id");
    }
    std::vector<std::pair<Rational, Rational>> pairs;
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(chain->levels().size()); ++i) pairs.emplace_back(i, i);
    return graph(chain, pairs, MapProperties::iso()).named("id");
  }

  /// Whether `x` lies in the map's domain.
  bool defined_at(const Rational& x) const {
    switch (kind_) {
      case Kind::piecewise:
        if (x == chain_->bottom_value()) return at_bottom_.has_value();
        return find_piece(x) != nullptr;
      case Kind::linear: return !(x < points_.front().first) && !(points_.back().first < x);
      case Kind::analytic: return true;
      case Kind::graph: return lookup_point(x) != nullptr;
    }
    return false;
  }

  Rational apply_value(const Rational& x) const {
    switch (kind_) {
      case Kind::piecewise: {
        if (x == chain_->bottom_value()) {
          if (!at_bottom_) throw Error(Errc::domain, "map undefined at bottom");
          return *at_bottom_;
        }
        const Piece* p = find_piece(x);
        if (!p) throw Error(Errc::domain, "score " + x.to_string() + " lies in no piece of the map");
        return p->value;
      }
      case Kind::linear: {
        if (!defined_at(x)) throw Error(Errc::domain, "score " + x.to_string() + " outside the interpolated range");
        for (std::size_t i = 1; i < points_.size(); ++i) {
          const auto& [x0, y0] = points_[i - 1];
          const auto& [x1, y1] = points_[i];
          if (x <= x1) return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
        }
        return points_.back().second;
      }
      case Kind::analytic: return chain_->make(quantize(raw(x), kAnalyticPlaces)).value();
      case Kind::graph: {
        const Rational* y = lookup_point(x);
        if (!y) throw Error(Errc::domain, "score " + x.to_string() + " outside the map's finite domain");
        return *y;
      }
    }
    throw Error(Errc::invalid_argument, "bad map");
  }

  /// Unquantized value of an analytic map (as a double when irrational).
  ExprValue raw(const Rational& x) const {
    if (kind_ != Kind::analytic) return apply_value(x);
    ExprEnv env;
    env.lookup = [&](std::string_view id) -> std::optional<ExprValue> {
      if (id == "x") return x;
      return std::nullopt;
    };
    return body_->eval(env);
  }

  Score apply(const Score& a) const {
    require_same_chain(*a.chain(), *chain_);
    return chain_->make(apply_value(a.value()));
  }

  /// Checks declared properties on `samples` (only those inside the domain).
  /// Returns a description of the first violation.
  std::optional<std::string> verify(const std::vector<Rational>& samples) const {
    std::vector<std::pair<Rational, Rational>> io;
    for (const auto& s : samples) {
      if (defined_at(s)) io.emplace_back(s, apply_value(s));
    }
    std::sort(io.begin(), io.end());
    io.erase(std::unique(io.begin(), io.end()), io.end());
    if (props_.fixed_bottom && defined_at(chain_->bottom_value()) &&
        apply_value(chain_->bottom_value()) != chain_->bottom_value()) {
      return "map does not fix bottom";
    }
    if (props_.fixed_top && defined_at(chain_->top_value()) && apply_value(chain_->top_value()) != chain_->top_value()) {
      return "map does not fix top";
    }
    bool preserving = props_.preserving || props_.isomorphism;
    bool reflecting = props_.reflecting || props_.isomorphism;
    // io is sorted by input. Reflecting means every image exceeds all images of
    // smaller inputs, so a running maximum suffices.
    for (std::size_t i = 1; i < io.size(); ++i) {
      if (preserving && io[i].second < io[i - 1].second) {
        return "not order preserving: f(" + io[i - 1].first.to_string() + ") > f(" + io[i].first.to_string() + ")";
      }
    }
    std::optional<std::size_t> argmax;
    for (std::size_t i = 0; i < io.size() && reflecting; ++i) {
      if (argmax && io[i].second <= io[*argmax].second) {
        return "not order reflecting: f(" + io[i].first.to_string() + ") <= f(" + io[*argmax].first.to_string() + ")";
      }
      if (!argmax || io[*argmax].second < io[i].second) argmax = i;
    }
    return std::nullopt;
  }

  /// Config-file syntax, e.g. `piecewise{0 -> 0, (0, 0.5] -> 0.5}`.
  std::string str() const {
    auto fmt = [&](const Rational& v) { return chain_->format(v, true); };
    std::string out;
    switch (kind_) {
      case Kind::piecewise: {
        out = "piecewise{";
        bool first = true;
        if (at_bottom_) {
          out += fmt(chain_->bottom_value()) + " -> " + fmt(*at_bottom_);
          first = false;
        }
        for (const auto& p : pieces_) {
          out += (first ? "" : ", ") + std::string("(") + fmt(p.lo) + ", " + fmt(p.hi) + "] -> " + fmt(p.value);
          first = false;
        }
        out += "}";
        break;
      }
      case Kind::linear:
      case Kind::graph: {
        out = kind_ == Kind::linear ? "linear{" : "graph{";
        for (std::size_t i = 0; i < points_.size(); ++i) {
          out += (i ? ", " : "") + fmt(points_[i].first) + " -> " + fmt(points_[i].second);
        }
        out += "}";
        break;
      }
      case Kind::analytic: out = "expr{" + body_->str() + "}"; break;
    }
    std::vector<std::string> tags;
    if (props_.isomorphism) {
      tags.push_back("isomorphism");
    } else {
      if (props_.preserving) tags.push_back("preserving");
      if (props_.reflecting) tags.push_back("reflecting");
    }
    if (props_.fixed_bottom && !props_.isomorphism) tags.push_back("fixed_bottom");
    if (props_.fixed_top && !props_.isomorphism) tags.push_back("fixed_top");
    if (!tags.empty()) {
      out += " [";
      for (std::size_t i = 0; i < tags.size(); ++i) out += (i ? ", " : "") + tags[i];
      out += "]";
    }
    return out;
  }

 private:
  OrderMap(Kind kind, ChainPtr chain, MapProperties props) : kind_(kind), chain_(std::move(chain)), props_(props) {}

  const Piece* find_piece(const Rational& x) const {
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), x, [](const Piece& p, const Rational& v) { return p.hi < v; });
    if (it != pieces_.end() && it->lo < x && x <= it->hi) return &*it;
    return nullptr;
  }

  const Rational* lookup_point(const Rational& x) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), x, [](const auto& p, const Rational& v) { return p.first < v; });
    return it != points_.end() && it->first == x ? &it->second : nullptr;
  }

  Kind kind_;
  ChainPtr chain_;
  MapProperties props_;
  std::string name_;
  std::optional<Rational> at_bottom_;
  std::vector<Piece> pieces_;
  std::vector<std::pair<Rational, Rational>> points_;
  ExprPtr body_;
};

inline Score apply_score(const OrderMap& f, const Score& a) { return f.apply(a); }

namespace order_map_detail {

inline std::vector<Rational> sample_points(const RankedTable& d) {
  std::vector<Rational> out{d.chain()->bottom_value(), d.chain()->top_value()};
  for (const auto& s : range_of(d)) out.push_back(s.value());
  return out;
}

// Two inputs whose exact images differ but land on one grid point.
inline void check_quantization(const OrderMap& f, const std::vector<Rational>& inputs) {
  if (f.kind() != OrderMap::Kind::analytic) return;
  std::map<Rational, std::pair<Rational, double>> seen;  // quantized -> (input, raw)
  for (const auto& x : inputs) {
    double raw = as_double(f.raw(x));
    Rational q = f.apply_value(x);
    auto [it, fresh] = seen.emplace(q, std::make_pair(x, raw));
    if (!fresh && it->second.first != x && it->second.second != raw) {
      throw Error(Errc::domain, "quantizing the map merges the images of " + it->second.first.to_string() + " and " +
                                    x.to_string() + "; refine the grid or change the map");
    }
  }
}

}  // namespace order_map_detail

/// D ∘ f. Bottom must map to bottom whenever the table has tuples outside its
/// answer set; declared properties are checked on the table's range.
inline RankedTable compose_table(const RankedTable& d, const OrderMap& f) {
  require_same_chain(*d.chain(), *f.chain());
  ChainPtr chain = d.chain();
  if (d.has_zero_tuple()) {
    Rational f0 = f.apply_value(chain->bottom_value());
    if (f0 != chain->bottom_value()) {
      throw Error(Errc::domain, "map sends bottom to " + chain->format(f0, true) +
                                    "; composing would give every tuple outside the answer set a nonzero score");
    }
  }
  auto samples = order_map_detail::sample_points(d);
  std::vector<Rational> in_domain;
  for (const auto& s : samples) {
    if (f.defined_at(s)) in_domain.push_back(s);
  }
  if (auto bad = f.verify(in_domain)) throw Error(Errc::domain, "map " + f.name() + ": " + *bad);
  std::vector<Rational> used;
  for (const auto& s : range_of(d)) used.push_back(s.value());
  order_map_detail::check_quantization(f, used);
  TableBuilder b(d.scheme(), chain);
  for (const auto& [t, s] : d.entries()) b.put(t, f.apply(s));
  return std::move(b).build();
}

/// The least order-preserving f with d1 ∘ f = d2:
/// f(a) = inf{ d2(r) : d1(r) >= a }, piecewise constant over d1's range.
inline OrderMap canonical_map(const RankedTable& d1, const RankedTable& d2) {
  auto inc = ordinally_included(d1, d2);
  if (!inc) {
    throw Error(Errc::not_included, "witness " + (inc.witness ? inc.witness->str() : std::string("(tuple outside both answer sets)")));
  }
  ChainPtr chain = d1.chain();
  Rational bottom = chain->bottom_value();
  Rational top = chain->top_value();

  Rational at_bottom = bottom;
  if (!d2.has_zero_tuple()) {
    at_bottom = infimum(range_of(d2), chain->top()).value();
  }
  std::vector<Rational> levels;  // distinct positive d1 scores, ascending
  for (const auto& s : range_of(d1)) {
    if (!s.is_bottom()) levels.push_back(s.value());
  }
  // For each level v, inf of d2 over {r : d1(r) >= v}; sweep from the top.
  auto rows = d1.sorted_rows();
  std::map<Rational, Rational> inf_at;
  std::optional<Rational> running;
  for (const auto& [t, s] : rows) {
    Rational v2 = d2.lookup(t).value();
    if (!running || v2 < *running) running = v2;
    inf_at[s.value()] = *running;
  }
  std::vector<OrderMap::Piece> pieces;
  Rational lo = bottom;
  for (const auto& v : levels) {
    pieces.push_back({lo, v, inf_at.at(v)});
    lo = v;
  }
  if (lo < top) pieces.push_back({lo, top, top});
  std::vector<OrderMap::Piece> merged;
  for (const auto& p : pieces) {
    if (!merged.empty() && merged.back().value == p.value) {
      merged.back().hi = p.hi;
    } else {
      merged.push_back(p);
    }
  }
  MapProperties props;
  props.preserving = true;
  return OrderMap::piecewise(chain, at_bottom, std::move(merged), props).named("canonical");
}

/// Rank-matching order isomorphism from range(d1) onto range(d2) carrying d1 to d2.
inline OrderMap witness_isomorphism(const RankedTable& d1, const RankedTable& d2) {
  auto forward = ordinally_included(d1, d2);
  auto backward = ordinally_included(d2, d1);
  if (!forward || !backward) {
    const auto& w = !forward ? forward.witness : backward.witness;
    throw Error(Errc::not_equivalent, "witness " + (w ? w->str() : std::string("(tuple outside both answer sets)")));
  }
  auto r1 = range_of(d1);
  auto r2 = range_of(d2);
  if (r1.size() != r2.size()) throw Error(Errc::not_equivalent, "ranges differ in size");
  std::vector<std::pair<Rational, Rational>> pairs;
  for (std::size_t i = 0; i < r1.size(); ++i) pairs.emplace_back(r1[i].value(), r2[i].value());
  MapProperties props;
  props.isomorphism = true;
  props.preserving = true;
  props.reflecting = true;
  return OrderMap::graph(d1.chain(), std::move(pairs), props).named("witness");
}

/// Extends a map known on a finite chain of inputs to the whole chain:
/// f#(a) = inf{ f(a') : a' in domain, a' >= a }, which is top above the domain.
inline OrderMap extend_to_chain(const OrderMap& f, std::vector<Rational> domain) {
  if (domain.empty()) throw Error(Errc::invalid_argument, "empty domain");
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  ChainPtr chain = f.chain();
  Rational bottom = chain->bottom_value();
  Rational top = chain->top_value();
  std::vector<Rational> image;
  for (const auto& a : domain) image.push_back(f.apply_value(a));
  // suffix minima give the infimum over a' >= a
  std::vector<Rational> suffix(image);
  for (std::size_t i = suffix.size() - 1; i-- > 0;) suffix[i] = std::min(suffix[i], suffix[i + 1]);
  Rational at_bottom = suffix.front();
  std::vector<OrderMap::Piece> pieces;
  Rational lo = bottom;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain[i] == bottom) continue;
    pieces.push_back({lo, domain[i], suffix[i]});
    lo = domain[i];
  }
  if (lo < top) pieces.push_back({lo, top, top});
  std::vector<OrderMap::Piece> merged;
  for (const auto& p : pieces) {
    if (!merged.empty() && merged.back().value == p.value) {
      merged.back().hi = p.hi;
    } else {
      merged.push_back(p);
    }
  }
  MapProperties props;
  props.preserving = true;
  return OrderMap::piecewise(chain, at_bottom, std::move(merged), props).named(f.name() + "#");
}

}  // namespace rankdb
