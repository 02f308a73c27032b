#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "rankdb/rankdb.hpp"

namespace testsupport {

using namespace rankdb;

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// Nonzero score k/den for k in 1..den.
inline Score random_score(Rng& rng, const ChainPtr& chain, std::int64_t den = 20) {
  if (chain->kind() == ScoreChain::Kind::symbolic) {
    return chain->make(Rational(static_cast<std::int64_t>(uniform(rng, 1, chain->levels().size() - 1))));
  }
  return chain->make(Rational(static_cast<std::int64_t>(uniform(rng, 1, static_cast<std::size_t>(den))), den));
}

/// Integer attributes drawn from a small alphabet so that joins overlap.
inline const std::vector<std::string>& attribute_pool() {
  static const std::vector<std::string> pool{"a", "b", "c", "d", "e"};
  return pool;
}

inline std::vector<Value> small_domain(std::int64_t n = 3) {
  std::vector<Value> out;
  for (std::int64_t i = 0; i < n; ++i) out.emplace_back(i);
  return out;
}

inline Scheme scheme_of(const std::vector<std::string>& names, bool finite = false) {
  std::vector<Attribute> attrs;
  for (const auto& n : names) {
    Attribute a{n, AttrType::integer, std::nullopt};
    if (finite) a.domain = small_domain();
    attrs.push_back(a);
  }
  return Scheme(attrs);
}

inline Scheme random_scheme(Rng& rng, std::size_t min_attrs = 1, std::size_t max_attrs = 4) {
  std::vector<std::string> pool = attribute_pool();
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(uniform(rng, min_attrs, max_attrs));
  return scheme_of(pool);
}

inline Tuple random_tuple(Rng& rng, const Scheme& scheme, std::int64_t values = 3) {
  std::vector<Tuple::Cell> cells;
  for (const auto& a : scheme.attributes()) {
    auto k = static_cast<std::int64_t>(uniform(rng, 0, static_cast<std::size_t>(values - 1)));
    if (a.type == AttrType::str) {
      cells.emplace_back(a.name, Value("u" + std::to_string(k)));
    } else {
      cells.emplace_back(a.name, Value(k));
    }
  }
  return Tuple(std::move(cells));
}

inline RankedTable random_table(Rng& rng, const Scheme& scheme, const ChainPtr& chain, std::size_t max_tuples = 12,
                                std::int64_t den = 20) {
  TableBuilder b(scheme, chain);
  std::size_t n = uniform(rng, 0, max_tuples);
  for (std::size_t i = 0; i < n; ++i) b.put(random_tuple(rng, scheme), random_score(rng, chain, den));
  return std::move(b).build();
}

/// Piecewise-linear order isomorphism of [0, 1] fixing both ends.
inline OrderMap random_isomorphism(Rng& rng, const ChainPtr& chain) {
  std::size_t knots = uniform(rng, 1, 4);
  std::vector<Rational> xs, ys;
  std::set<std::int64_t> xk, yk;
  while (xk.size() < knots) xk.insert(static_cast<std::int64_t>(uniform(rng, 1, 99)));
  while (yk.size() < knots) yk.insert(static_cast<std::int64_t>(uniform(rng, 1, 99)));
  std::vector<std::pair<Rational, Rational>> points{{Rational(0), Rational(0)}};
  auto xi = xk.begin();
  auto yi = yk.begin();
  for (; xi != xk.end(); ++xi, ++yi) points.emplace_back(Rational(*xi, 100), Rational(*yi, 100));
  points.emplace_back(Rational(1), Rational(1));
  return OrderMap::linear(chain, points, MapProperties::iso()).named("g");
}

/// Condition given by a random table over a subset of `scheme`.
inline RestrictionCondition random_condition(Rng& rng, const Scheme& scheme, const ChainPtr& chain) {
  std::vector<std::string> names = scheme.names();
  std::shuffle(names.begin(), names.end(), rng);
  names.resize(uniform(rng, 0, names.size()));
  Scheme sub = scheme.restrict_to(names);
  TableBuilder b(sub, chain);
  for (std::size_t i = 0; i < 6; ++i) b.put(random_tuple(rng, sub), random_score(rng, chain));
  return RestrictionCondition::from_table(std::move(b).build());
}

inline std::vector<std::string> random_subset(Rng& rng, std::vector<std::string> names) {
  std::shuffle(names.begin(), names.end(), rng);
  names.resize(uniform(rng, 0, names.size()));
  return names;
}

}  // namespace testsupport

namespace testsupport {

/// Order-preserving step map with f(0) = 0, usually not injective.
inline OrderMap random_preserving(Rng& rng, const ChainPtr& chain) {
  std::set<std::int64_t> cuts;
  std::size_t n = uniform(rng, 1, 4);
  while (cuts.size() < n) cuts.insert(static_cast<std::int64_t>(uniform(rng, 1, 19)));
  cuts.insert(20);
  std::vector<std::int64_t> values;
  for (std::size_t i = 0; i < cuts.size(); ++i) values.push_back(static_cast<std::int64_t>(uniform(rng, 1, 20)));
  std::sort(values.begin(), values.end());
  std::vector<OrderMap::Piece> pieces;
  std::int64_t lo = 0;
  std::size_t i = 0;
  for (std::int64_t hi : cuts) {
    pieces.push_back({Rational(lo, 20), Rational(hi, 20), Rational(values[i++], 20)});
    lo = hi;
  }
  MapProperties props;
  props.preserving = true;
  props.fixed_bottom = true;
  return OrderMap::piecewise(chain, Rational(0), pieces, props).named("p");
}

/// Piecewise-linear order embedding fixing 0 whose top image may be below 1.
inline OrderMap random_embedding(Rng& rng, const ChainPtr& chain) {
  std::int64_t top = static_cast<std::int64_t>(uniform(rng, 50, 100));
  std::int64_t mid_x = static_cast<std::int64_t>(uniform(rng, 1, 99));
  std::int64_t mid_y = static_cast<std::int64_t>(uniform(rng, 1, static_cast<std::size_t>(top - 1)));
  MapProperties props = MapProperties::embedding();
  props.fixed_bottom = true;
  return OrderMap::linear(chain,
                          {{Rational(0), Rational(0)},
                           {Rational(mid_x, 100), Rational(mid_y, 100)},
                           {Rational(1), Rational(top, 100)}},
                          props)
      .named("e");
}

}  // namespace testsupport
