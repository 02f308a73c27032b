#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rankdb/rankdb.hpp"

// Reproduction checks for the housing example: literal expected listings are
// compared against what the library computes from data/housing.
namespace rankdb::figures {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Fixtures {
  Catalog housing;
  RankedTable listings;
  RankedTable same_order_high, same_order_low;
  RankedTable double_negation_left, double_negation_right;
};

inline Fixtures load_fixtures(const std::string& data_dir) {
  namespace fs = std::filesystem;
  Catalog housing = load_catalog((fs::path(data_dir) / "housing").string());
  // listings.csv sits in the same directory; keep it out of the join inputs.
  RankedTable listings = housing.table("listings");
  housing.tables.erase("listings");
  ChainPtr chain = housing.chain;
  auto fixture = [&](const char* name) {
    return read_csv_file((fs::path(data_dir) / "fixtures" / name).string(), chain);
  };
  return Fixtures{std::move(housing),
                  std::move(listings),
                  fixture("same_order_high.csv"),
                  fixture("same_order_low.csv"),
                  fixture("double_negation_left.csv"),
                  fixture("double_negation_right.csv")};
}

/// Rows as printed in a listing, top to bottom.
using Listing = std::vector<std::pair<Tuple, Rational>>;

inline Listing listing(const std::string& header, const std::vector<std::string>& rows, const ChainPtr& chain) {
  Listing out;
  for (const auto& row : rows) {
    RankedTable one = read_csv_text(header + "\n" + row + "\n", chain);
    const auto& [t, s] = *one.entries().begin();
    out.emplace_back(t, s.value());
  }
  return out;
}

/// Checks that `d`, read in descending score order, lists exactly `expected`
/// with every score within `tolerance`.
inline std::optional<std::string> compare_listing(const RankedTable& d, const Listing& expected, const Rational& tolerance) {
  auto rows = d.sorted_rows();
  if (rows.size() != expected.size()) {
    return "expected " + std::to_string(expected.size()) + " rows, got " + std::to_string(rows.size());
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [t, s] = rows[i];
    if (!(t == expected[i].first)) return "row " + std::to_string(i + 1) + ": got " + t.str() + ", expected " + expected[i].first.str();
    Rational diff = s.value() - expected[i].second;
    if (diff < Rational(0)) diff = -diff;
    if (diff > tolerance) {
      return "row " + std::to_string(i + 1) + " " + t.str() + ": score " + s.value().to_decimal(6) + ", expected " +
             expected[i].second.to_decimal(3);
    }
  }
  return std::nullopt;
}

inline std::vector<Tuple> tuple_order(const RankedTable& d) {
  std::vector<Tuple> out;
  for (const auto& [t, s] : d.sorted_rows()) out.push_back(t);
  return out;
}

inline Check make_check(std::string name, const std::function<std::optional<std::string>()>& body) {
  Check c{std::move(name), false, ""};
  try {
    auto problem = body();
    c.passed = !problem;
    c.detail = problem.value_or("ok");
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

namespace detail {

inline RankedTable housing_join(const Fixtures& fx) {
  return natural_join(fx.housing.table("houses"), fx.housing.table("offers"));
}

inline const OrderMap& iso(const Fixtures& fx) { return fx.housing.maps.at("f"); }

inline RankedTable transformed_join(const Fixtures& fx) {
  return natural_join(compose_table(fx.housing.table("houses"), iso(fx)), compose_table(fx.housing.table("offers"), iso(fx)));
}

inline const char* kJoinHeader = "#,id:int,bdrm:int,sqft:int,agent:str,price:int";
inline const char* kIdPriceHeader = "#,id:int,price:int";
inline const char* kIdBdrmPriceHeader = "#,id:int,bdrm:int,price:int";

}  // namespace detail

inline Check check_join(const Fixtures& fx) {
  return make_check("join of houses and offers", [&]() -> std::optional<std::string> {
    Listing expected = listing(detail::kJoinHeader,
                               {"0.937,71,3,3280,Adams,849000", "0.937,71,3,3280,Black,798000",
                                "0.778,85,5,4580,Black,998000", "0.643,82,4,2350,Adams,648000",
                                "0.426,58,4,1760,Black,829000", "0.148,93,2,1130,Black,598000"},
                               fx.housing.chain);
    return compare_listing(detail::housing_join(fx), expected, Rational(0));
  });
}

inline Check check_transformed_projection(const Fixtures& fx) {
  return make_check("ordinal transformation of a projected join", [&]() -> std::optional<std::string> {
    const OrderMap& f = detail::iso(fx);
    RankedTable lhs = project(detail::transformed_join(fx), {"id", "price"});
    Listing expected = listing(detail::kIdPriceHeader,
                               {"0.882,71,798000", "0.882,71,849000", "0.655,85,998000", "0.541,82,648000",
                                "0.462,58,829000", "0.272,93,598000"},
                               fx.housing.chain);
    if (auto bad = compare_listing(lhs, expected, Rational::parse("0.0005"))) return bad;
    RankedTable plain = project(detail::housing_join(fx), {"id", "price"});
    if (!(compose_table(plain, f) == lhs)) return std::string("transformed inputs disagree with transformed output");
    if (tuple_order(plain) != tuple_order(lhs)) return std::string("tuple order changed under the transformation");

    // Score correspondence of the join against the transformed join.
    RankedTable joined = detail::housing_join(fx);
    RankedTable composed = compose_table(joined, f);
    const std::vector<std::pair<const char*, const char*>> pairs{
        {"0.937", "0.882"}, {"0.778", "0.655"}, {"0.643", "0.541"}, {"0.426", "0.462"}, {"0.148", "0.272"}};
    for (const auto& [from, to] : pairs) {
      bool seen = false;
      for (const auto& [t, s] : joined.entries()) {
        if (s.value() != Rational::parse(from)) continue;
        seen = true;
        std::string got = composed.score_of(t).value().to_decimal(3);
        if (got != to) return std::string(from) + " maps to " + got + ", expected " + to;
      }
      if (!seen) return std::string("no join row scored ") + from;
    }
    return std::nullopt;
  });
}

inline Check check_product_contrast(const Fixtures& fx) {
  return make_check("product aggregation breaks the order", [&]() -> std::optional<std::string> {
    const OrderMap& f = detail::iso(fx);
    RankedTable prod = project(
        product_join(compose_table(fx.housing.table("houses"), f), compose_table(fx.housing.table("offers"), f)),
        {"id", "price"});
    Listing expected = listing(detail::kIdPriceHeader,
                               {"0.877,71,798000", "0.782,71,849000", "0.655,85,998000", "0.429,58,829000",
                                "0.361,82,648000", "0.160,93,598000"},
                               fx.housing.chain);
    if (auto bad = compare_listing(prod, expected, Rational::parse("0.001"))) return bad;
    auto order = tuple_order(prod);
    auto min_order = tuple_order(project(detail::transformed_join(fx), {"id", "price"}));
    auto pos = [](const std::vector<Tuple>& v, std::int64_t id) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::get<std::int64_t>(v[i].at("id")) == id) return i;
      }
      return v.size();
    };
    if (!(pos(min_order, 82) < pos(min_order, 58) && pos(order, 58) < pos(order, 82))) {
      return std::string("expected ids 82 and 58 to swap places");
    }
    return std::nullopt;
  });
}

inline Check check_restriction(const Fixtures& fx) {
  return make_check("restriction with transformed condition", [&]() -> std::optional<std::string> {
    const OrderMap& f = detail::iso(fx);
    const RestrictionCondition& roomy = fx.housing.conditions.at("roomy");
    const std::vector<std::string> s{"id", "bdrm", "price"};
    Rational tol = Rational::parse("0.001");
    RankedTable left = project(restrict(detail::housing_join(fx), roomy), s);
    RankedTable right = project(restrict(detail::transformed_join(fx), roomy.then(f)), s);
    RankedTable untransformed = project(restrict(detail::transformed_join(fx), roomy), s);
    auto chain = fx.housing.chain;
    if (auto bad = compare_listing(left,
                                   listing(detail::kIdBdrmPriceHeader,
                                           {"0.778,85,5,998000", "0.699,71,3,798000", "0.699,71,3,849000",
                                            "0.643,82,4,648000", "0.426,58,4,829000", "0.148,93,2,598000"},
                                           chain),
                                   tol)) {
      return "original: " + *bad;
    }
    if (auto bad = compare_listing(right,
                                   listing(detail::kIdBdrmPriceHeader,
                                           {"0.655,85,5,998000", "0.579,71,3,798000", "0.579,71,3,849000",
                                            "0.541,82,4,648000", "0.462,58,4,829000", "0.272,93,2,598000"},
                                           chain),
                                   tol)) {
      return "transformed: " + *bad;
    }
    if (auto bad = compare_listing(untransformed,
                                   listing(detail::kIdBdrmPriceHeader,
                                           {"0.699,71,3,798000", "0.699,71,3,849000", "0.655,85,5,998000",
                                            "0.541,82,4,648000", "0.462,58,4,829000", "0.272,93,2,598000"},
                                           chain),
                                   tol)) {
      return "condition left untransformed: " + *bad;
    }
    if (tuple_order(left) != tuple_order(right)) return std::string("transformed restriction reordered tuples");
    if (tuple_order(untransformed) == tuple_order(right)) {
      return std::string("an untransformed condition should reorder tuples");
    }
    return std::nullopt;
  });
}

inline Check check_subsethood(const Fixtures& fx) {
  return make_check("graded subsethood and similarity", [&]() -> std::optional<std::string> {
    RankedTable j = detail::housing_join(fx);
    auto chain = fx.housing.chain;
    Score forward = subsethood(j, fx.listings);
    Score backward = subsethood(fx.listings, j);
    Score sim = similarity(j, fx.listings);
    if (forward != chain->top()) return "S(join, listings) = " + forward.str(true);
    if (backward != chain->make(Rational::parse("0.937"))) return "S(listings, join) = " + backward.str(true);
    if (sim != chain->make(Rational::parse("0.937"))) return "E = " + sim.str(true);
    return std::nullopt;
  });
}

inline Check check_ordinal(const Fixtures& fx) {
  return make_check("ordinal inclusion and canonical map", [&]() -> std::optional<std::string> {
    RankedTable j = detail::housing_join(fx);
    auto chain = fx.housing.chain;
    if (!ordinally_included(fx.listings, j).holds) return std::string("listings should be ordinally included in the join");
    auto back = ordinally_included(j, fx.listings);
    if (back.holds) return std::string("join should not be ordinally included in listings");
    if (!back.witness || std::get<std::int64_t>(back.witness->at("price")) != 798000) {
      return "wrong evidence: " + (back.witness ? back.witness->str() : std::string("none"));
    }
    if (!ordinally_included(fx.same_order_high, fx.same_order_low).holds ||
        !ordinally_included(fx.same_order_low, fx.same_order_high).holds ||
        !ordinally_equivalent(fx.same_order_high, fx.same_order_low)) {
      return std::string("single-tuple tables should be ordinally equivalent");
    }
    if (fx.same_order_high == fx.same_order_low) return std::string("single-tuple tables should differ");

    OrderMap f = canonical_map(fx.listings, j);
    auto r = [](const char* s) { return Rational::parse(s); };
    const std::vector<OrderMap::Piece> expected{{r("0"), r("0.148"), r("0.148")},   {r("0.148"), r("0.426"), r("0.426")},
                                                {r("0.426"), r("0.643"), r("0.643")}, {r("0.643"), r("0.778"), r("0.778")},
                                                {r("0.778"), r("0.939"), r("0.937")}, {r("0.939"), r("1"), r("1")}};
    if (f.at_bottom() != std::optional<Rational>(Rational(0))) return "f(0) should be 0 in " + f.str();
    bool same = f.pieces().size() == expected.size();
    for (std::size_t i = 0; same && i < expected.size(); ++i) {
      same = f.pieces()[i].lo == expected[i].lo && f.pieces()[i].hi == expected[i].hi &&
             f.pieces()[i].value == expected[i].value;
    }
    if (!same) return "unexpected canonical map " + f.str();
    if (!(compose_table(fx.listings, f) == j)) {
      return std::string("composing listings with the canonical map does not give the join");
    }
    return std::nullopt;
  });
}

inline Check check_double_negation(const Fixtures& fx) {
  return make_check("intersection differs from double difference", [&]() -> std::optional<std::string> {
    const RankedTable& a = fx.double_negation_left;
    const RankedTable& b = fx.double_negation_right;
    RankedTable meet_ab = natural_join(a, b);
    RankedTable twice = difference(a, difference(a, b));
    if (meet_ab == twice) return "both sides equal " + meet_ab.str();
    return std::nullopt;
  });
}

inline std::vector<Check> run_figure_suite(const Fixtures& fx) {
  return {check_join(fx),       check_transformed_projection(fx), check_product_contrast(fx), check_restriction(fx),
          check_subsethood(fx), check_ordinal(fx),                check_double_negation(fx)};
}

}  // namespace rankdb::figures
