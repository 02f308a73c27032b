#include <gtest/gtest.h>

#include "rankdb/rankdb.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace rankdb;
using testsupport::Rng;

namespace {

ChainPtr unit() { return ScoreChain::rational_unit(); }
Score sc(const char* text) { return unit()->parse(text); }

const Catalog& housing() {
  static const Catalog cat = load_catalog(std::string(RANKDB_DATA_DIR) + "/housing");
  return cat;
}

std::set<std::int64_t> ids(const Cone& c) {
  std::set<std::int64_t> out;
  for (const auto& t : c.members) out.insert(std::get<std::int64_t>(t.at("id")));
  return out;
}

Tuple house(std::int64_t id, std::int64_t bdrm, std::int64_t sqft) {
  return Tuple({{"bdrm", bdrm}, {"id", id}, {"sqft", sqft}});
}

bool has_fresh(const RankedTable& d1, const RankedTable& d2) {
  return ordinal_detail::has_fresh_tuple(d1.scheme(), ordinal_detail::support_union(d1, d2).size());
}

// A pair of tables over one scheme; about half the time the second is the
// first pushed through an order-preserving map, so inclusion often holds.
std::pair<RankedTable, RankedTable> random_pair(Rng& rng, bool finite) {
  Scheme s = finite ? testsupport::scheme_of({"a", "b"}, true) : testsupport::random_scheme(rng, 1, 2);
  RankedTable d1 = testsupport::random_table(rng, s, unit(), 9, 6);
  if (testsupport::coin(rng)) return {d1, compose_table(d1, testsupport::random_preserving(rng, unit()))};
  return {d1, testsupport::random_table(rng, s, unit(), 9, 6)};
}

}  // namespace

TEST(Cones, HousingExamples) {
  const RankedTable& houses = housing().table("houses");
  EXPECT_EQ(ids(upper_cone(houses, house(82, 4, 2350))), (std::set<std::int64_t>{56, 71, 82, 85}));
  EXPECT_EQ(ids(upper_cone(houses, house(85, 5, 4580))), (std::set<std::int64_t>{85}));
  Cone everything = upper_cone(houses, house(1, 1, 1));
  EXPECT_TRUE(everything.all_tuples);

  Cone low = lower_cone(houses, house(58, 4, 1760));
  EXPECT_EQ(ids(low), (std::set<std::int64_t>{58, 93}));
  EXPECT_TRUE(low.zero_tuples);
  EXPECT_TRUE(low.contains(house(1, 1, 1), houses));
  EXPECT_FALSE(low.contains(house(82, 4, 2350), houses));
  EXPECT_TRUE(lower_cone(houses, house(85, 5, 4580)).all_tuples);
}

TEST(Inclusion, HousingJoinAndListings) {
  RankedTable j = natural_join(housing().table("houses"), housing().table("offers"));
  const RankedTable& listings = housing().table("listings");
  EXPECT_TRUE(ordinally_included(listings, j));
  auto back = ordinally_included(j, listings);
  ASSERT_FALSE(back);
  ASSERT_TRUE(back.witness);
  EXPECT_EQ(std::get<std::int64_t>(back.witness->at("price")), 798000);
  EXPECT_FALSE(ordinally_equivalent(j, listings));
}

TEST(Inclusion, ProceduresAgreeWithConeDefinition) {
  Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    auto [d1, d2] = random_pair(rng, i % 3 == 0);
    bool expected = oracle::ordinally_included(oracle::from_table(d1), oracle::from_table(d2), has_fresh(d1, d2));
    EXPECT_EQ(ordinally_included(d1, d2).holds, expected);
    EXPECT_EQ(included_by_upper_cones(d1, d2).holds, expected);
    EXPECT_EQ(included_by_lower_cones(d1, d2).holds, expected);
  }
}

TEST(Inclusion, WitnessesBreakTheUpperConeCondition) {
  Rng rng(42);
  for (int i = 0; i < 500; ++i) {
    auto [d1, d2] = random_pair(rng, false);
    auto inc = ordinally_included(d1, d2);
    if (inc || !inc.witness) continue;
    Cone c1 = upper_cone(d1, *inc.witness), c2 = upper_cone(d2, *inc.witness);
    bool escapes = c1.all_tuples && !c2.all_tuples;
    for (const auto& t : c1.members) escapes = escapes || !c2.contains(t, d2);
    EXPECT_TRUE(escapes) << inc.witness->str();
  }
}

TEST(Inclusion, IsAPreorder) {
  Rng rng(43);
  for (int i = 0; i < 300; ++i) {
    Scheme s = testsupport::random_scheme(rng, 1, 2);
    RankedTable d1 = testsupport::random_table(rng, s, unit(), 9, 6);
    EXPECT_TRUE(ordinally_included(d1, d1));
    RankedTable d2 = compose_table(d1, testsupport::random_preserving(rng, unit()));
    RankedTable d3 = compose_table(d2, testsupport::random_preserving(rng, unit()));
    EXPECT_TRUE(ordinally_included(d1, d2));
    EXPECT_TRUE(ordinally_included(d2, d3));
    EXPECT_TRUE(ordinally_included(d1, d3));
  }
}

TEST(Equivalence, MatchesRankSignature) {
  Rng rng(44);
  int equivalent = 0;
  for (int i = 0; i < 500; ++i) {
    Scheme s = testsupport::random_scheme(rng, 1, 2);
    RankedTable d1 = testsupport::random_table(rng, s, unit(), 6, 4);
    RankedTable d2 = testsupport::coin(rng) ? compose_table(d1, testsupport::random_isomorphism(rng, unit()))
                                            : testsupport::random_table(rng, s, unit(), 6, 4);
    bool eq = ordinally_equivalent(d1, d2);
    equivalent += eq;
    EXPECT_EQ(eq, rank_signature(d1) == rank_signature(d2));
  }
  EXPECT_GT(equivalent, 100);
}

TEST(Equivalence, SameOrderDifferentScores) {
  RankedTable a = read_csv_text("#,foo:int\n0.6,77\n", unit());
  RankedTable b = read_csv_text("#,foo:int\n0.5,77\n", unit());
  EXPECT_TRUE(ordinally_equivalent(a, b));
  EXPECT_NE(a, b);
  OrderMap w = witness_isomorphism(a, b);
  EXPECT_EQ(compose_table(a, w), b);
}

TEST(CanonicalMap, MatchesInfimumScan) {
  Rng rng(45);
  for (int i = 0; i < 500; ++i) {
    auto [d1, d2] = random_pair(rng, i % 4 == 0);
    if (!ordinally_included(d1, d2)) {
      EXPECT_THROW(canonical_map(d1, d2), Error);
      continue;
    }
    OrderMap f = canonical_map(d1, d2);
    auto o1 = oracle::from_table(d1), o2 = oracle::from_table(d2);
    bool fresh = has_fresh(d1, d2);
    for (std::int64_t k = 0; k <= 60; ++k) {
      Rational a(k, 60);
      EXPECT_EQ(f.apply_value(a), oracle::canonical_value(o1, o2, a, fresh)) << a.to_string() << " " << f.str();
    }
    EXPECT_EQ(compose_table(d1, f), d2);
  }
}

TEST(CanonicalMap, IsLeastAmongPreservingSolutions) {
  Rng rng(46);
  for (int i = 0; i < 300; ++i) {
    Scheme s = testsupport::random_scheme(rng, 1, 2);
    RankedTable d1 = testsupport::random_table(rng, s, unit(), 8, 6);
    OrderMap g = testsupport::random_preserving(rng, unit());
    RankedTable d2 = compose_table(d1, g);
    OrderMap f = canonical_map(d1, d2);
    for (const auto& v : range_of(d1)) EXPECT_LE(f.apply(v), g.apply(v));
  }
}

TEST(WitnessIsomorphism, CarriesFirstTableOntoSecond) {
  Rng rng(47);
  for (int i = 0; i < 300; ++i) {
    Scheme s = testsupport::random_scheme(rng, 1, 3);
    RankedTable d1 = testsupport::random_table(rng, s, unit(), 10, 8);
    RankedTable d2 = compose_table(d1, testsupport::random_isomorphism(rng, unit()));
    OrderMap w = witness_isomorphism(d1, d2);
    EXPECT_EQ(compose_table(d1, w), d2);
    std::vector<Rational> inputs;
    for (const auto& p : w.points()) inputs.push_back(p.first);
    EXPECT_FALSE(w.verify(inputs));
  }
  RankedTable a = read_csv_text("#,x:int\n0.5,1\n0.7,2\n", unit());
  RankedTable b = read_csv_text("#,x:int\n0.5,2\n0.7,1\n", unit());
  EXPECT_THROW(witness_isomorphism(a, b), Error);
}

TEST(Inclusion, RequiresSameScheme) {
  RankedTable a = read_csv_text("#,x:int\n0.5,1\n", unit());
  RankedTable b = read_csv_text("#,y:int\n0.5,1\n", unit());
  EXPECT_THROW(ordinally_included(a, b), Error);
  EXPECT_EQ(sc("0.5"), a.lookup(Tuple({{"x", std::int64_t{1}}})));
}
