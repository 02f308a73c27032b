#include <gtest/gtest.h>

#include "rankdb/rankdb.hpp"
#include "support/properties.hpp"

using namespace rankdb;

namespace {

ChainPtr unit() { return ScoreChain::rational_unit(); }
Score sc(const char* text) { return unit()->parse(text); }

}  // namespace

TEST(Rational, ParsesDecimalsAndFractions) {
  EXPECT_EQ(Rational::parse("0.937"), Rational(937, 1000));
  EXPECT_EQ(Rational::parse("2/4"), Rational(1, 2));
  EXPECT_EQ(Rational::parse("1"), Rational(1));
  EXPECT_THROW(Rational::parse("0.9x"), Error);
  EXPECT_THROW(Rational::parse("1/0"), Error);
}

TEST(Rational, Renders) {
  EXPECT_EQ(Rational(1).to_string(), "1");
  EXPECT_EQ(Rational(0).to_string(), "0");
  EXPECT_EQ(Rational(3, 8).to_string(), "0.375");
  EXPECT_EQ(Rational(1, 3).to_string(), "1/3");
  EXPECT_EQ(Rational(1, 3).to_decimal(3), "0.333");
  EXPECT_EQ(Rational(2, 3).to_decimal(3), "0.667");
  EXPECT_EQ(Rational(1).to_decimal(3), "1.000");
  EXPECT_EQ(Rational(7, 2).to_decimal(0), "4");
}

TEST(ScoreChain, MeetAndJoin) {
  EXPECT_EQ(meet(sc("0.937"), sc("0.997")), sc("0.937"));
  EXPECT_EQ(meet(sc("0.3"), unit()->top()), sc("0.3"));
  EXPECT_EQ(meet(sc("0.3"), sc("0.9")), sc("0.3"));
  EXPECT_EQ(join_sup(sc("0.3"), sc("0.9")), sc("0.9"));
  EXPECT_EQ(join_sup(sc("0.4"), unit()->bottom()), sc("0.4"));
  EXPECT_EQ(join_sup(sc("0.708"), sc("0.708")), sc("0.708"));
}

TEST(ScoreChain, ResiduumAndAbjunction) {
  EXPECT_EQ(residuum(sc("0.3"), sc("0.9")), unit()->top());
  EXPECT_EQ(residuum(sc("0.939"), sc("0.937")), sc("0.937"));
  EXPECT_EQ(residuum(unit()->top(), unit()->bottom()), unit()->bottom());
  EXPECT_EQ(abjunction(sc("0.4"), sc("0.4")), unit()->bottom());
  EXPECT_EQ(abjunction(sc("0.9"), sc("0.3")), sc("0.9"));
  EXPECT_EQ(abjunction(unit()->top(), unit()->bottom()), unit()->top());
}

TEST(ScoreChain, NegationAndBiresiduum) {
  EXPECT_EQ(negation(unit()->bottom()), unit()->top());
  EXPECT_EQ(negation(sc("0.5")), unit()->bottom());
  EXPECT_EQ(negation(unit()->top()), unit()->bottom());
  EXPECT_EQ(biresiduum(sc("0.2"), sc("0.2")), unit()->top());
  EXPECT_EQ(biresiduum(sc("0.2"), sc("0.7")), sc("0.2"));
  EXPECT_EQ(biresiduum(unit()->bottom(), unit()->top()), unit()->bottom());
}

TEST(ScoreChain, RejectsOutOfRangeScores) {
  EXPECT_THROW(unit()->make(Rational(3, 2)), Error);
  EXPECT_THROW(unit()->make(Rational(-1, 2)), Error);
}

TEST(ScoreChain, SymbolicLevels) {
  ChainPtr c = ScoreChain::symbolic({"none", "low", "high", "full"});
  Score low = c->parse("low"), high = c->parse("high");
  EXPECT_EQ(meet(low, high), low);
  EXPECT_EQ(residuum(high, low), low);
  EXPECT_EQ(residuum(low, high), c->top());
  EXPECT_EQ(low.str(false), "low");
  EXPECT_EQ(c->describe(), "symbolic(none < low < high < full)");
  EXPECT_THROW(c->parse("medium"), Error);
  EXPECT_THROW(c->make(Rational(1, 2)), Error);
}

TEST(ScoreChain, MixingChainsFails) {
  ChainPtr c = ScoreChain::symbolic({"no", "yes"});
  try {
    (void)meet(sc("0.5"), c->top());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::incompatible_chain);
  }
}

TEST(ScoreChain, LawsHoldOnGrid) {
  auto reports = testsupport::chain_law_suite(17, 2000);
  EXPECT_TRUE(testsupport::all_ok(reports)) << testsupport::summary(reports);
}

TEST(ScoreChain, LawsHoldOnSymbolicChain) {
  ChainPtr c = ScoreChain::symbolic({"a", "b", "c", "d", "e"});
  for (std::int64_t i = 0; i < 5; ++i) {
    for (std::int64_t j = 0; j < 5; ++j) {
      for (std::int64_t k = 0; k < 5; ++k) {
        Score a = c->make(Rational(i)), b = c->make(Rational(j)), x = c->make(Rational(k));
        EXPECT_EQ(meet(a, b) <= x, a <= residuum(b, x));
        EXPECT_EQ(abjunction(a, b) <= x, a <= join_sup(b, x));
        EXPECT_EQ(join_sup(residuum(a, b), residuum(b, a)), c->top());
      }
    }
  }
}
