#include <gtest/gtest.h>

#include "rankdb/rankdb.hpp"
#include "support/properties.hpp"

using namespace rankdb;
using Op = QueryNode::Op;

namespace {

const Catalog& housing() {
  static const Catalog cat = load_catalog(std::string(RANKDB_DATA_DIR) + "/housing");
  return cat;
}

Query parsed(const std::string& text) { return parse_query(text, &housing()); }

std::pair<std::size_t, std::size_t> error_position(const std::string& text) {
  try {
    parse_query(text, &housing());
  } catch (const ParseError& e) {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

std::string error_text(const Query& e) {
  try {
    infer_scheme(e, housing());
  } catch (const Error& err) {
    return err.what();
  }
  return "";
}

}  // namespace

TEST(QueryParser, BuildsTheTree) {
  Query e = parsed("project(restrict(join(houses, offers), roomy), [id, price])");
  ASSERT_EQ(e->op, Op::project);
  EXPECT_EQ(e->attrs, (std::vector<std::string>{"id", "price"}));
  const Query& r = e->kids[0];
  ASSERT_EQ(r->op, Op::restrict);
  EXPECT_EQ(r->cond->dependencies(), std::set<std::string>{"bdrm"});
  ASSERT_EQ(r->kids[0]->op, Op::join);
  EXPECT_EQ(r->kids[0]->kids[0]->name, "houses");
  EXPECT_EQ(r->kids[0]->kids[1]->name, "offers");
}

TEST(QueryParser, AllOperators) {
  for (const char* text : {"union(houses, houses)", "difference(houses, houses)", "semijoin(houses, offers)",
                           "product(houses, offers)", "rename(houses, [id -> house_id])",
                           "divide(project(houses, [id]), project(offers, [id, price]), project(offers, [price]))",
                           "residuum(houses, houses, houses)", "restrict(offers, price < 700000)"}) {
    Query e = parsed(text);
    EXPECT_EQ(to_string(parsed(to_string(e))), to_string(e)) << text;
    EXPECT_NO_THROW(evaluate(e, housing())) << text;
  }
}

TEST(QueryParser, LocatesSyntaxErrors) {
  EXPECT_EQ(error_position("join(houses offers)"), (std::pair<std::size_t, std::size_t>{1, 13}));
  EXPECT_EQ(error_position("frob(houses)"), (std::pair<std::size_t, std::size_t>{1, 1}));
  EXPECT_EQ(error_position("join(houses,\n  offers"), (std::pair<std::size_t, std::size_t>{2, 9}));
  EXPECT_NE(error_position("restrict(houses, bdrm <)").first, 0u);
  EXPECT_NE(error_position("join(houses, offers) extra").first, 0u);
}

TEST(InferScheme, ResultSchemes) {
  EXPECT_EQ(infer_scheme(parsed("join(houses, offers)"), housing()).names(),
            (std::vector<std::string>{"agent", "bdrm", "id", "price", "sqft"}));
  EXPECT_EQ(infer_scheme(parsed("rename(offers, [id -> house])"), housing()).names(),
            (std::vector<std::string>{"agent", "house", "price"}));
  EXPECT_EQ(infer_scheme(parsed("project(houses, [])"), housing()).names(), std::vector<std::string>{});
}

TEST(InferScheme, ReportsWhereItFails) {
  EXPECT_NE(error_text(parsed("join(houses, nowhere)")).find("nowhere"), std::string::npos);
  std::string bad_project = error_text(parsed("join(offers, project(houses, [price]))"));
  EXPECT_NE(bad_project.find("join[1]"), std::string::npos) << bad_project;
  EXPECT_NE(error_text(parsed("union(houses, offers)")), "");
  EXPECT_NE(error_text(parsed("restrict(offers, bdrm > 2)")), "");
  EXPECT_NE(error_text(parsed("divide(houses, offers, houses)")), "");
}

TEST(Evaluate, MatchesDirectAlgebra) {
  RankedTable direct = project(restrict(natural_join(housing().table("houses"), housing().table("offers")),
                                        housing().conditions.at("roomy")),
                               {"id", "price"});
  EXPECT_EQ(evaluate(parsed("project(restrict(join(houses, offers), roomy), [id, price])"), housing()), direct);
}

TEST(Rewrite, PushRestriction) {
  Query e = parsed("restrict(join(houses, offers), bdrm > 3)");
  auto r = rewrite_push_restriction(e, housing());
  ASSERT_TRUE(r);
  EXPECT_EQ(to_string(*r), "join(restrict(houses, (bdrm > 3)), offers)");
  auto right = rewrite_push_restriction(parsed("restrict(join(houses, offers), price < 700000)"), housing());
  ASSERT_TRUE(right);
  EXPECT_EQ((*right)->kids[1]->op, Op::restrict);
  EXPECT_FALSE(rewrite_push_restriction(parsed("restrict(join(houses, offers), bdrm * price > 1)"), housing()));
  EXPECT_EQ(evaluate(*r, housing()), evaluate(e, housing()));
}

TEST(Rewrite, CommuteProjectRestrict) {
  Query e = parsed("project(restrict(houses, roomy), [bdrm, id])");
  auto r = rewrite_commute_project_restrict(e, housing());
  ASSERT_TRUE(r);
  EXPECT_EQ((*r)->op, Op::restrict);
  EXPECT_EQ(evaluate(*r, housing()), evaluate(e, housing()));
  EXPECT_FALSE(rewrite_commute_project_restrict(parsed("project(restrict(houses, roomy), [id])"), housing()));
}

TEST(Rewrite, ProjectCascadeAndUnion) {
  Query cascade = parsed("project(project(houses, [bdrm, id]), [id])");
  auto c = rewrite_project_cascade(cascade, housing());
  ASSERT_TRUE(c);
  EXPECT_EQ(to_string(*c), "project(houses, [id])");
  EXPECT_EQ(evaluate(*c, housing()), evaluate(cascade, housing()));

  Query over = parsed("project(union(houses, restrict(houses, roomy)), [id])");
  auto u = rewrite_project_over_union(over, housing());
  ASSERT_TRUE(u);
  EXPECT_EQ((*u)->op, Op::unite);
  EXPECT_EQ(evaluate(*u, housing()), evaluate(over, housing()));
}

TEST(Rewrite, Semijoin) {
  Query sj = parsed("semijoin(houses, offers)");
  auto s = rewrite_semijoin(sj, housing());
  ASSERT_TRUE(s);
  EXPECT_EQ(to_string(*s), "join(houses, project(offers, [id]))");
  EXPECT_EQ(evaluate(*s, housing()), evaluate(sj, housing()));

  Query pj = parsed("project(join(houses, offers), [bdrm, id, sqft])");
  auto p = rewrite_semijoin(pj, housing());
  ASSERT_TRUE(p);
  EXPECT_EQ(evaluate(*p, housing()), evaluate(pj, housing()));
}

TEST(Optimize, ReachesFixpointAndKeepsResult) {
  Query e = parsed("project(restrict(join(houses, offers), roomy), [bdrm, id, sqft])");
  OptimizeResult r = optimize(e, housing());
  EXPECT_FALSE(r.applied.empty());
  EXPECT_EQ(evaluate(r.expr, housing()), evaluate(e, housing()));
  EXPECT_TRUE(optimize(r.expr, housing()).applied.empty());
  EXPECT_NE(to_tree(r.expr).find("\n  "), std::string::npos);
}

TEST(Normalize, JoinChains) {
  NormalizeResult ok = normalize_to_join_chain(parsed("restrict(join(houses, offers), roomy)"), housing());
  EXPECT_TRUE(ok.is_join_chain());
  EXPECT_EQ(join_chain_leaves(ok.expr).size(), 2u);

  NormalizeResult blocked = normalize_to_join_chain(parsed("join(union(houses, houses), offers)"), housing());
  EXPECT_FALSE(blocked.is_join_chain());
  ASSERT_EQ(blocked.offending.size(), 1u);
  EXPECT_NE(blocked.offending[0].find("union"), std::string::npos);
}

TEST(Rewrite, RandomCatalogsPreserveResults) {
  auto reports = testsupport::rewrite_suite(60);
  EXPECT_TRUE(testsupport::all_ok(reports)) << testsupport::summary(reports);
}
