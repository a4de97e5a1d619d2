#include <gtest/gtest.h>

#include "covclose/frontend.hpp"
#include "covclose/fql.hpp"
#include "support.hpp"

using namespace covclose;
using namespace covclose::fql;

namespace {

Trace fig_trace(std::int32_t a, std::int32_t b, std::int32_t c) {
  static const auto ip = instrument(parse_file(testkit::data_path("fig.mc")));
  return run(ip, TestVector{{{a, b, c}}});
}

}  // namespace

TEST(Fql, ParsesTableSyntax) {
  EXPECT_EQ(parse_query("@CALL(Ipoint1).\"NOT(@CALL(Ipoint5))*\".@CALL(Ipoint6)"),
            concat(call(1), concat(star(not_call(5)), call(6))));
  EXPECT_EQ(parse_query("@CALL(Ipoint5) -> @CALL(Ipoint6)"), seq(call(5), call(6)));
  EXPECT_EQ(parse_query("( @CALL(Ipoint5) + @CALL(Ipoint6) )"), alt(call(5), call(6)));
  EXPECT_EQ(parse_query("@CALL(Ipoint4t)"), call(4, true));
  EXPECT_EQ(parse_query("@CALL(Ipoint2f)"), call(2, false));
}

TEST(Fql, PrecedenceAndAssociativity) {
  const Query a = call(1);
  const Query b = call(2);
  const Query c = call(3);
  const Query d = call(4);
  EXPECT_EQ(parse_query("@CALL(Ipoint1).@CALL(Ipoint2).@CALL(Ipoint3)"), concat(a, concat(b, c)));
  EXPECT_EQ(parse_query("@CALL(Ipoint1)->@CALL(Ipoint2)->@CALL(Ipoint3)"), seq(a, seq(b, c)));
  EXPECT_EQ(parse_query("@CALL(Ipoint1) + @CALL(Ipoint2) -> @CALL(Ipoint3) . @CALL(Ipoint4)"),
            alt(a, seq(b, concat(c, d))));
  EXPECT_EQ(parse_query("@CALL(Ipoint1)*.@CALL(Ipoint2)"), concat(star(a), b));
}

TEST(Fql, Errors) {
  EXPECT_THROW(parse_query(""), QueryError);
  EXPECT_THROW(parse_query("@CALL(Ipoint1"), QueryError);
  EXPECT_THROW(parse_query("@CALL(Ipoint1) +"), QueryError);
  EXPECT_THROW(parse_query("@CALL(Ipointx)"), QueryError);
  try {
    parse_query("@CALL(Ipoint1) . @FOO");
    FAIL();
  } catch (const QueryError& e) {
    EXPECT_EQ(e.position(), 17U);
  }
}

TEST(Fql, PrintParseRoundTrip) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2000; ++i) {
    const Query q = testkit::random_query(rng, 6, 4);
    const std::string text = to_string(q);
    ASSERT_EQ(parse_query(text), q) << text;
  }
  EXPECT_EQ(to_string(star(not_call(5))), "\"NOT(@CALL(Ipoint5))*\"");
}

TEST(Fql, MatcherAgreesWithRegexOracle) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 3000; ++i) {
    const Query q = testkit::random_query(rng, 4, 4);
    const auto events = testkit::random_events(rng, 4, 10);
    ASSERT_EQ(matches(q, events), testkit::regex_oracle(q, events)) << to_string(q);
  }
}

TEST(Fql, FigGoals) {
  const Query path = goal_to_query(PathGoal{PathGoal::Form::Simple, {1, 5, 6}, 0});
  const Query avoid = goal_to_query(PathGoal{PathGoal::Form::Complement, {1, 6}, 5});
  const Query cond = goal_to_query(ConditionGoal{4, true, {{2, false}, {3, true}}});
  EXPECT_TRUE(matches(path, fig_trace(1, 1, 2)));
  EXPECT_FALSE(matches(path, fig_trace(1, 2, 2)));
  EXPECT_TRUE(matches(avoid, fig_trace(1, 2, 2)));
  EXPECT_FALSE(matches(avoid, fig_trace(1, 1, 2)));
  EXPECT_TRUE(matches(cond, fig_trace(1, 2, 3)));
  EXPECT_FALSE(matches(cond, fig_trace(1, 1, 2)));
  EXPECT_FALSE(matches(cond, fig_trace(1, 2, 2)));
  EXPECT_TRUE(matches(goal_to_query(PathGoal{PathGoal::Form::Disjunction, {5, 6}, 0}), fig_trace(1, 2, 2)));
}

TEST(Fql, ConditionQueryStaysInOneEvaluation) {
  // (2,f) from one evaluation must not combine with (3,t)(4,t) of another.
  const Query cond = goal_to_query(ConditionGoal{4, true, {{2, false}, {3, true}}});
  const std::vector<Event> events{{2, PointKind::Condition, false}, {3, PointKind::Condition, false},
                                  {4, PointKind::Decision, false},  {2, PointKind::Condition, true},
                                  {4, PointKind::Decision, true}};
  EXPECT_FALSE(matches(cond, events));
}

TEST(Fql, EmptyLanguageMatchesEverything) {
  EXPECT_TRUE(matches(star(call(1)), std::vector<Event>{}));
  EXPECT_TRUE(matches(star(call(1)), std::vector<Event>{{2, PointKind::Statement, std::nullopt}}));
}

TEST(Fql, McdcQueryUsesObservedHalf) {
  const auto ip = instrument(parse_file(testkit::data_path("fig.mc")));
  const auto goals = enumerate_goals(ip, Criterion::Mcdc);
  const auto& c3 = std::get<McdcGoal>(goals[1]);
  EXPECT_EQ(c3.condition, 3U);
  // observed (2,f)(3,f)(4,f): the other half is (2,f)(3,t)(4,t)
  const std::set<EvalPattern> observed{EvalPattern{false, 0b11, 0b00}};
  const Query q = mcdc_query(ip.table, c3, observed);
  EXPECT_TRUE(matches(q, fig_trace(1, 2, 3)));
  EXPECT_FALSE(matches(q, fig_trace(1, 1, 2)));
  const Query both = mcdc_query(ip.table, c3, {});
  EXPECT_FALSE(matches(both, fig_trace(1, 2, 3)));
}
