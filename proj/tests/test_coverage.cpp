#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "covclose/coverage.hpp"
#include "covclose/frontend.hpp"
#include "support.hpp"

using namespace covclose;

namespace {

TestCase tc(std::string name, std::initializer_list<InputValuation> steps) {
  return TestCase{std::move(name), TestVector{steps}, std::nullopt, std::nullopt};
}

const std::vector<Criterion> kAll{Criterion::Function, Criterion::Statement, Criterion::Branch, Criterion::Mcdc};

struct Pattern {
  bool outcome;
  std::map<PointId, bool> values;  // evaluated conditions only
};

// Independent coverage computation straight from the event lists.
struct OracleCoverage {
  std::set<PointId> points;
  std::set<std::pair<PointId, bool>> branches;
  std::map<PointId, std::vector<Pattern>> evaluations;

  void add(const Trace& t, const PointTable& table) {
    std::map<PointId, std::map<PointId, bool>> pending;
    for (const Event& e : t.events) {
      points.insert(e.point);
      const PointInfo& info = table.at(e.point);
      if (info.kind == PointKind::Condition) pending[info.parent_decision][e.point] = *e.truth;
      if (info.kind == PointKind::Decision) {
        branches.insert({e.point, *e.truth});
        evaluations[e.point].push_back(Pattern{*e.truth, pending[e.point]});
        pending[e.point].clear();
      }
    }
  }

  bool mcdc(PointId decision, PointId cond) const {
    auto it = evaluations.find(decision);
    if (it == evaluations.end()) return false;
    for (const auto& a : it->second) {
      for (const auto& b : it->second) {
        if (a.outcome == b.outcome || !a.values.count(cond) || !b.values.count(cond)) continue;
        if (a.values.at(cond) == b.values.at(cond)) continue;
        bool ok = true;
        for (const auto& [c, v] : a.values) {
          if (c != cond && b.values.count(c) && b.values.at(c) != v) ok = false;
        }
        if (ok) return true;
      }
    }
    return false;
  }
};

}  // namespace

TEST(Coverage, FigExample) {
  const auto ip = instrument(parse_file(testkit::data_path("fig.mc")));
  TestSuite suite;
  suite.tests = {tc("t1", {{1, 1, 2}})};
  auto r = measure(ip, suite, kAll);
  EXPECT_EQ(r.summary(Criterion::Statement).covered, 3U);
  EXPECT_EQ(r.summary(Criterion::Branch).covered, 1U);
  EXPECT_EQ(r.summary(Criterion::Mcdc).covered, 0U);
  EXPECT_EQ(r.summary(Criterion::Function).covered, 1U);

  suite.tests.push_back(tc("t2", {{1, 2, 2}}));
  r = measure(ip, suite, kAll);
  EXPECT_EQ(r.summary(Criterion::Branch).covered, 2U);
  EXPECT_EQ(r.summary(Criterion::Mcdc).covered, 1U);

  suite.tests.push_back(tc("t3", {{1, 2, 3}}));
  r = measure(ip, suite, kAll);
  EXPECT_EQ(r.summary(Criterion::Mcdc).covered, 2U);
  EXPECT_DOUBLE_EQ(r.summary(Criterion::Mcdc).percent(), 100.0);
  EXPECT_TRUE(r.fully_effective());
}

TEST(Coverage, McdcPairsMaySpanSteps) {
  const auto ip = instrument(parse_file(testkit::data_path("fig.mc")));
  TestSuite suite;
  suite.tests = {tc("t", {{1, 1, 2}, {1, 2, 2}})};
  const auto r = measure(ip, suite, std::vector<Criterion>{Criterion::Mcdc});
  EXPECT_EQ(r.summary(Criterion::Mcdc).covered, 1U);
}

TEST(Coverage, IndependencePairMasking) {
  // a || b: (a=t) vs (a=f,b=f) shows a; b unevaluated in the first.
  EvalPattern t{true, 0b01, 0b01};
  EvalPattern ff{false, 0b11, 0b00};
  EvalPattern ft{true, 0b11, 0b10};
  EXPECT_TRUE(independence_pair(t, ff, 0));
  EXPECT_FALSE(independence_pair(t, ff, 1));
  EXPECT_TRUE(independence_pair(ft, ff, 1));
  EXPECT_FALSE(independence_pair(t, ft, 0));
}

TEST(Coverage, AgreesWithOracleOnRandomSuites) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 150; ++i) {
    const auto ip = instrument(parse(testkit::random_program_source(rng)));
    const auto space = testkit::step_space(ip.program);
    TestSuite suite;
    OracleCoverage oracle;
    const int n = static_cast<int>(rng() % 6);
    for (int t = 0; t < n; ++t) {
      TestVector v;
      const int len = 1 + static_cast<int>(rng() % 3);
      for (int s = 0; s < len; ++s) v.steps.push_back(space[rng() % space.size()]);
      oracle.add(run(ip, v), ip.table);
      suite.tests.push_back(TestCase{"t" + std::to_string(t), v, std::nullopt, std::nullopt});
    }
    const auto report = measure(ip, suite, kAll);
    for (std::size_t g = 0; g < report.goals.size(); ++g) {
      bool want = false;
      const TestGoal& goal = report.goals[g];
      if (const auto* s = std::get_if<StatementGoal>(&goal)) want = oracle.points.count(s->point) != 0;
      if (const auto* f = std::get_if<FunctionGoal>(&goal)) want = oracle.points.count(f->point) != 0;
      if (const auto* b = std::get_if<BranchGoal>(&goal)) want = oracle.branches.count({b->decision, b->outcome}) != 0;
      if (const auto* m = std::get_if<McdcGoal>(&goal)) want = oracle.mcdc(m->decision, m->condition);
      ASSERT_EQ(report.is_covered(g), want) << goal_id(goal);
    }
  }
}

TEST(Coverage, TrackerPreviewMatchesAdd) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 60; ++i) {
    const auto ip = instrument(parse(testkit::random_program_source(rng)));
    const auto space = testkit::step_space(ip.program);
    CoverageTracker tracker(ip, kAll);
    for (int t = 0; t < 5; ++t) {
      TestVector v;
      for (int s = 0; s < 2; ++s) v.steps.push_back(space[rng() % space.size()]);
      const Trace trace = run(ip, v);
      const auto preview = tracker.preview(trace);
      EXPECT_EQ(tracker.add(trace), preview);
      EXPECT_TRUE(tracker.preview(trace).empty());
    }
  }
}

TEST(Coverage, InfeasibleCountsAsEffective) {
  const auto ip = instrument(parse("input int32 a in [0, 3];\nstep m {\n  if (a > 5) {\n    skip;\n  }\n}"));
  TestSuite suite;
  suite.tests = {tc("t", {{0}})};
  auto r = measure(ip, suite, std::vector<Criterion>{Criterion::Statement});
  ASSERT_EQ(r.open_goals().size(), 1U);
  r.mark_infeasible(r.open_goals().front(), "test");
  EXPECT_DOUBLE_EQ(r.summary(Criterion::Statement).percent(), 50.0);
  EXPECT_DOUBLE_EQ(r.summary(Criterion::Statement).effective_percent(), 100.0);
  std::ostringstream text;
  r.write_text(text);
  EXPECT_NE(text.str().find("Proven infeasible"), std::string::npos);
}

TEST(Coverage, ParallelMeasurementIsIdentical) {
  const auto ip = instrument(parse_file(testkit::data_path("epark.mc")));
  std::mt19937_64 rng(23);
  TestSuite suite;
  const auto& inputs = ip.program.inputs;
  for (int t = 0; t < 40; ++t) {
    TestVector v;
    for (int s = 0; s < 5; ++s) {
      InputValuation x;
      for (const auto& d : inputs) x.push_back(std::uniform_int_distribution<std::int32_t>(d.lo, d.hi)(rng));
      v.steps.push_back(x);
    }
    suite.tests.push_back(TestCase{"t" + std::to_string(t), v, std::nullopt, std::nullopt});
  }
  const auto a = measure(ip, suite, kAll, 1);
  const auto b = measure(ip, suite, kAll, 4);
  for (std::size_t g = 0; g < a.goals.size(); ++g) {
    EXPECT_EQ(a.status[g].state, b.status[g].state);
    EXPECT_EQ(a.status[g].covered_by, b.status[g].covered_by);
  }
}
