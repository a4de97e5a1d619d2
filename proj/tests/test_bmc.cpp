#include <gtest/gtest.h>

#include <sstream>

#include "covclose/bmc.hpp"
#include "covclose/frontend.hpp"
#include "support.hpp"

using namespace covclose;

namespace {

bmc::Result solve_at(const InstrumentedProgram& ip, const fql::Query& q, std::size_t k) {
  bmc::Options o;
  o.k = k;
  o.limits.deterministic = true;
  return bmc::solve(ip, q, o);
}

std::vector<fql::Query> goal_queries(const InstrumentedProgram& ip) {
  std::vector<fql::Query> out;
  for (const auto& g : enumerate_goals(ip, std::vector<Criterion>{Criterion::Statement, Criterion::Branch})) {
    out.push_back(fql::goal_to_query(g));
  }
  for (const auto& g : condition_goals(ip)) out.push_back(fql::goal_to_query(g));
  return out;
}

const char* kRipening =
    "input bool go;\nstate int32 n = 0;\nstep m {\n  if (go) {\n    n = n + 1;\n  }\n  if (n >= 3) {\n    skip;\n  }\n}";

}  // namespace

TEST(Bmc, AgreesWithExhaustiveSearch) {
  std::mt19937_64 rng(53);
  testkit::ProgramShape shape;
  shape.max_step_space = 8;
  int covered = 0;
  int no_vector = 0;
  for (int i = 0; i < 60; ++i) {
    const auto ip = instrument(parse(testkit::random_program_source(rng, shape)));
    for (std::size_t k = 1; k <= 2; ++k) {
      std::vector<Trace> traces;
      testkit::for_each_vector(ip.program, k, [&](const TestVector& v) { traces.push_back(run(ip, v)); });
      for (const auto& q : goal_queries(ip)) {
        const bool exists = std::any_of(traces.begin(), traces.end(), [&](const Trace& t) { return fql::matches(q, t); });
        const auto r = solve_at(ip, q, k);
        ASSERT_NE(r.outcome, bmc::Outcome::Exhausted);
        ASSERT_EQ(r.outcome == bmc::Outcome::Covered, exists) << fql::to_string(q) << " k=" << k << "\n"
                                                                << pretty_print(ip.program);
        if (r.vector) {
          ASSERT_EQ(r.vector->length(), k);
          ASSERT_TRUE(fql::matches(q, run(ip, *r.vector)));
          ++covered;
        } else {
          ++no_vector;
        }
      }
    }
  }
  EXPECT_GT(covered, 100);
  EXPECT_GT(no_vector, 10);
}

TEST(Bmc, ReproducesExactTraces) {
  // the concatenation of all events of a trace is matched by some vector
  std::mt19937_64 rng(59);
  for (int i = 0; i < 80; ++i) {
    const auto ip = instrument(parse(testkit::random_program_source(rng)));
    const auto space = testkit::step_space(ip.program);
    TestVector v;
    for (int s = 0; s < 2; ++s) v.steps.push_back(space[rng() % space.size()]);
    const Trace t = run(ip, v);
    if (t.events.empty()) continue;
    fql::Query q = fql::call(t.events.back().point, t.events.back().truth);
    for (std::size_t e = t.events.size() - 1; e-- > 0;) q = fql::concat(fql::call(t.events[e].point, t.events[e].truth), q);
    const auto r = solve_at(ip, q, 2);
    ASSERT_EQ(r.outcome, bmc::Outcome::Covered) << format_trace(t);
    ASSERT_TRUE(fql::matches(q, run(ip, *r.vector)));
  }
}

TEST(Bmc, RipeningCounterNeedsThreeSteps) {
  const auto ip = instrument(parse(kRipening));
  const fql::Query q = fql::goal_to_query(StatementGoal{8});
  ASSERT_EQ(ip.table.at(8).loc.line, 8U);
  EXPECT_EQ(solve_at(ip, q, 2).outcome, bmc::Outcome::NoVector);
  const auto r = solve_at(ip, q, 3);
  ASSERT_EQ(r.outcome, bmc::Outcome::Covered);
  EXPECT_EQ(r.vector->steps, (std::vector<InputValuation>{{1}, {1}, {1}}));
  bmc::Limits limits;
  limits.deterministic = true;
  const auto g = bmc::generate(ip, q, 5, limits);
  EXPECT_EQ(g.k, 3U);
  // not provable from a havoc state: n >= 3 is reachable
  EXPECT_FALSE(bmc::prove_infeasible(ip, StatementGoal{8}, limits).has_value());
}

TEST(Bmc, DefensiveBranchProvenInfeasible) {
  const auto ip = instrument(parse_file(testkit::data_path("epark.mc")));
  bmc::Limits limits;
  limits.deterministic = true;
  const auto evidence = bmc::prove_infeasible(ip, StatementGoal{4}, limits);
  ASSERT_TRUE(evidence.has_value());
  EXPECT_EQ(ip.table.at(4).loc.line, 37U);
  EXPECT_FALSE(bmc::prove_infeasible(ip, StatementGoal{5}, limits).has_value());
  EXPECT_FALSE(bmc::prove_infeasible(ip, BranchGoal{3, false}, limits).has_value());
  EXPECT_TRUE(bmc::prove_infeasible(ip, BranchGoal{3, true}, limits).has_value());
}

TEST(Bmc, DefensiveBranchNeverCoveredByEnumeration) {
  // every speed, with the boolean inputs fixed, in one step
  const auto ip = instrument(parse_file(testkit::data_path("epark.mc")));
  InputValuation x(ip.program.inputs.size(), 0);
  for (std::int32_t speed = 0; speed <= 1000; ++speed) {
    x[0] = speed;
    const Trace t = run(ip, TestVector{{x}});
    for (const auto& e : t.events) ASSERT_NE(e.point, 4U);
  }
}

TEST(Bmc, FigWorkedExample) {
  const auto ip = instrument(parse_file(testkit::data_path("fig.mc")));
  const fql::Query cond = fql::goal_to_query(ConditionGoal{4, true, {{2, false}, {3, true}}});
  const auto r = solve_at(ip, cond, 1);
  ASSERT_EQ(r.outcome, bmc::Outcome::Covered);
  const auto& in = r.vector->steps[0];
  EXPECT_NE(in[0], in[1]);
  EXPECT_NE(in[1], in[2]);
  // (4,t)(2,t)(3,t) is impossible: 3 is short-circuited when 2 is true
  EXPECT_EQ(solve_at(ip, fql::goal_to_query(ConditionGoal{4, true, {{2, true}, {3, true}}}), 3).outcome,
            bmc::Outcome::NoVector);
}

TEST(Bmc, DimacsAndDeterminism) {
  const auto ip = instrument(parse_file(testkit::data_path("epark.mc")));
  const fql::Query q = fql::goal_to_query(BranchGoal{ip.table.of_kind(PointKind::Decision)[3], true});
  std::ostringstream dimacs;
  bmc::Options o;
  o.k = 2;
  o.limits.deterministic = true;
  o.dimacs = &dimacs;
  const auto a = bmc::solve(ip, q, o);
  o.dimacs = nullptr;
  const auto b = bmc::solve(ip, q, o);
  EXPECT_EQ(dimacs.str().rfind("p cnf ", 0), 0U);
  ASSERT_EQ(a.outcome, bmc::Outcome::Covered);
  EXPECT_EQ(a.vector, b.vector);
  EXPECT_EQ(a.clauses, b.clauses);
}

TEST(Bmc, SessionCoversSeveralQueries) {
  const auto ip = instrument(parse(kRipening));
  bmc::Session session(ip, 3);
  const std::vector<sat::Lit> goals{session.encode(fql::goal_to_query(StatementGoal{8})),
                                    session.encode(fql::goal_to_query(BranchGoal{3, false}))};
  bmc::Limits limits;
  limits.deterministic = true;
  const auto r = session.solve(goals, limits);
  // three increments are needed, so go cannot be false in any step
  EXPECT_EQ(r.outcome, bmc::Outcome::NoVector);
  const auto one = session.solve(std::span<const sat::Lit>(goals.data(), 1), limits);
  EXPECT_EQ(one.outcome, bmc::Outcome::Covered);
}

TEST(Bmc, RuntimeErrorsStopTheTrace) {
  const auto ip = instrument(parse(
      "input int32 x in [0, 2];\nstate int32 s = 0;\nstep m {\n  s = 6 / x;\n  if (s > 2) {\n    skip;\n  }\n}"));
  // s > 2 needs x = 1 (6) or x = 2 (3); x = 0 is an error before the decision
  const auto r = solve_at(ip, fql::goal_to_query(BranchGoal{3, false}), 1);
  EXPECT_EQ(r.outcome, bmc::Outcome::NoVector);
}
