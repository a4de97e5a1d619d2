#include <gtest/gtest.h>

#include <cmath>

#include "covclose/frontend.hpp"
#include "covclose/suite_tools.hpp"
#include "support.hpp"

using namespace covclose;

namespace {

const std::vector<Criterion> kCriteria{Criterion::Statement, Criterion::Branch, Criterion::Mcdc};

void expect_same_coverage(const CoverageReport& a, const CoverageReport& b) {
  for (Criterion c : kCriteria) EXPECT_EQ(a.summary(c).covered, b.summary(c).covered) << to_string(c);
}

}  // namespace

TEST(RandomVector, RangesAndDeterminism) {
  const Program p = parse_file(testkit::data_path("epark.mc"));
  const TestVector v = random_vector(p, 5, std::uint64_t{42});
  ASSERT_EQ(v.length(), 5U);
  for (const auto& step : v.steps) {
    for (std::size_t i = 0; i < p.inputs.size(); ++i) {
      EXPECT_GE(step[i], p.inputs[i].lo);
      EXPECT_LE(step[i], p.inputs[i].hi);
    }
  }
  EXPECT_EQ(v, random_vector(p, 5, std::uint64_t{42}));
  EXPECT_NE(v, random_vector(p, 5, std::uint64_t{43}));
}

TEST(RandomVector, RoughlyUniform) {
  const Program p = parse("input int32 x in [0, 3];\nstep m { skip; }");
  std::mt19937_64 rng(1);
  std::array<int, 4> counts{};
  for (int i = 0; i < 4000; ++i) ++counts[static_cast<std::size_t>(random_vector(p, 1, rng).steps[0][0])];
  for (int c : counts) EXPECT_NEAR(c, 1000, 150);
}

TEST(RandomSuite, Names) {
  const Program p = parse_file(testkit::data_path("fig.mc"));
  const TestSuite s = random_suite(p, 12, 3, 7);
  ASSERT_EQ(s.size(), 12U);
  EXPECT_EQ(s.tests[0].name, "seed_0001");
  EXPECT_EQ(s.tests[11].name, "seed_0012");
  EXPECT_EQ(s.tests[0].vector.length(), 3U);
}

TEST(RandomClosure, FigExampleIsMostlyRedundant) {
  const auto ip = instrument(parse_file(testkit::data_path("fig.mc")));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomClosureConfig c;
    c.criteria = {Criterion::Branch};
    c.budget = 100;
    c.seed = seed;
    const auto r = random_closure(ip, {}, c);
    EXPECT_EQ(r.generated, 100U);
    EXPECT_GE(r.report.summary(Criterion::Branch).percent(), 99.9);
    EXPECT_GE(r.redundancy(), 0.9);
    EXPECT_EQ(r.suite.size(), r.kept);
  }
}

TEST(RandomClosure, KeepsOnlyImprovingVectors) {
  const auto ip = instrument(parse_file(testkit::data_path("epark.mc")));
  RandomClosureConfig c;
  c.budget = 300;
  const auto seeds = random_suite(ip.program, 10, 5, 1);
  const auto r = random_closure(ip, seeds, c);
  CoverageTracker t(ip, kCriteria);
  for (const auto& tc : r.suite.tests) {
    const auto fresh = t.add(run(ip, tc.vector));
    if (tc.name.rfind("rand_", 0) == 0) EXPECT_FALSE(fresh.empty()) << tc.name;
  }
  c.jobs = 4;
  const auto parallel = random_closure(ip, seeds, c);
  ASSERT_EQ(parallel.suite.size(), r.suite.size());
  for (std::size_t i = 0; i < r.suite.size(); ++i) EXPECT_EQ(parallel.suite.tests[i], r.suite.tests[i]);
}

TEST(SetCover, GreedyExample) {
  const std::vector<std::set<int>> sets{{1, 2}, {2, 3}, {3}};
  EXPECT_EQ(greedy_set_cover<int>(sets), (std::vector<std::size_t>{0, 1}));
  const std::vector<std::set<int>> ties{{1}, {2}, {1, 2}, {2, 1}};
  EXPECT_EQ(greedy_set_cover<int>(ties), (std::vector<std::size_t>{2}));
  EXPECT_TRUE(greedy_set_cover<int>(std::vector<std::set<int>>{{}, {}}).empty());
}

TEST(Reduce, SuiteExample) {
  // T1 covers {A:t, B:f}, T2 {A:f, B:t}, T3 {A:f, B:f}
  const auto ip = instrument(parse(
      "input int32 x in [0, 2];\nstate int32 s = 0;\nstep m {\n  if (x == 0) {\n    s = 1;\n  }\n  if (x == 2) {\n    s = "
      "2;\n  }\n}"));
  TestSuite suite;
  suite.tests = {TestCase{"T1", TestVector{{{0}}}, std::nullopt, std::nullopt},
                 TestCase{"T2", TestVector{{{2}}}, std::nullopt, std::nullopt},
                 TestCase{"T3", TestVector{{{1}}}, std::nullopt, std::nullopt}};
  const auto reduced = reduce(ip, suite, std::vector<Criterion>{Criterion::Statement, Criterion::Branch});
  ASSERT_EQ(reduced.size(), 2U);
  EXPECT_EQ(reduced.tests[0].name, "T1");
  EXPECT_EQ(reduced.tests[1].name, "T2");
}

TEST(Reduce, PreservesCoverageAndStaysNearOptimal) {
  std::mt19937_64 rng(67);
  for (int i = 0; i < 60; ++i) {
    const auto ip = instrument(parse(testkit::random_program_source(rng)));
    const auto space = testkit::step_space(ip.program);
    TestSuite suite;
    const int n = 2 + static_cast<int>(rng() % 9);
    for (int t = 0; t < n; ++t) {
      TestVector v;
      const int len = 1 + static_cast<int>(rng() % 3);
      for (int s = 0; s < len; ++s) v.steps.push_back(space[rng() % space.size()]);
      suite.tests.push_back(TestCase{"t" + std::to_string(t), v, std::nullopt, std::nullopt});
    }
    const auto full = measure(ip, suite, kCriteria);
    const auto reduced = reduce(ip, suite, kCriteria);
    expect_same_coverage(full, measure(ip, reduced, kCriteria));

    std::size_t best = suite.size();
    for (std::uint32_t mask = 0; mask < (1U << suite.size()); ++mask) {
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      if (size >= best) continue;
      TestSuite sub;
      for (std::size_t t = 0; t < suite.size(); ++t) {
        if ((mask >> t) & 1U) sub.tests.push_back(suite.tests[t]);
      }
      if (measure(ip, sub, kCriteria).covered_count() == full.covered_count()) best = size;
    }
    const double bound = std::max<double>(1.0, static_cast<double>(best) * (1.0 + std::log(std::max<std::size_t>(1, full.covered_count()))));
    EXPECT_LE(static_cast<double>(reduced.size()), bound);
  }
}
