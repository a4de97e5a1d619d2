#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "covclose/frontend.hpp"
#include "covclose/instrument.hpp"
#include "covclose/suite.hpp"
#include "covclose/suite_tools.hpp"
#include "support.hpp"

using namespace covclose;

namespace {

const Program& extremes() {
  static const Program p = parse("input int32 x;\ninput bool b;\ninput int32 y in [-5, 5];\nstep m { skip; }");
  return p;
}

TestSuite round_trip(const TestSuite& suite, const Program& program) {
  std::stringstream io;
  write_suite(io, suite, program);
  return read_suite(io, program);
}

}  // namespace

TEST(Suite, RoundTripExtremeValues) {
  constexpr auto kMin = std::numeric_limits<std::int32_t>::min();
  constexpr auto kMax = std::numeric_limits<std::int32_t>::max();
  TestSuite s;
  s.tests.push_back(TestCase{"a", TestVector{{{kMin, 0, -5}, {kMax, 1, 5}, {-1, 1, 0}}}, std::string("{\"gear\":0}"),
                             Provenance{"s4", "bmc k=1"}});
  s.tests.push_back(TestCase{"b", TestVector{{{0, 0, 0}}}, std::nullopt, std::nullopt});
  EXPECT_EQ(round_trip(s, extremes()).tests, s.tests);
}

TEST(Suite, RandomRoundTrip) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 100; ++i) {
    TestSuite s;
    for (int t = 0; t < 5; ++t) {
      TestVector v;
      for (int k = 0; k < 4; ++k) {
        v.steps.push_back({static_cast<std::int32_t>(rng()), static_cast<std::int32_t>(rng() & 1U),
                           static_cast<std::int32_t>(rng() % 11) - 5});
      }
      s.tests.push_back(TestCase{"t" + std::to_string(t), v, std::nullopt, std::nullopt});
    }
    ASSERT_EQ(round_trip(s, extremes()).tests, s.tests);
  }
}

TEST(Suite, RejectsMalformedInput) {
  const Program& p = extremes();
  auto read = [&](const std::string& text) {
    std::istringstream in(text);
    return read_suite(in, p);
  };
  EXPECT_THROW(read("{\"name\":\"a\",\"steps\":[{\"x\":1,\"b\":true}]}"), SuiteError);
  EXPECT_THROW(read("{\"name\":\"a\",\"steps\":[{\"x\":1,\"b\":true,\"y\":6}]}"), SuiteError);
  EXPECT_THROW(read("{\"name\":\"a\",\"steps\":[{\"x\":1.5,\"b\":true,\"y\":0}]}"), SuiteError);
  EXPECT_THROW(read("{\"name\":\"a\",\"steps\":[{\"x\":2147483648,\"b\":true,\"y\":0}]}"), SuiteError);
  EXPECT_THROW(read("{\"name\":\"a\",\"steps\":[{\"x\":1,\"b\":1,\"y\":0}]}"), SuiteError);
  EXPECT_THROW(read("{\"name\":\"a\",\"steps\":[]}"), SuiteError);
  EXPECT_THROW(read("{\"name\":\"a\",\"steps\":[{\"x\":1,\"b\":true,\"y\":0,\"z\":0}]}"), SuiteError);
  EXPECT_THROW(read("{\"name\":\"a\",\"steps\":[{\"x\":1,\"b\":true,\"y\":0}]}\n{\"name\":\"a\",\"steps\":[{\"x\":1,\"b\":"
                    "true,\"y\":0}]}"),
               SuiteError);
  EXPECT_THROW(read("not json"), SuiteError);
  EXPECT_EQ(read("# comment\n\n{\"name\":\"a\",\"steps\":[{\"x\":1,\"b\":true,\"y\":0}]}\n").size(), 1U);
}

TEST(Suite, UniqueNames) {
  TestSuite s;
  s.tests.push_back(TestCase{"gen_s5", {}, std::nullopt, std::nullopt});
  EXPECT_EQ(s.unique_name("gen_s4"), "gen_s4");
  EXPECT_EQ(s.unique_name("gen_s5"), "gen_s5_2");
  EXPECT_TRUE(has_unset_expectations(s));
}

TEST(Suite, RoundTripReproducesTraces) {
  const auto ip = instrument(parse_file(testkit::data_path("epark.mc")));
  const TestSuite s = random_suite(ip.program, 50, 5, 3);
  const TestSuite back = round_trip(s, ip.program);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(run(ip, back.tests[i].vector), run(ip, s.tests[i].vector));
}
