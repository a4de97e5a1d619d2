#include <gtest/gtest.h>

#include "covclose/frontend.hpp"
#include "covclose/interpreter.hpp"
#include "support.hpp"

using namespace covclose;

namespace {

std::vector<Diagnostic> diagnostics_of(std::string_view source) {
  try {
    parse(source, "t.mc");
  } catch (const FrontendError& e) {
    return e.diagnostics();
  }
  return {};
}

bool has_message(const std::vector<Diagnostic>& ds, std::string_view text) {
  for (const auto& d : ds) {
    if (d.message.find(text) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(Frontend, ParsesFigExample) {
  const Program p = parse_file(testkit::data_path("fig.mc"));
  ASSERT_EQ(p.inputs.size(), 3U);
  EXPECT_EQ(p.inputs[1].name, "b");
  EXPECT_EQ(p.inputs[1].lo, 0);
  EXPECT_EQ(p.inputs[1].hi, 3);
  EXPECT_EQ(p.entry, "main");
  ASSERT_EQ(p.entry_function().body.size(), 2U);
  EXPECT_EQ(p.entry_function().body[0].kind, Stmt::Kind::If);
}

TEST(Frontend, ParsesBenchmark) {
  const Program p = parse_file(testkit::data_path("epark.mc"));
  EXPECT_EQ(p.inputs.front().name, "speed");
  EXPECT_EQ(p.inputs.front().hi, 1000);
  EXPECT_TRUE(contains_calls(p));
}

TEST(Frontend, SyntaxErrorHasLocation) {
  const auto ds = diagnostics_of("input int32 a in [0, 3];\nstep main {\n  a = ;\n}\n");
  ASSERT_EQ(ds.size(), 1U);
  EXPECT_EQ(ds[0].loc.line, 3U);
  EXPECT_EQ(ds[0].format().rfind("t.mc:3:", 0), 0U);
}

TEST(Frontend, TypeErrors) {
  EXPECT_TRUE(has_message(diagnostics_of("input int32 a;\nstep m { if (a) { skip; } }"), "must be bool"));
  EXPECT_TRUE(has_message(diagnostics_of("input bool a;\nstate int32 s = 0;\nstep m { s = a + 1; }"), "int32"));
  EXPECT_TRUE(has_message(diagnostics_of("input int32 a;\nstep m { a = 1; }"), "cannot assign to input"));
  EXPECT_TRUE(has_message(diagnostics_of("step m { x = 1; }"), "undeclared variable 'x'"));
  EXPECT_TRUE(has_message(diagnostics_of("func f { skip; }"), "missing entry"));
  EXPECT_TRUE(has_message(diagnostics_of("func f { call g; }\nfunc g { call f; }\nstep m { call f; }"), "recursion"));
  EXPECT_TRUE(has_message(diagnostics_of("step m { call nope; }"), "undeclared function"));
  EXPECT_TRUE(has_message(diagnostics_of("input int32 a in [3, 1];\nstep m { skip; }"), "empty input range"));
}

TEST(Frontend, ReportsSeveralDiagnostics) {
  const auto ds = diagnostics_of("input int32 a;\nstep m {\n  a = 1;\n  y = 2;\n}\n");
  EXPECT_EQ(ds.size(), 2U);
}

TEST(Frontend, PrecedenceAndUnaryMinus) {
  const Program p = parse("state int32 s = 0;\nstep m { s = 1 + 2 * 3 - -4; }");
  const auto v = TestVector{{InputValuation{}}};
  EXPECT_EQ(execute(p, v).states.back()[0], 11);
}

TEST(Frontend, PrettyPrintRoundTrip) {
  for (const char* name : {"fig.mc", "epark.mc"}) {
    const Program p = parse_file(testkit::data_path(name));
    const Program q = parse(pretty_print(p));
    EXPECT_TRUE(same_structure(p, q)) << name;
  }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const std::string src = testkit::random_program_source(rng);
    const Program p = parse(src);
    const std::string printed = pretty_print(p);
    const Program q = parse(printed);
    ASSERT_TRUE(same_structure(p, q)) << src << "\n---\n" << printed;
    EXPECT_EQ(pretty_print(q), printed);
  }
}

TEST(Frontend, InliningPreservesBehaviour) {
  std::mt19937_64 rng(11);
  testkit::ProgramShape shape;
  int with_calls = 0;
  for (int i = 0; i < 200; ++i) {
    const Program p = parse(testkit::random_program_source(rng, shape));
    const Program q = inline_calls(p);
    EXPECT_FALSE(contains_calls(q));
    with_calls += contains_calls(p) ? 1 : 0;
    std::mt19937_64 vr(static_cast<std::uint64_t>(i));
    for (int k = 0; k < 20; ++k) {
      TestVector v;
      const auto space = testkit::step_space(p);
      for (int s = 0; s < 3; ++s) v.steps.push_back(space[vr() % space.size()]);
      const Execution a = execute(p, v);
      const Execution b = execute(q, v);
      ASSERT_EQ(a.states, b.states);
      ASSERT_EQ(a.trace.error.has_value(), b.trace.error.has_value());
      if (a.trace.error) {
        EXPECT_EQ(a.trace.error->message, b.trace.error->message);
        EXPECT_EQ(a.trace.error->step, b.trace.error->step);
      }
    }
  }
  EXPECT_GT(with_calls, 10);
}
