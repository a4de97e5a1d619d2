#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "covclose/bmc.hpp"
#include "covclose/coverage.hpp"
#include "covclose/suite.hpp"

namespace covclose {

struct ClosureConfig {
  std::vector<Criterion> criteria{Criterion::Statement, Criterion::Branch, Criterion::Mcdc};
  std::size_t k_max = 3;
  bmc::Limits limits;
  /// Maximum number of solver calls (infeasibility checks and generation
  /// attempts); unlimited when unset.
  std::optional<std::size_t> budget;
  bool prove_infeasible = true;
  /// Try the infeasibility check before generation (otherwise only after
  /// generation fails at k_max).
  bool infeasibility_first = true;
  /// After a vector is found, search for a vector of `group_length` steps
  /// (at least the current k) that covers further open goals as well. Each
  /// extension attempt is one solver call.
  bool group = true;
  std::size_t group_attempts = 32;
  std::size_t group_length = 3;
  unsigned jobs = 1;
  /// Receives one JSON record per goal attempt.
  std::ostream* log = nullptr;
};

struct AttemptRecord {
  std::string goal;
  std::string kind;  // "generate" or "infeasibility"
  std::size_t k = 0;
  std::string verdict;
  double seconds = 0;
  sat::Stats stats;
  std::string test;  // name of the appended test, if any
  std::vector<std::string> grouped;  // further goals the vector was extended to
};

struct ClosureResult {
  TestSuite suite;
  CoverageReport report;
  std::vector<AttemptRecord> attempts;
  std::size_t solver_calls = 0;
  std::size_t generated = 0;
  std::size_t k_reached = 0;
  bool budget_exhausted = false;
};

/// A generated vector did not cover the goal it was generated for.
class RevalidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps a re-validated vector; the expected outcome stays unset.
TestCase new_test_case(const TestSuite& suite, const TestVector& vector, const TestGoal& goal,
                       std::string annotation);

/// Measure, prove or generate per open goal, re-validate, append,
/// re-measure; k grows from 1 to k_max across sweeps.
ClosureResult close(const InstrumentedProgram& ip, TestSuite suite, const ClosureConfig& config);

void write_attempt_json(std::ostream& out, const AttemptRecord& record);

}  // namespace covclose
