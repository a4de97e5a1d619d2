#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "covclose/goals.hpp"
#include "covclose/interpreter.hpp"
#include "covclose/suite.hpp"

namespace covclose {

struct GoalStatus {
  enum class State : std::uint8_t { Open, Covered, ProvenInfeasible };

  State state = State::Open;
  std::vector<std::size_t> covered_by;  // test indices, in attribution order
  std::string evidence;                 // ProvenInfeasible
};

std::string_view to_string(GoalStatus::State state);

struct CriterionSummary {
  Criterion criterion = Criterion::Statement;
  std::size_t total = 0;
  std::size_t covered = 0;
  std::size_t infeasible = 0;

  /// covered / total, in percent; 100 when there are no goals.
  double percent() const;
  /// (covered + infeasible) / total, in percent.
  double effective_percent() const;
};

struct CoverageReport {
  std::vector<Criterion> criteria;
  std::vector<TestGoal> goals;
  std::vector<GoalStatus> status;
  std::vector<std::string> test_names;
  /// Goals attributed to each test. An MC/DC goal is attributed to the test
  /// that completes its first independence pair.
  std::vector<std::vector<std::size_t>> per_test;

  CriterionSummary summary(Criterion criterion) const;
  std::vector<std::size_t> open_goals() const;
  std::size_t covered_count() const;
  bool fully_effective() const;
  bool is_covered(std::size_t goal) const { return status[goal].state == GoalStatus::State::Covered; }

  /// Marks an open goal as proven infeasible; covered goals are left alone.
  void mark_infeasible(std::size_t goal, std::string evidence);

  void write_text(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

/// One decision evaluation extracted from a trace.
struct DecisionEvaluation {
  PointId decision = 0;
  EvalPattern pattern;
};

std::vector<DecisionEvaluation> decision_evaluations(const PointTable& table, const Trace& trace);

/// Incremental measurement: traces are added in suite order.
class CoverageTracker {
 public:
  CoverageTracker(const InstrumentedProgram& ip, std::span<const Criterion> criteria);

  /// Records one test; returns the goals it newly covers.
  std::vector<std::size_t> add(const Trace& trace, std::string name = {});

  /// Goals `trace` would newly cover if added, without recording it.
  std::vector<std::size_t> preview(const Trace& trace) const;

  const CoverageReport& report() const { return report_; }
  CoverageReport& report() { return report_; }

  /// Distinct evaluation patterns observed so far, per decision.
  const std::map<PointId, std::set<EvalPattern>>& observed() const { return observed_; }

 private:
  std::vector<std::size_t> apply(const Trace& trace, std::size_t test_index, bool commit);

  const InstrumentedProgram* ip_;
  CoverageReport report_;
  std::map<PointId, std::size_t> function_goal_;
  std::map<PointId, std::size_t> statement_goal_;
  std::map<std::pair<PointId, bool>, std::size_t> branch_goal_;
  std::map<PointId, std::vector<std::size_t>> mcdc_goals_;  // by decision
  std::map<PointId, std::set<EvalPattern>> observed_;
};

/// Runs every test (on up to `jobs` threads) and aggregates in suite order.
CoverageReport measure(const InstrumentedProgram& ip, const TestSuite& suite, std::span<const Criterion> criteria,
                       unsigned jobs = 1);

/// Goals (indices into `goals`) covered by a single trace on its own.
std::set<std::size_t> covered_goals(const InstrumentedProgram& ip, const Trace& trace,
                                    std::span<const TestGoal> goals);

/// Human-readable description of the MC/DC flavor used for reports.
std::string_view mcdc_flavor_note();

}  // namespace covclose
