#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "covclose/instrument.hpp"

namespace covclose {

enum class Criterion : std::uint8_t { Function, Statement, Branch, Mcdc };

std::string_view to_string(Criterion criterion);
/// Accepts function|func, statement|stmt, branch|decision, mcdc.
std::optional<Criterion> parse_criterion(std::string_view text);
/// Comma separated list; throws std::invalid_argument on unknown names.
std::vector<Criterion> parse_criteria(std::string_view text);

/// One decision evaluation as seen in a trace: outcome plus the truth of
/// every evaluated condition, as leaf-index bit masks.
struct EvalPattern {
  bool outcome = false;
  std::uint64_t evaluated = 0;
  std::uint64_t values = 0;

  bool operator==(const EvalPattern&) const = default;
  auto operator<=>(const EvalPattern&) const = default;
};

/// Unique-cause MC/DC with short-circuit masking: `leaf` is evaluated in
/// both with opposite truth, outcomes differ, and every other condition
/// evaluated in both has equal truth.
bool independence_pair(const EvalPattern& a, const EvalPattern& b, int leaf);

struct FunctionGoal {
  PointId point = 0;
  bool operator==(const FunctionGoal&) const = default;
};

struct StatementGoal {
  PointId point = 0;
  bool operator==(const StatementGoal&) const = default;
};

struct BranchGoal {
  PointId decision = 0;
  bool outcome = false;
  bool operator==(const BranchGoal&) const = default;
};

/// A single decision evaluation with prescribed truth values, e.g.
/// (4,true) -> (2,false) -> (3,true).
struct ConditionGoal {
  PointId decision = 0;
  bool outcome = false;
  std::vector<std::pair<PointId, bool>> conditions;  // evaluation order

  bool operator==(const ConditionGoal&) const = default;
};

/// Independent effect of one condition, demonstrated by any independence
/// pair of evaluations across the suite. `patterns` lists every evaluation
/// that takes part in such a pair; `pairs` indexes into it.
struct McdcGoal {
  PointId decision = 0;
  PointId condition = 0;
  std::vector<ConditionGoal> patterns;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  bool operator==(const McdcGoal&) const = default;
};

/// Instrumentation point path goals.
struct PathGoal {
  enum class Form : std::uint8_t { Simple, Disjunction, Complement };
  Form form = Form::Simple;
  std::vector<PointId> points;
  PointId avoided = 0;  // Complement: must not occur between points[0] and points[1]

  bool operator==(const PathGoal&) const = default;
};

using TestGoal = std::variant<FunctionGoal, StatementGoal, BranchGoal, ConditionGoal, McdcGoal, PathGoal>;

/// Stable textual id: f7, s5, d4:true, c3 (MC/DC), p4:t/2:f/3:t, path...
std::string goal_id(const TestGoal& goal);

/// Parses ids produced by goal_id for point-based goals; MC/DC ids are
/// resolved against the table. Throws std::invalid_argument.
TestGoal parse_goal_id(std::string_view id, const InstrumentedProgram& ip);

std::optional<Criterion> criterion_of(const TestGoal& goal);

/// Goal universe for one criterion, in point order.
std::vector<TestGoal> enumerate_goals(const InstrumentedProgram& ip, Criterion criterion);
std::vector<TestGoal> enumerate_goals(const InstrumentedProgram& ip, std::span<const Criterion> criteria);

/// Every distinct evaluation pattern of a decision's guard, enumerated by
/// brute force over leaf truth assignments under short-circuit evaluation.
std::vector<EvalPattern> enumerate_patterns(const GuardShape& shape);

ConditionGoal to_condition_goal(const PointInfo& decision, const EvalPattern& pattern);
EvalPattern to_pattern(const PointTable& table, const ConditionGoal& goal);

/// Distinct condition goals over all MC/DC goals, in decision order.
std::vector<ConditionGoal> condition_goals(const InstrumentedProgram& ip);

}  // namespace covclose
