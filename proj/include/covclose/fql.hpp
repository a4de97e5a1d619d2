#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "covclose/goals.hpp"
#include "covclose/interpreter.hpp"

namespace covclose::fql {

/// `@CALL(IpointN)`, optionally truth-suffixed (`IpointNt` / `IpointNf`).
struct Atom {
  PointId point = 0;
  std::optional<bool> truth;

  bool matches(const Event& e) const {
    return e.point == point && (!truth || e.truth == truth);
  }
  bool operator==(const Atom&) const = default;
};

/// Query AST. `Not` only wraps an atom; `Not` of point 0 matches any event.
struct Query {
  enum class Kind : std::uint8_t { Call, Not, Concat, Seq, Star, Alt };

  Kind kind = Kind::Call;
  Atom atom;                     // Call, Not
  std::vector<Query> children;   // Concat/Seq/Alt: 2, Star: 1

  bool operator==(const Query&) const = default;
};

Query call(PointId point, std::optional<bool> truth = std::nullopt);
Query not_call(PointId point, std::optional<bool> truth = std::nullopt);
Query any_event();
Query concat(Query lhs, Query rhs);
Query seq(Query lhs, Query rhs);
Query star(Query q);
Query alt(Query lhs, Query rhs);

class QueryError : public std::runtime_error {
 public:
  QueryError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Grammar, loosest first: `+` (alternative), `->` (sequence), `.`
/// (concatenation), postfix `*`; atoms are `@CALL(IpointN[t|f])`,
/// `NOT(@CALL(..))`, a parenthesised query or a quoted query `"..."`.
/// Binary operators associate to the right.
Query parse_query(std::string_view text);

/// Text that parse_query maps back to the same AST. Alternatives are always
/// parenthesised, negations are quoted: `"NOT(@CALL(Ipoint5))*"`.
std::string to_string(const Query& q);

/// Epsilon-free NFA over trace events. State sets are closed under the
/// original epsilon moves, so one transition table drives both the
/// matcher and the bounded-model-checking product.
class Automaton {
 public:
  struct Edge {
    int from = 0;
    Atom atom;
    bool negated = false;  // matches any event that `atom` does not
    int to = 0;
  };

  static Automaton compile(const Query& q);

  int state_count() const { return state_count_; }
  const std::vector<int>& initial() const { return initial_; }
  const std::vector<bool>& accepting() const { return accepting_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool accepts_empty() const;

  static bool label_matches(const Edge& edge, const Event& e) {
    return edge.negated ? !edge.atom.matches(e) : edge.atom.matches(e);
  }

  /// True iff some contiguous run of events matches. O(|events| * |edges|).
  bool search(std::span<const Event> events) const;

 private:
  int state_count_ = 0;
  std::vector<int> initial_;
  std::vector<bool> accepting_;
  std::vector<Edge> edges_;
};

bool matches(const Query& q, const Trace& trace);
bool matches(const Query& q, std::span<const Event> events);

/// Query for a goal, following the goal-to-query table: path goals map to
/// `->` chains, alternatives or an avoided point under `"NOT(..)*"`; a
/// branch goal is one truth-suffixed decision atom; a condition goal
/// requires its condition events and decision event inside one
/// evaluation (no other event of that decision in between).
Query goal_to_query(const TestGoal& goal);

/// MC/DC query that completes an independence pair given the patterns
/// already observed for the decision; an unobserved pair needs both
/// halves in one run.
Query mcdc_query(const PointTable& table, const McdcGoal& goal, const std::set<EvalPattern>& observed);

}  // namespace covclose::fql
