#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "covclose/fql.hpp"
#include "covclose/goals.hpp"
#include "covclose/interpreter.hpp"
#include "covclose/sat.hpp"

namespace covclose::bmc {

/// Per-call solver limits. With `deterministic` the wall-clock limit is
/// ignored so that results depend only on the conflict budget.
struct Limits {
  std::int64_t conflicts = 1'000'000;
  std::chrono::milliseconds time{10'000};
  bool deterministic = false;

  sat::Budget budget() const;
};

enum class Outcome : std::uint8_t {
  Covered,     // a test vector of length k was found
  NoVector,    // proved: no vector of length k matches
  Exhausted,   // budget ran out
};

std::string_view to_string(Outcome outcome);

struct Result {
  Outcome outcome = Outcome::NoVector;
  std::optional<TestVector> vector;
  std::size_t k = 0;
  sat::Stats stats;
  std::size_t variables = 0;
  std::size_t clauses = 0;
};

struct Options {
  std::size_t k = 1;
  Limits limits;
  /// Start from an arbitrary state instead of the declared initial values.
  bool havoc_state = false;
  /// When set, the CNF (with the goal as a unit clause) is written here.
  std::ostream* dimacs = nullptr;
};

/// One unrolled program (k steps) in one solver instance. Queries are
/// encoded on demand; solving under several query literals at once asks
/// for a single vector covering all of them.
class Session {
 public:
  Session(const InstrumentedProgram& ip, std::size_t k, bool havoc_state = false);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Literal that holds iff the unrolled trace matches `query`.
  sat::Lit encode(const fql::Query& query);
  /// Solves under the given query literals.
  Result solve(std::span<const sat::Lit> goals, const Limits& limits);
  void write_dimacs(std::ostream& out, std::span<const sat::Lit> goals) const;
  std::size_t k() const { return k_; }

 private:
  struct State;
  std::unique_ptr<State> state_;
  std::size_t k_;
};

/// Searches for an input vector of exactly `options.k` steps whose trace
/// contains a match of `query`.
Result solve(const InstrumentedProgram& ip, const fql::Query& query, const Options& options);

/// Tries k = 1 .. k_max and returns the first vector found; otherwise the
/// result for k_max (or the first exhausted budget).
Result generate(const InstrumentedProgram& ip, const fql::Query& query, std::size_t k_max, const Limits& limits);

/// Checks a goal with the state left unconstrained over one step. An
/// unsatisfiable check proves that no reachable state can cover the goal.
/// Returns the evidence text on success. Only goals observable within one
/// step are handled (function, statement, branch, condition patterns and
/// MC/DC goals through their patterns); others yield nullopt.
std::optional<std::string> prove_infeasible(const InstrumentedProgram& ip, const TestGoal& goal, const Limits& limits);

}  // namespace covclose::bmc
