#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "covclose/ast.hpp"
#include "covclose/instrument.hpp"

namespace covclose {

/// One value per declared input, in declaration order. Booleans are 0/1.
using InputValuation = std::vector<std::int32_t>;

/// Input sequence for consecutive control-loop steps; length() >= 1.
struct TestVector {
  std::vector<InputValuation> steps;

  std::size_t length() const { return steps.size(); }
  bool operator==(const TestVector&) const = default;
};

struct Event {
  PointId point = 0;
  PointKind kind = PointKind::Statement;
  std::optional<bool> truth;  // present iff Decision or Condition

  bool operator==(const Event&) const = default;
};

struct RuntimeError {
  std::size_t step = 0;
  SourceLoc loc;
  std::string message;

  bool operator==(const RuntimeError&) const = default;
};

struct Trace {
  std::vector<Event> events;
  std::optional<RuntimeError> error;  // nullopt = completed

  bool completed() const { return !error.has_value(); }
  bool operator==(const Trace&) const = default;
};

/// Thrown for vectors that do not fit the program's input declarations.
class VectorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const Program& program, const TestVector& vector);

struct Execution {
  Trace trace;
  /// State variable values after each completed step.
  std::vector<std::vector<std::int32_t>> states;
};

/// Executes any checked program, with or without calls and markers.
Execution execute(const Program& program, const TestVector& vector);

/// Deterministic trace of one test vector.
Trace run(const InstrumentedProgram& ip, const TestVector& vector);

/// `1 (2,t) (4,t) 5 6`, optionally followed by ` !error@step:line:col`.
std::string format_trace(const Trace& trace);

/// Wrapping two's-complement arithmetic shared by interpreter and tests.
namespace wrap {
std::int32_t add(std::int32_t a, std::int32_t b);
std::int32_t sub(std::int32_t a, std::int32_t b);
std::int32_t mul(std::int32_t a, std::int32_t b);
std::int32_t neg(std::int32_t a);
/// b != 0; INT_MIN / -1 wraps to INT_MIN.
std::int32_t div(std::int32_t a, std::int32_t b);
/// b != 0; INT_MIN % -1 is 0.
std::int32_t mod(std::int32_t a, std::int32_t b);
}  // namespace wrap

}  // namespace covclose
