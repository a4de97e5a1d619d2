#include "covclose/interpreter.hpp"

#include <limits>
#include <sstream>

namespace covclose {

namespace wrap {

std::int32_t add(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) + static_cast<std::uint32_t>(b));
}

std::int32_t sub(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) - static_cast<std::uint32_t>(b));
}

std::int32_t mul(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) * static_cast<std::uint32_t>(b));
}

std::int32_t neg(std::int32_t a) { return static_cast<std::int32_t>(0U - static_cast<std::uint32_t>(a)); }

std::int32_t div(std::int32_t a, std::int32_t b) {
  if (a == std::numeric_limits<std::int32_t>::min() && b == -1) return a;
  return a / b;
}

std::int32_t mod(std::int32_t a, std::int32_t b) {
  if (b == -1) return 0;
  return a % b;
}

}  // namespace wrap

void validate(const Program& program, const TestVector& vector) {
  if (vector.steps.empty()) throw VectorError("test vector has no steps");
  for (std::size_t step = 0; step < vector.steps.size(); ++step) {
    const auto& values = vector.steps[step];
    if (values.size() != program.inputs.size()) {
      throw VectorError("step " + std::to_string(step) + " has " + std::to_string(values.size()) +
                        " values, program declares " + std::to_string(program.inputs.size()) + " inputs");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& decl = program.inputs[i];
      if (values[i] < decl.lo || values[i] > decl.hi) {
        throw VectorError("step " + std::to_string(step) + ": value " + std::to_string(values[i]) +
                          " for input '" + decl.name + "' outside [" + std::to_string(decl.lo) + ", " +
                          std::to_string(decl.hi) + "]");
      }
    }
  }
}

namespace {

struct Fault {
  SourceLoc loc;
  std::string message;
};

enum class Flow { Normal, EndStep };

class Machine {
 public:
  Machine(const Program& program, Trace& trace) : program_(program), trace_(trace) {
    vars_.resize(program.variable_count());
    for (std::size_t i = 0; i < program.states.size(); ++i) vars_[i] = program.states[i].init;
  }

  void step(const InputValuation& inputs, PointId function_entry) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      vars_[static_cast<std::size_t>(program_.input_slot(i))] = inputs[i];
    }
    if (function_entry != 0) emit(function_entry, PointKind::FunctionEntry, std::nullopt);
    block(program_.entry_function().body);
  }

  std::vector<std::int32_t> state() const {
    return {vars_.begin(), vars_.begin() + static_cast<std::ptrdiff_t>(program_.states.size())};
  }

 private:
  void emit(PointId id, PointKind kind, std::optional<bool> truth) {
    trace_.events.push_back(Event{id, kind, truth});
  }

  Flow block(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) {
      if (statement(s) == Flow::EndStep) return Flow::EndStep;
    }
    return Flow::Normal;
  }

  Flow statement(const Stmt& s) {
    if (s.statement_point != 0) emit(s.statement_point, PointKind::Statement, std::nullopt);
    switch (s.kind) {
      case Stmt::Kind::Skip:
        return Flow::Normal;
      case Stmt::Kind::Assign:
        vars_[static_cast<std::size_t>(s.slot)] = eval(s.expr);
        return Flow::Normal;
      case Stmt::Kind::Assume:
        return eval(s.expr) != 0 ? Flow::Normal : Flow::EndStep;
      case Stmt::Kind::Call:
        return block(program_.find_function(s.name)->body);
      case Stmt::Kind::If:
        if (decide(s)) return block(s.body);
        return block(s.else_body);
      case Stmt::Kind::While:
        for (std::uint32_t i = 0;; ++i) {
          if (!decide(s)) return Flow::Normal;
          if (i == s.bound) throw Fault{s.loc, "loop bound " + std::to_string(s.bound) + " exceeded"};
          if (block(s.body) == Flow::EndStep) return Flow::EndStep;
        }
    }
    return Flow::Normal;
  }

  bool decide(const Stmt& s) {
    const bool outcome = guard(s.expr);
    if (s.decision_point != 0) emit(s.decision_point, PointKind::Decision, outcome);
    return outcome;
  }

  bool guard(const Expr& e) {
    if (e.kind == Expr::Kind::Unary && e.unary_op == UnaryOp::Not) return !guard(e.args[0]);
    if (e.kind == Expr::Kind::Binary && e.binary_op == BinaryOp::And) return guard(e.args[0]) && guard(e.args[1]);
    if (e.kind == Expr::Kind::Binary && e.binary_op == BinaryOp::Or) return guard(e.args[0]) || guard(e.args[1]);
    const bool value = eval(e) != 0;
    if (e.condition_point != 0) emit(e.condition_point, PointKind::Condition, value);
    return value;
  }

  std::int32_t eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Const:
        return e.value;
      case Expr::Kind::Var:
        return vars_[static_cast<std::size_t>(e.slot)];
      case Expr::Kind::Unary: {
        const std::int32_t v = eval(e.args[0]);
        return e.unary_op == UnaryOp::Neg ? wrap::neg(v) : static_cast<std::int32_t>(v == 0);
      }
      case Expr::Kind::Binary:
        break;
    }
    const std::int32_t a = eval(e.args[0]);
    switch (e.binary_op) {
      case BinaryOp::And:
        return a != 0 && eval(e.args[1]) != 0;
      case BinaryOp::Or:
        return a != 0 || eval(e.args[1]) != 0;
      default:
        break;
    }
    const std::int32_t b = eval(e.args[1]);
    switch (e.binary_op) {
      case BinaryOp::Add: return wrap::add(a, b);
      case BinaryOp::Sub: return wrap::sub(a, b);
      case BinaryOp::Mul: return wrap::mul(a, b);
      case BinaryOp::Div:
        if (b == 0) throw Fault{e.loc, "division by zero"};
        return wrap::div(a, b);
      case BinaryOp::Mod:
        if (b == 0) throw Fault{e.loc, "modulo by zero"};
        return wrap::mod(a, b);
      case BinaryOp::Lt: return a < b;
      case BinaryOp::Le: return a <= b;
      case BinaryOp::Gt: return a > b;
      case BinaryOp::Ge: return a >= b;
      case BinaryOp::Eq: return a == b;
      case BinaryOp::Ne: return a != b;
      default: return 0;
    }
  }

  const Program& program_;
  Trace& trace_;
  std::vector<std::int32_t> vars_;
};

Execution execute_with_entry(const Program& program, const TestVector& vector, PointId function_entry) {
  validate(program, vector);
  Execution result;
  Machine machine(program, result.trace);
  for (std::size_t step = 0; step < vector.steps.size(); ++step) {
    try {
      machine.step(vector.steps[step], function_entry);
    } catch (const Fault& fault) {
      result.trace.error = RuntimeError{step, fault.loc, fault.message};
      break;
    }
    result.states.push_back(machine.state());
  }
  return result;
}

}  // namespace

Execution execute(const Program& program, const TestVector& vector) {
  return execute_with_entry(program, vector, 0);
}

Trace run(const InstrumentedProgram& ip, const TestVector& vector) {
  return execute_with_entry(ip.program, vector, ip.function_entry).trace;
}

std::string format_trace(const Trace& trace) {
  std::ostringstream out;
  bool first = true;
  for (const auto& e : trace.events) {
    if (!first) out << ' ';
    first = false;
    if (e.truth) {
      out << '(' << e.point << ',' << (*e.truth ? 't' : 'f') << ')';
    } else {
      out << e.point;
    }
  }
  if (trace.error) {
    if (!first) out << ' ';
    out << "!error@" << trace.error->step << ':' << trace.error->loc.line << ':' << trace.error->loc.col << ' '
        << trace.error->message;
  }
  return out.str();
}

}  // namespace covclose
