#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace covclose {

/// Instrumentation point identifier. Zero means "no marker attached".
using PointId = std::uint32_t;

enum class Type : std::uint8_t { Bool, Int32 };

std::string_view to_string(Type type);

struct SourceLoc {
  std::uint32_t line = 0;
  std::uint32_t col = 0;
  bool operator==(const SourceLoc&) const = default;
};

enum class UnaryOp : std::uint8_t { Neg, Not };

enum class BinaryOp : std::uint8_t {
  Add, Sub, Mul, Div, Mod,
  Lt, Le, Gt, Ge, Eq, Ne,
  And, Or,
};

std::string_view spelling(UnaryOp op);
std::string_view spelling(BinaryOp op);

struct Expr {
  enum class Kind : std::uint8_t { Const, Var, Unary, Binary };

  Kind kind = Kind::Const;
  Type type = Type::Int32;
  std::int32_t value = 0;  // Const payload; booleans are 0/1
  std::string name;        // Var
  int slot = -1;           // Var: index into the variable store, set by the checker
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  std::vector<Expr> args;
  SourceLoc loc;
  PointId condition_point = 0;

  static Expr constant(std::int32_t value, Type type, SourceLoc loc = {});
  static Expr variable(std::string name, SourceLoc loc = {});
  static Expr unary(UnaryOp op, Expr operand, SourceLoc loc = {});
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourceLoc loc = {});
};

struct Stmt {
  enum class Kind : std::uint8_t { Assign, If, While, Call, Assume, Skip };

  Kind kind = Kind::Skip;
  SourceLoc loc;
  std::string name;  // assignment target or callee
  int slot = -1;
  Expr expr;  // rhs, guard or assumption
  std::vector<Stmt> body;  // then-branch or loop body
  std::vector<Stmt> else_body;
  std::uint32_t bound = 0;  // while only

  PointId statement_point = 0;  // emitted before this statement executes
  PointId decision_point = 0;   // if/while guard
};

struct StateDecl {
  std::string name;
  Type type = Type::Int32;
  std::int32_t init = 0;
  SourceLoc loc;
};

struct InputDecl {
  std::string name;
  Type type = Type::Int32;
  std::int32_t lo = 0;
  std::int32_t hi = 0;
  SourceLoc loc;
};

struct Function {
  std::string name;
  std::vector<Stmt> body;
  SourceLoc loc;
};

/// A periodic control task: state persists between steps, inputs are
/// re-sampled every step and `entry` runs once per step.
struct Program {
  std::string file = "<input>";
  std::vector<StateDecl> states;
  std::vector<InputDecl> inputs;
  std::vector<Function> functions;
  std::string entry;

  const Function* find_function(std::string_view name) const;
  const Function& entry_function() const;

  std::size_t variable_count() const { return states.size() + inputs.size(); }
  int input_slot(std::size_t input_index) const {
    return static_cast<int>(states.size() + input_index);
  }
};

/// Structural equality ignoring source locations.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const Stmt& a, const Stmt& b);
bool same_structure(const Program& a, const Program& b);

}  // namespace covclose
