#include "covclose/ast.hpp"

#include <algorithm>
#include <stdexcept>

namespace covclose {

std::string_view to_string(Type type) {
  return type == Type::Bool ? "bool" : "int32";
}

std::string_view spelling(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

std::string_view spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

Expr Expr::constant(std::int32_t value, Type type, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Const;
  e.type = type;
  e.value = value;
  e.loc = loc;
  return e;
}

Expr Expr::variable(std::string name, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Var;
  e.name = std::move(name);
  e.loc = loc;
  return e;
}

Expr Expr::unary(UnaryOp op, Expr operand, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Unary;
  e.unary_op = op;
  e.type = op == UnaryOp::Not ? Type::Bool : Type::Int32;
  e.args.push_back(std::move(operand));
  e.loc = loc;
  return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Binary;
  e.binary_op = op;
  e.type = op <= BinaryOp::Mod ? Type::Int32 : Type::Bool;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.loc = loc;
  return e;
}

const Function* Program::find_function(std::string_view name) const {
  auto it = std::find_if(functions.begin(), functions.end(),
                         [&](const Function& f) { return f.name == name; });
  return it == functions.end() ? nullptr : &*it;
}

const Function& Program::entry_function() const {
  const Function* f = find_function(entry);
  if (f == nullptr) throw std::logic_error("program has no entry function '" + entry + "'");
  return *f;
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.type != b.type || a.condition_point != b.condition_point) return false;
  switch (a.kind) {
    case Expr::Kind::Const:
      if (a.value != b.value) return false;
      break;
    case Expr::Kind::Var:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Unary:
      if (a.unary_op != b.unary_op) return false;
      break;
    case Expr::Kind::Binary:
      if (a.binary_op != b.binary_op) return false;
      break;
  }
  return std::equal(a.args.begin(), a.args.end(), b.args.begin(), b.args.end(),
                    [](const Expr& x, const Expr& y) { return same_structure(x, y); });
}

namespace {

bool same_block(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const Stmt& x, const Stmt& y) { return same_structure(x, y); });
}

}  // namespace

bool same_structure(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.name != b.name || a.bound != b.bound ||
      a.statement_point != b.statement_point || a.decision_point != b.decision_point) {
    return false;
  }
  const bool has_expr = a.kind == Stmt::Kind::Assign || a.kind == Stmt::Kind::If ||
                        a.kind == Stmt::Kind::While || a.kind == Stmt::Kind::Assume;
  if (has_expr && !same_structure(a.expr, b.expr)) return false;
  return same_block(a.body, b.body) && same_block(a.else_body, b.else_body);
}

bool same_structure(const Program& a, const Program& b) {
  if (a.entry != b.entry || a.states.size() != b.states.size() ||
      a.inputs.size() != b.inputs.size() || a.functions.size() != b.functions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    const auto& x = a.states[i];
    const auto& y = b.states[i];
    if (x.name != y.name || x.type != y.type || x.init != y.init) return false;
  }
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    const auto& x = a.inputs[i];
    const auto& y = b.inputs[i];
    if (x.name != y.name || x.type != y.type || x.lo != y.lo || x.hi != y.hi) return false;
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    if (a.functions[i].name != b.functions[i].name ||
        !same_block(a.functions[i].body, b.functions[i].body)) {
      return false;
    }
  }
  return true;
}

}  // namespace covclose
