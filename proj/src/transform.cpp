#include <limits>
#include <sstream>

#include "covclose/frontend.hpp"

namespace covclose {

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return e.value < 0 ? 6 : 7;
    case Expr::Kind::Var:
      return 7;
    case Expr::Kind::Unary:
      return 6;
    case Expr::Kind::Binary:
      switch (e.binary_op) {
        case BinaryOp::Or: return 0;
        case BinaryOp::And: return 1;
        case BinaryOp::Eq: case BinaryOp::Ne: return 2;
        case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge: return 3;
        case BinaryOp::Add: case BinaryOp::Sub: return 4;
        default: return 5;
      }
  }
  return 7;
}

void print_expr(std::ostream& out, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
      if (e.type == Type::Bool) {
        out << (e.value != 0 ? "true" : "false");
      } else {
        out << e.value;
      }
      return;
    case Expr::Kind::Var:
      out << e.name;
      return;
    case Expr::Kind::Unary: {
      const Expr& operand = e.args[0];
      out << spelling(e.unary_op);
      // `-5` would re-parse as a folded literal, so keep the operator explicit.
      const bool parens = precedence(operand) < 6 ||
                          (e.unary_op == UnaryOp::Neg && operand.kind == Expr::Kind::Const);
      if (parens) out << '(';
      print_expr(out, operand);
      if (parens) out << ')';
      return;
    }
    case Expr::Kind::Binary: {
      const int prec = precedence(e);
      const bool lparen = precedence(e.args[0]) < prec;
      const bool rparen = precedence(e.args[1]) <= prec;
      if (lparen) out << '(';
      print_expr(out, e.args[0]);
      if (lparen) out << ')';
      out << ' ' << spelling(e.binary_op) << ' ';
      if (rparen) out << '(';
      print_expr(out, e.args[1]);
      if (rparen) out << ')';
      return;
    }
  }
}

void print_block(std::ostream& out, const std::vector<Stmt>& stmts, int depth);

void print_stmt(std::ostream& out, const Stmt& s, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  out << indent;
  switch (s.kind) {
    case Stmt::Kind::Skip:
      out << "skip;\n";
      break;
    case Stmt::Kind::Call:
      out << "call " << s.name << ";\n";
      break;
    case Stmt::Kind::Assume:
      out << "assume(";
      print_expr(out, s.expr);
      out << ");\n";
      break;
    case Stmt::Kind::Assign:
      out << s.name << " = ";
      print_expr(out, s.expr);
      out << ";\n";
      break;
    case Stmt::Kind::If:
      out << "if (";
      print_expr(out, s.expr);
      out << ") {\n";
      print_block(out, s.body, depth + 1);
      out << indent << '}';
      if (!s.else_body.empty()) {
        out << " else {\n";
        print_block(out, s.else_body, depth + 1);
        out << indent << '}';
      }
      out << '\n';
      break;
    case Stmt::Kind::While:
      out << "while (";
      print_expr(out, s.expr);
      out << ") bound " << s.bound << " {\n";
      print_block(out, s.body, depth + 1);
      out << indent << "}\n";
      break;
  }
}

void print_block(std::ostream& out, const std::vector<Stmt>& stmts, int depth) {
  for (const auto& s : stmts) print_stmt(out, s, depth);
}

bool block_has_calls(const std::vector<Stmt>& stmts) {
  for (const auto& s : stmts) {
    if (s.kind == Stmt::Kind::Call || block_has_calls(s.body) || block_has_calls(s.else_body)) return true;
  }
  return false;
}

std::vector<Stmt> inline_block(const Program& p, const std::vector<Stmt>& stmts) {
  std::vector<Stmt> out;
  out.reserve(stmts.size());
  for (const auto& s : stmts) {
    if (s.kind == Stmt::Kind::Call) {
      for (auto& inner : inline_block(p, p.find_function(s.name)->body)) out.push_back(std::move(inner));
      continue;
    }
    Stmt copy = s;
    copy.body = inline_block(p, s.body);
    copy.else_body = inline_block(p, s.else_body);
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace

std::string pretty_print(const Expr& expr) {
  std::ostringstream out;
  print_expr(out, expr);
  return out.str();
}

std::string pretty_print(const Program& program) {
  std::ostringstream out;
  for (const auto& s : program.states) {
    out << "state " << to_string(s.type) << ' ' << s.name << " = ";
    if (s.type == Type::Bool) {
      out << (s.init != 0 ? "true" : "false");
    } else {
      out << s.init;
    }
    out << ";\n";
  }
  for (const auto& in : program.inputs) {
    out << "input " << to_string(in.type) << ' ' << in.name;
    const bool full_range = in.lo == std::numeric_limits<std::int32_t>::min() &&
                            in.hi == std::numeric_limits<std::int32_t>::max();
    if (in.type == Type::Int32 && !full_range) out << " in [" << in.lo << ", " << in.hi << ']';
    out << ";\n";
  }
  for (const auto& f : program.functions) {
    out << '\n' << (f.name == program.entry ? "step " : "func ") << f.name << " {\n";
    print_block(out, f.body, 1);
    out << "}\n";
  }
  return out.str();
}

bool contains_calls(const Program& program) {
  for (const auto& f : program.functions) {
    if (block_has_calls(f.body)) return true;
  }
  return false;
}

Program inline_calls(const Program& program) {
  Program out = program;
  for (auto& f : out.functions) f.body = inline_block(program, f.body);
  return out;
}

}  // namespace covclose
