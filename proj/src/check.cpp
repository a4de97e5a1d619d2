#include <map>
#include <optional>
#include <set>

#include "covclose/frontend.hpp"

namespace covclose {

namespace {

struct VarInfo {
  int slot;
  Type type;
  bool is_input;
};

class Checker {
 public:
  explicit Checker(Program& p) : program_(p) {}

  std::vector<Diagnostic> run() {
    declare_variables();
    declare_functions();
    for (auto& f : program_.functions) check_block(f.body);
    check_call_graph();
    return std::move(diagnostics_);
  }

 private:
  void error(SourceLoc loc, std::string message) {
    diagnostics_.push_back(Diagnostic{program_.file, loc, std::move(message)});
  }

  void declare_variables() {
    int slot = 0;
    for (const auto& s : program_.states) {
      if (!vars_.emplace(s.name, VarInfo{slot, s.type, false}).second) {
        error(s.loc, "duplicate declaration of '" + s.name + "'");
      }
      ++slot;
    }
    for (const auto& in : program_.inputs) {
      if (!vars_.emplace(in.name, VarInfo{slot, in.type, true}).second) {
        error(in.loc, "duplicate declaration of '" + in.name + "'");
      }
      if (in.lo > in.hi) error(in.loc, "empty input range for '" + in.name + "'");
      ++slot;
    }
  }

  void declare_functions() {
    std::set<std::string> seen;
    for (const auto& f : program_.functions) {
      if (!seen.insert(f.name).second) error(f.loc, "duplicate declaration of function '" + f.name + "'");
      if (vars_.count(f.name) != 0) error(f.loc, "'" + f.name + "' is already declared as a variable");
      if (f.body.empty()) error(f.loc, "function '" + f.name + "' has an empty body");
    }
    if (program_.entry.empty()) error({1, 1}, "missing entry: no 'step' function declared");
  }

  void check_block(std::vector<Stmt>& stmts) {
    for (auto& s : stmts) check_stmt(s);
  }

  void check_stmt(Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Skip:
        break;
      case Stmt::Kind::Call:
        if (program_.find_function(s.name) == nullptr) error(s.loc, "call to undeclared function '" + s.name + "'");
        break;
      case Stmt::Kind::Assume:
        expect_type(s.expr, Type::Bool, "assume condition");
        break;
      case Stmt::Kind::If:
        expect_type(s.expr, Type::Bool, "if condition");
        check_block(s.body);
        check_block(s.else_body);
        break;
      case Stmt::Kind::While:
        expect_type(s.expr, Type::Bool, "while condition");
        check_block(s.body);
        break;
      case Stmt::Kind::Assign: {
        auto it = vars_.find(s.name);
        std::optional<Type> rhs = type_of(s.expr);
        if (it == vars_.end()) {
          error(s.loc, "assignment to undeclared variable '" + s.name + "'");
          break;
        }
        if (it->second.is_input) {
          error(s.loc, "cannot assign to input '" + s.name + "'");
          break;
        }
        s.slot = it->second.slot;
        if (rhs && *rhs != it->second.type) {
          error(s.expr.loc, "cannot assign " + std::string(to_string(*rhs)) + " value to " +
                                std::string(to_string(it->second.type)) + " variable '" + s.name + "'");
        }
        break;
      }
    }
  }

  void expect_type(Expr& e, Type want, std::string_view what) {
    std::optional<Type> got = type_of(e);
    if (got && *got != want) {
      error(e.loc, std::string(what) + " must be " + std::string(to_string(want)) + ", found " +
                       std::string(to_string(*got)));
    }
  }

  // Returns nullopt when an error has already been reported for `e`.
  std::optional<Type> type_of(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Const:
        return e.type;
      case Expr::Kind::Var: {
        auto it = vars_.find(e.name);
        if (it == vars_.end()) {
          error(e.loc, "use of undeclared variable '" + e.name + "'");
          return std::nullopt;
        }
        e.slot = it->second.slot;
        e.type = it->second.type;
        return e.type;
      }
      case Expr::Kind::Unary: {
        const Type want = e.unary_op == UnaryOp::Not ? Type::Bool : Type::Int32;
        auto operand = type_of(e.args[0]);
        if (operand && *operand != want) {
          error(e.loc, "operator '" + std::string(spelling(e.unary_op)) + "' expects " +
                           std::string(to_string(want)) + " operand");
          return std::nullopt;
        }
        e.type = want;
        return operand ? std::optional<Type>(want) : std::nullopt;
      }
      case Expr::Kind::Binary: {
        auto lhs = type_of(e.args[0]);
        auto rhs = type_of(e.args[1]);
        if (!lhs || !rhs) return std::nullopt;
        const BinaryOp op = e.binary_op;
        const std::string sym(spelling(op));
        if (op == BinaryOp::Eq || op == BinaryOp::Ne) {
          if (*lhs != *rhs) {
            error(e.loc, "operands of '" + sym + "' have different types");
            return std::nullopt;
          }
          e.type = Type::Bool;
        } else if (op == BinaryOp::And || op == BinaryOp::Or) {
          if (*lhs != Type::Bool || *rhs != Type::Bool) {
            error(e.loc, "operands of '" + sym + "' must be bool");
            return std::nullopt;
          }
          e.type = Type::Bool;
        } else {
          if (*lhs != Type::Int32 || *rhs != Type::Int32) {
            error(e.loc, "operands of '" + sym + "' must be int32");
            return std::nullopt;
          }
          e.type = op <= BinaryOp::Mod ? Type::Int32 : Type::Bool;
        }
        return e.type;
      }
    }
    return std::nullopt;
  }

  static void collect_callees(const std::vector<Stmt>& stmts, std::vector<const Stmt*>& out) {
    for (const auto& s : stmts) {
      if (s.kind == Stmt::Kind::Call) out.push_back(&s);
      collect_callees(s.body, out);
      collect_callees(s.else_body, out);
    }
  }

  void check_call_graph() {
    enum class Mark { White, Grey, Black };
    std::map<std::string, Mark> mark;
    for (const auto& f : program_.functions) mark[f.name] = Mark::White;

    std::set<std::string> reported;
    auto visit = [&](auto& self, const Function& f) -> void {
      mark[f.name] = Mark::Grey;
      std::vector<const Stmt*> calls;
      collect_callees(f.body, calls);
      for (const Stmt* call : calls) {
        const Function* callee = program_.find_function(call->name);
        if (callee == nullptr) continue;
        if (mark[callee->name] == Mark::Grey) {
          if (reported.insert(callee->name).second) {
            error(call->loc, "recursion detected: '" + f.name + "' calls '" + callee->name +
                                 "' which is still active");
          }
        } else if (mark[callee->name] == Mark::White) {
          self(self, *callee);
        }
      }
      mark[f.name] = Mark::Black;
    };
    for (const auto& f : program_.functions) {
      if (mark[f.name] == Mark::White) visit(visit, f);
    }
  }

  Program& program_;
  std::map<std::string, VarInfo> vars_;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace

std::vector<Diagnostic> check(Program& program) { return Checker(program).run(); }

}  // namespace covclose
