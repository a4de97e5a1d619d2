#include "covclose/instrument.hpp"

#include <ostream>
#include <stdexcept>

#include "covclose/frontend.hpp"

namespace covclose {

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::FunctionEntry: return "function";
    case PointKind::Statement: return "statement";
    case PointKind::Decision: return "decision";
    case PointKind::Condition: return "condition";
  }
  return "?";
}

bool GuardShape::evaluate(std::uint64_t values, std::uint64_t& evaluated) const {
  auto eval = [&](auto& self, int index) -> bool {
    const Node& n = nodes[static_cast<std::size_t>(index)];
    switch (n.op) {
      case Op::Leaf:
        evaluated |= std::uint64_t{1} << n.leaf;
        return ((values >> n.leaf) & 1U) != 0;
      case Op::Not:
        return !self(self, n.lhs);
      case Op::And:
        return self(self, n.lhs) && self(self, n.rhs);
      case Op::Or:
        return self(self, n.lhs) || self(self, n.rhs);
    }
    return false;
  };
  evaluated = 0;
  return eval(eval, root);
}

PointId PointTable::add(PointInfo info) {
  info.id = static_cast<PointId>(points_.size() + 1);
  points_.push_back(std::move(info));
  return points_.back().id;
}

const PointInfo& PointTable::at(PointId id) const {
  if (!contains(id)) throw std::out_of_range("unknown instrumentation point " + std::to_string(id));
  return points_[id - 1];
}

std::vector<PointId> PointTable::of_kind(PointKind kind) const {
  std::vector<PointId> ids;
  for (const auto& p : points_) {
    if (p.kind == kind) ids.push_back(p.id);
  }
  return ids;
}

void PointTable::write_csv(std::ostream& out, std::string_view file) const {
  out << "id,kind,file,line,col,parent_decision\n";
  for (const auto& p : points_) {
    out << p.id << ',' << to_string(p.kind) << ',' << file << ',' << p.loc.line << ',' << p.loc.col << ',';
    if (p.kind == PointKind::Condition) out << p.parent_decision;
    out << '\n';
  }
}

namespace {

bool is_structural(const Expr& e) {
  if (e.kind == Expr::Kind::Unary) return e.unary_op == UnaryOp::Not;
  if (e.kind == Expr::Kind::Binary) return e.binary_op == BinaryOp::And || e.binary_op == BinaryOp::Or;
  return false;
}

template <class ExprRef, class Fn>
void for_each_leaf(ExprRef& e, Fn&& fn) {
  if (is_structural(e)) {
    for (auto& arg : e.args) for_each_leaf(arg, fn);
  } else {
    fn(e);
  }
}

// Binary expressions carry the operator position; points report where the expression starts.
SourceLoc start_of(const Expr& e) {
  return e.kind == Expr::Kind::Binary ? start_of(e.args[0]) : e.loc;
}

int build_shape(const Expr& e, GuardShape& shape) {
  GuardShape::Node node;
  if (!is_structural(e)) {
    node.op = GuardShape::Op::Leaf;
    node.leaf = shape.leaf_count++;
  } else if (e.kind == Expr::Kind::Unary) {
    node.op = GuardShape::Op::Not;
    node.lhs = build_shape(e.args[0], shape);
  } else {
    node.op = e.binary_op == BinaryOp::And ? GuardShape::Op::And : GuardShape::Op::Or;
    node.lhs = build_shape(e.args[0], shape);
    node.rhs = build_shape(e.args[1], shape);
  }
  shape.nodes.push_back(node);
  return static_cast<int>(shape.nodes.size() - 1);
}

class Numbering {
 public:
  explicit Numbering(PointTable& table) : table_(table) {}

  void block(std::vector<Stmt>& stmts) {
    bool block_start = true;
    for (auto& s : stmts) {
      if (block_start) {
        s.statement_point = table_.add(PointInfo{0, PointKind::Statement, s.loc, 0, -1, {}, {}});
        block_start = false;
      }
      if (s.kind == Stmt::Kind::If || s.kind == Stmt::Kind::While) {
        guard(s);
        block(s.body);
        block(s.else_body);
        block_start = true;
      }
    }
  }

 private:
  void guard(Stmt& s) {
    std::vector<Expr*> leaves;
    for_each_leaf(s.expr, [&](Expr& leaf) { leaves.push_back(&leaf); });
    if (leaves.size() > 63) throw std::length_error("guard has more than 63 conditions");

    PointInfo decision;
    decision.kind = PointKind::Decision;
    decision.loc = start_of(s.expr);
    build_shape(s.expr, decision.shape);
    decision.shape.root = static_cast<int>(decision.shape.nodes.size() - 1);

    // Conditions number before their decision; parent ids are patched after.
    const auto first = static_cast<PointId>(table_.size() + 1);
    const auto decision_id = static_cast<PointId>(first + leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      PointInfo cond;
      cond.kind = PointKind::Condition;
      cond.loc = start_of(*leaves[i]);
      cond.parent_decision = decision_id;
      cond.leaf_index = static_cast<int>(i);
      leaves[i]->condition_point = table_.add(std::move(cond));
      decision.conditions.push_back(leaves[i]->condition_point);
    }
    s.decision_point = table_.add(std::move(decision));
  }

  PointTable& table_;
};

void erase_block(std::vector<Stmt>& stmts) {
  for (auto& s : stmts) {
    s.statement_point = 0;
    s.decision_point = 0;
    for_each_leaf(s.expr, [](Expr& leaf) { leaf.condition_point = 0; });
    erase_block(s.body);
    erase_block(s.else_body);
  }
}

}  // namespace

std::vector<const Expr*> guard_leaves(const Expr& guard) {
  std::vector<const Expr*> leaves;
  for_each_leaf(guard, [&](const Expr& leaf) { leaves.push_back(&leaf); });
  return leaves;
}

InstrumentedProgram instrument(const Program& program) {
  InstrumentedProgram ip;
  ip.program = contains_calls(program) ? inline_calls(program) : program;
  ip.program = erase_markers(ip.program);
  for (auto& f : ip.program.functions) {
    if (f.name != ip.program.entry) continue;
    Numbering numbering(ip.table);
    numbering.block(f.body);
    PointInfo entry;
    entry.kind = PointKind::FunctionEntry;
    entry.loc = f.loc;
    ip.function_entry = ip.table.add(std::move(entry));
  }
  return ip;
}

Program erase_markers(const Program& program) {
  Program out = program;
  for (auto& f : out.functions) erase_block(f.body);
  return out;
}

}  // namespace covclose
