#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string_view>
#include <vector>

#include "covclose/ast.hpp"

namespace covclose {

enum class PointKind : std::uint8_t { FunctionEntry, Statement, Decision, Condition };

std::string_view to_string(PointKind kind);

/// Short-circuit structure of a guard: `&&`, `||`, `!` over atomic leaves.
/// Leaves are numbered left to right; leaf i is the guard's i-th condition.
struct GuardShape {
  enum class Op : std::uint8_t { Leaf, Not, And, Or };
  struct Node {
    Op op = Op::Leaf;
    int lhs = -1;
    int rhs = -1;
    int leaf = -1;
  };

  std::vector<Node> nodes;
  int root = -1;
  int leaf_count = 0;

  /// Evaluates with short-circuiting. Bit i of `values` is leaf i's value;
  /// bits of leaves actually evaluated are set in `evaluated`.
  bool evaluate(std::uint64_t values, std::uint64_t& evaluated) const;
};

struct PointInfo {
  PointId id = 0;
  PointKind kind = PointKind::Statement;
  SourceLoc loc;
  PointId parent_decision = 0;       // Condition
  int leaf_index = -1;               // Condition
  std::vector<PointId> conditions;   // Decision, leaf order
  GuardShape shape;                  // Decision
};

class PointTable {
 public:
  PointId add(PointInfo info);

  const PointInfo& at(PointId id) const;
  bool contains(PointId id) const { return id >= 1 && id <= points_.size(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<PointInfo>& points() const { return points_; }

  std::vector<PointId> of_kind(PointKind kind) const;

  /// One record per point: id,kind,file,line,col,parent_decision
  void write_csv(std::ostream& out, std::string_view file) const;

 private:
  std::vector<PointInfo> points_;  // index = id - 1
};

struct InstrumentedProgram {
  Program program;  // inlined, markers attached
  PointTable table;
  PointId function_entry = 0;
};

/// Attaches markers in a deterministic walk over the entry body: a
/// Statement point on the first statement of every basic block, condition
/// points on guard leaves, then the guard's Decision point. The
/// FunctionEntry point takes the id after the last body point so that body
/// numbering starts at 1. Calls are inlined first if present.
InstrumentedProgram instrument(const Program& program);

/// Removes every marker.
Program erase_markers(const Program& program);

/// The guard's leaves in left-to-right order (expressions that are not
/// `&&`, `||` or `!`).
std::vector<const Expr*> guard_leaves(const Expr& guard);

}  // namespace covclose
