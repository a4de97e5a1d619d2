#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace covclose::sat {

using Var = int;

/// Literal encoded as 2 * var + negated.
struct Lit {
  int x = -2;

  static Lit make(Var v, bool negated = false) { return Lit{2 * v + (negated ? 1 : 0)}; }
  Var var() const { return x >> 1; }
  bool negated() const { return (x & 1) != 0; }
  Lit operator~() const { return Lit{x ^ 1}; }
  bool operator==(const Lit&) const = default;
  auto operator<=>(const Lit&) const = default;
};

enum class Result : std::uint8_t { Sat, Unsat, Unknown };

/// Search limits; unset fields are unlimited.
struct Budget {
  std::optional<std::int64_t> conflicts;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct Stats {
  std::int64_t decisions = 0;
  std::int64_t propagations = 0;
  std::int64_t conflicts = 0;
  std::int64_t restarts = 0;
  std::int64_t learnt_clauses = 0;
  std::int64_t deleted_clauses = 0;
};

/// CDCL solver: two watched literals, VSIDS, phase saving, Luby restarts,
/// learnt clause reduction and solving under assumptions.
class Solver {
 public:
  Solver();

  Var new_var();
  int num_vars() const { return static_cast<int>(assigns_.size()); }

  /// Returns false once the clause set is known to be unsatisfiable.
  bool add_clause(std::span<const Lit> lits);
  bool add_clause(std::initializer_list<Lit> lits) { return add_clause(std::span<const Lit>(lits.begin(), lits.size())); }

  Result solve(std::span<const Lit> assumptions = {}, const Budget& budget = {});

  /// Model of the last Sat answer.
  bool model_value(Var v) const { return model_.at(static_cast<std::size_t>(v)); }
  bool model_value(Lit l) const { return model_value(l.var()) != l.negated(); }

  const Stats& stats() const { return stats_; }
  std::size_t num_clauses() const { return original_.size(); }

  /// Clauses as added, in DIMACS CNF.
  void write_dimacs(std::ostream& out) const;

 private:
  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = 0xffffffffU;

  struct Clause {
    std::vector<Lit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    CRef clause;
    Lit blocker;
  };

  // 1 true, -1 false, 0 unassigned
  std::int8_t value(Lit l) const {
    const std::int8_t v = assigns_[static_cast<std::size_t>(l.var())];
    return l.negated() ? static_cast<std::int8_t>(-v) : v;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, CRef reason);
  CRef propagate();
  void analyze(CRef conflict, std::vector<Lit>& learnt, int& backtrack_level);
  bool redundant(Lit l) const;
  void cancel_until(int level);
  Lit pick_branch();
  void attach(CRef cr);
  CRef alloc(std::vector<Lit> lits, bool learnt);
  void bump_var(Var v);
  void bump_clause(Clause& c);
  void reduce_db();
  Result search(std::int64_t conflict_limit, const Budget& budget, std::span<const Lit> assumptions);
  bool out_of_budget(const Budget& budget, std::int64_t start_conflicts) const;

  // VSIDS heap over unassigned variables
  void heap_insert(Var v);
  Var heap_pop();
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  bool heap_less(Var a, Var b) const { return activity_[static_cast<std::size_t>(a)] > activity_[static_cast<std::size_t>(b)]; }

  bool ok_ = true;
  std::vector<std::vector<Lit>> original_;
  std::vector<Clause> clauses_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;  // by literal index
  std::vector<std::int8_t> assigns_;
  std::vector<bool> polarity_;  // saved phase: true = last assigned false
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::vector<Var> heap_;
  std::vector<int> heap_index_;
  mutable std::vector<char> seen_;
  double max_learnts_ = 0;
  std::vector<bool> model_;
  Stats stats_;
};

}  // namespace covclose::sat
