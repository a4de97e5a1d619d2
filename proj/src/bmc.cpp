#include "covclose/bmc.hpp"

#include <ostream>
#include <sstream>

#include "covclose/circuit.hpp"

namespace covclose::bmc {

using sat::Circuit;
using sat::Lit;
using sat::Word;

sat::Budget Limits::budget() const {
  sat::Budget b;
  b.conflicts = conflicts;
  if (!deterministic) b.deadline = std::chrono::steady_clock::now() + time;
  return b;
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Covered: return "covered";
    case Outcome::NoVector: return "no-vector";
    case Outcome::Exhausted: return "exhausted";
  }
  return "?";
}

namespace {

/// One potential trace event of the unrolled program, in trace order.
struct Slot {
  PointId point = 0;
  Lit fire;
  Lit truth;  // Decision and Condition
  bool has_truth = false;
};

class Unroller {
 public:
  Unroller(const InstrumentedProgram& ip, Circuit& c) : ip_(ip), c_(c) {}

  void run(std::size_t k, bool havoc_state) {
    const Program& p = ip_.program;
    env_.resize(p.variable_count());
    for (std::size_t i = 0; i < p.states.size(); ++i) {
      if (!havoc_state) {
        env_[i] = c_.word(p.states[i].init);
      } else if (p.states[i].type == Type::Bool) {
        env_[i] = c_.from_bool(c_.fresh());
      } else {
        env_[i] = c_.fresh_word();
      }
    }
    alive_ = c_.constant(true);
    for (std::size_t step = 0; step < k; ++step) {
      std::vector<Word> step_inputs;
      for (std::size_t i = 0; i < p.inputs.size(); ++i) {
        const InputDecl& decl = p.inputs[i];
        Word w;
        if (decl.type == Type::Bool) {
          w = c_.from_bool(c_.fresh());
        } else {
          w = c_.fresh_word();
          c_.assert_lit(c_.sle(c_.word(decl.lo), w));
          c_.assert_lit(c_.sle(w, c_.word(decl.hi)));
        }
        env_[static_cast<std::size_t>(p.input_slot(i))] = w;
        step_inputs.push_back(w);
      }
      inputs_.push_back(std::move(step_inputs));
      active_ = alive_;
      step_error_ = c_.constant(false);
      if (ip_.function_entry != 0) emit(ip_.function_entry, active_);
      block(p.entry_function().body);
      alive_ = c_.land(alive_, ~step_error_);
    }
  }

  const std::vector<Slot>& slots() const { return slots_; }
  const std::vector<std::vector<Word>>& inputs() const { return inputs_; }

 private:
  void emit(PointId point, Lit fire) { slots_.push_back(Slot{point, fire, c_.constant(false), false}); }
  void emit(PointId point, Lit fire, Lit truth) { slots_.push_back(Slot{point, fire, truth, true}); }

  void fail(Lit condition) {
    const Lit err = c_.land(active_, condition);
    step_error_ = c_.lor(step_error_, err);
    active_ = c_.land(active_, ~err);
  }

  void block(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) statement(s);
  }

  void statement(const Stmt& s) {
    if (s.statement_point != 0) emit(s.statement_point, active_);
    switch (s.kind) {
      case Stmt::Kind::Skip:
        return;
      case Stmt::Kind::Assign: {
        const Word v = eval(s.expr, active_);
        auto& slot = env_[static_cast<std::size_t>(s.slot)];
        slot = c_.mux(active_, v, slot);
        return;
      }
      case Stmt::Kind::Assume: {
        const Lit ok = c_.nonzero(eval(s.expr, active_));
        active_ = c_.land(active_, ok);
        return;
      }
      case Stmt::Kind::Call:
        block(ip_.program.find_function(s.name)->body);
        return;
      case Stmt::Kind::If: {
        const Lit g = decide(s);
        const Lit entry = active_;
        active_ = c_.land(entry, g);
        block(s.body);
        const Lit then_exit = active_;
        active_ = c_.land(entry, ~g);
        block(s.else_body);
        active_ = c_.lor(then_exit, active_);
        return;
      }
      case Stmt::Kind::While: {
        Lit exit = c_.constant(false);
        for (std::uint32_t i = 0;; ++i) {
          const Lit g = decide(s);
          exit = c_.lor(exit, c_.land(active_, ~g));
          if (i == s.bound) {
            fail(g);
            active_ = c_.constant(false);
            break;
          }
          active_ = c_.land(active_, g);
          if (c_.is_false(active_)) break;
          block(s.body);
        }
        active_ = exit;
        return;
      }
    }
  }

  Lit decide(const Stmt& s) {
    const Lit g = guard(s.expr, active_);
    if (s.decision_point != 0) emit(s.decision_point, active_, g);
    return g;
  }

  Lit guard(const Expr& e, Lit reach) {
    if (e.kind == Expr::Kind::Unary && e.unary_op == UnaryOp::Not) return ~guard(e.args[0], reach);
    if (e.kind == Expr::Kind::Binary && e.binary_op == BinaryOp::And) {
      const Lit l = guard(e.args[0], reach);
      const Lit r = guard(e.args[1], c_.land(reach, l));
      return c_.land(l, r);
    }
    if (e.kind == Expr::Kind::Binary && e.binary_op == BinaryOp::Or) {
      const Lit l = guard(e.args[0], reach);
      const Lit r = guard(e.args[1], c_.land(reach, ~l));
      return c_.lor(l, r);
    }
    const Lit value = c_.nonzero(eval(e, reach));
    if (e.condition_point != 0) emit(e.condition_point, c_.land(reach, active_), value);
    return value;
  }

  // `reach`: the expression is evaluated. Errors are conjoined with it.
  Word eval(const Expr& e, Lit reach) {
    switch (e.kind) {
      case Expr::Kind::Const:
        return c_.word(e.value);
      case Expr::Kind::Var:
        return env_[static_cast<std::size_t>(e.slot)];
      case Expr::Kind::Unary: {
        const Word v = eval(e.args[0], reach);
        return e.unary_op == UnaryOp::Neg ? c_.neg(v) : c_.from_bool(~c_.nonzero(v));
      }
      case Expr::Kind::Binary:
        break;
    }
    if (e.binary_op == BinaryOp::And || e.binary_op == BinaryOp::Or) {
      const Lit l = c_.nonzero(eval(e.args[0], reach));
      const bool is_and = e.binary_op == BinaryOp::And;
      const Lit r = c_.nonzero(eval(e.args[1], c_.land(reach, is_and ? l : ~l)));
      return c_.from_bool(is_and ? c_.land(l, r) : c_.lor(l, r));
    }
    const Word a = eval(e.args[0], reach);
    const Word b = eval(e.args[1], reach);
    switch (e.binary_op) {
      case BinaryOp::Add: return c_.add(a, b);
      case BinaryOp::Sub: return c_.sub(a, b);
      case BinaryOp::Mul: return c_.mul(a, b);
      case BinaryOp::Div:
      case BinaryOp::Mod: {
        fail(c_.land(reach, c_.eq(b, c_.word(0))));
        Word q;
        Word r;
        c_.sdivrem(a, b, q, r);
        return e.binary_op == BinaryOp::Div ? q : r;
      }
      case BinaryOp::Lt: return c_.from_bool(c_.slt(a, b));
      case BinaryOp::Le: return c_.from_bool(c_.sle(a, b));
      case BinaryOp::Gt: return c_.from_bool(c_.slt(b, a));
      case BinaryOp::Ge: return c_.from_bool(c_.sle(b, a));
      case BinaryOp::Eq: return c_.from_bool(c_.eq(a, b));
      case BinaryOp::Ne: return c_.from_bool(~c_.eq(a, b));
      default: return c_.word(0);
    }
  }

  const InstrumentedProgram& ip_;
  Circuit& c_;
  std::vector<Word> env_;
  Lit alive_;
  Lit active_;
  Lit step_error_;
  std::vector<Slot> slots_;
  std::vector<std::vector<Word>> inputs_;
};

Lit label(Circuit& c, const fql::Automaton::Edge& edge, const Slot& slot) {
  Lit match = c.constant(edge.atom.point == slot.point);
  if (edge.atom.truth && edge.atom.point == slot.point) {
    match = slot.has_truth ? (*edge.atom.truth ? slot.truth : ~slot.truth) : c.constant(false);
  }
  return edge.negated ? ~match : match;
}

/// Literal that holds iff the fired slots contain a match of the automaton.
Lit encode_match(Circuit& c, const fql::Automaton& a, const std::vector<Slot>& slots) {
  if (a.accepts_empty()) return c.constant(true);
  const auto n = static_cast<std::size_t>(a.state_count());
  std::vector<bool> initial(n, false);
  for (int s : a.initial()) initial[static_cast<std::size_t>(s)] = true;
  std::vector<Lit> state(n, c.constant(false));
  for (std::size_t s = 0; s < n; ++s) {
    if (initial[s]) state[s] = c.constant(true);
  }
  std::vector<Lit> accepts;
  for (const Slot& slot : slots) {
    if (c.is_false(slot.fire)) continue;
    std::vector<Lit> cand(n, c.constant(false));
    for (const auto& edge : a.edges()) {
      const auto from = static_cast<std::size_t>(edge.from);
      const auto to = static_cast<std::size_t>(edge.to);
      if (c.is_false(state[from])) continue;
      cand[to] = c.lor(cand[to], c.land(state[from], label(c, edge, slot)));
    }
    for (std::size_t s = 0; s < n; ++s) {
      if (a.accepting()[s]) accepts.push_back(c.land(slot.fire, cand[s]));
      state[s] = initial[s] ? c.constant(true) : c.mux(slot.fire, cand[s], state[s]);
    }
  }
  return c.or_all(accepts);
}

}  // namespace

struct Session::State {
  sat::Solver solver;
  Circuit circuit{solver};
  std::vector<Slot> slots;
  std::vector<std::vector<Word>> inputs;
};

Session::Session(const InstrumentedProgram& ip, std::size_t k, bool havoc_state)
    : state_(std::make_unique<State>()), k_(k) {
  Unroller u(ip, state_->circuit);
  u.run(k, havoc_state);
  state_->slots = u.slots();
  state_->inputs = u.inputs();
}

Session::~Session() = default;

Lit Session::encode(const fql::Query& query) {
  return encode_match(state_->circuit, fql::Automaton::compile(query), state_->slots);
}

void Session::write_dimacs(std::ostream& out, std::span<const Lit> goals) const {
  // Goals become unit clauses in a copy of the clause list.
  sat::Solver copy = state_->solver;
  for (Lit g : goals) copy.add_clause({g});
  copy.write_dimacs(out);
}

Result Session::solve(std::span<const Lit> goals, const Limits& limits) {
  sat::Solver& solver = state_->solver;
  const sat::Stats before = solver.stats();
  Result result;
  result.k = k_;
  const sat::Result r = solver.solve(goals, limits.budget());
  result.stats = solver.stats();
  result.stats.decisions -= before.decisions;
  result.stats.propagations -= before.propagations;
  result.stats.conflicts -= before.conflicts;
  result.stats.restarts -= before.restarts;
  result.variables = static_cast<std::size_t>(solver.num_vars());
  result.clauses = solver.num_clauses();
  if (r == sat::Result::Sat) {
    result.outcome = Outcome::Covered;
    TestVector v;
    for (const auto& step : state_->inputs) {
      InputValuation values;
      for (const Word& w : step) values.push_back(state_->circuit.value(w));
      v.steps.push_back(std::move(values));
    }
    result.vector = std::move(v);
  } else {
    result.outcome = r == sat::Result::Unsat ? Outcome::NoVector : Outcome::Exhausted;
  }
  return result;
}

Result solve(const InstrumentedProgram& ip, const fql::Query& query, const Options& options) {
  Session session(ip, options.k, options.havoc_state);
  const Lit goal = session.encode(query);
  if (options.dimacs) session.write_dimacs(*options.dimacs, std::span<const Lit>(&goal, 1));
  return session.solve(std::span<const Lit>(&goal, 1), options.limits);
}

Result generate(const InstrumentedProgram& ip, const fql::Query& query, std::size_t k_max, const Limits& limits) {
  Result last;
  for (std::size_t k = 1; k <= k_max; ++k) {
    Options options;
    options.k = k;
    options.limits = limits;
    last = solve(ip, query, options);
    if (last.outcome != Outcome::NoVector) return last;
  }
  return last;
}

namespace {

/// Unsatisfiable in one step from an arbitrary state.
bool havoc_unsat(const InstrumentedProgram& ip, const fql::Query& query, const Limits& limits) {
  Options options;
  options.k = 1;
  options.limits = limits;
  options.havoc_state = true;
  return solve(ip, query, options).outcome == Outcome::NoVector;
}

}  // namespace

std::optional<std::string> prove_infeasible(const InstrumentedProgram& ip, const TestGoal& goal,
                                            const Limits& limits) {
  if (std::holds_alternative<PathGoal>(goal)) return std::nullopt;
  if (const auto* m = std::get_if<McdcGoal>(&goal)) {
    std::ostringstream evidence;
    evidence << "every independence pair has an unreachable half:";
    std::vector<int> unreachable(m->patterns.size(), -1);
    auto check = [&](std::size_t i) {
      if (unreachable[i] < 0) unreachable[i] = havoc_unsat(ip, fql::goal_to_query(m->patterns[i]), limits) ? 1 : 0;
      return unreachable[i] == 1;
    };
    for (auto [i, j] : m->pairs) {
      if (check(i)) {
        evidence << ' ' << goal_id(m->patterns[i]);
      } else if (check(j)) {
        evidence << ' ' << goal_id(m->patterns[j]);
      } else {
        return std::nullopt;
      }
    }
    if (m->pairs.empty()) return std::string("no independence pair exists for this condition");
    return evidence.str();
  }
  if (havoc_unsat(ip, fql::goal_to_query(goal), limits)) {
    return "unsatisfiable in one step from an unconstrained state";
  }
  return std::nullopt;
}

}  // namespace covclose::bmc
