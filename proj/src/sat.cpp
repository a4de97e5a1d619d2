#include "covclose/sat.hpp"

#include <algorithm>
#include <ostream>

namespace covclose::sat {

namespace {

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr int kRestartBase = 100;

double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

std::size_t index(Lit l) { return static_cast<std::size_t>(l.x); }
std::size_t index(Var v) { return static_cast<std::size_t>(v); }

}  // namespace

Solver::Solver() = default;

Var Solver::new_var() {
  const Var v = num_vars();
  assigns_.push_back(0);
  polarity_.push_back(true);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  activity_.push_back(0);
  heap_index_.push_back(-1);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

bool Solver::add_clause(std::span<const Lit> input) {
  original_.emplace_back(input.begin(), input.end());
  if (!ok_) return false;
  cancel_until(0);
  std::vector<Lit> lits(input.begin(), input.end());
  std::sort(lits.begin(), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    const Lit l = lits[i];
    if (value(l) == 1 || (i + 1 < lits.size() && lits[i + 1] == ~l)) return true;  // satisfied or tautology
    if (value(l) == -1 || (!kept.empty() && kept.back() == l)) continue;
    kept.push_back(l);
  }
  if (kept.empty()) return ok_ = false;
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    return ok_ = (propagate() == kNoReason);
  }
  attach(alloc(std::move(kept), false));
  return true;
}

Solver::CRef Solver::alloc(std::vector<Lit> lits, bool learnt) {
  Clause c;
  c.lits = std::move(lits);
  c.learnt = learnt;
  clauses_.push_back(std::move(c));
  return static_cast<CRef>(clauses_.size() - 1);
}

void Solver::attach(CRef cr) {
  const Clause& c = clauses_[cr];
  watches_[index(~c.lits[0])].push_back(Watcher{cr, c.lits[1]});
  watches_[index(~c.lits[1])].push_back(Watcher{cr, c.lits[0]});
}

void Solver::enqueue(Lit l, CRef reason) {
  assigns_[index(l.var())] = l.negated() ? -1 : 1;
  level_[index(l.var())] = decision_level();
  reason_[index(l.var())] = reason;
  trail_.push_back(l);
}

Solver::CRef Solver::propagate() {
  CRef conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];  // p became true; visit clauses watching ~p
    ++stats_.propagations;
    auto& ws = watches_[index(p)];
    std::size_t i = 0;
    std::size_t j = 0;
    const Lit false_lit = ~p;
    while (i < ws.size()) {
      const Watcher w = ws[i];
      if (value(w.blocker) == 1) {
        ws[j++] = ws[i++];
        continue;
      }
      Clause& c = clauses_[w.clause];
      if (c.deleted) {
        ++i;
        continue;
      }
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      ++i;
      const Lit first = c.lits[0];
      if (first != w.blocker && value(first) == 1) {
        ws[j++] = Watcher{w.clause, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != -1) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[index(~c.lits[1])].push_back(Watcher{w.clause, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = Watcher{w.clause, first};
      if (value(first) == -1) {
        conflict = w.clause;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.clause);
      }
    }
    ws.resize(j);
    if (conflict != kNoReason) break;
  }
  return conflict;
}

bool Solver::redundant(Lit l) const {
  const CRef r = reason_[index(l.var())];
  if (r == kNoReason) return false;
  for (const Lit q : clauses_[r].lits) {
    if (q.var() == l.var()) continue;
    if (!seen_[index(q.var())] && level_[index(q.var())] > 0) return false;
  }
  return true;
}

void Solver::analyze(CRef conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.clear();
  learnt.push_back(Lit{});  // asserting literal goes here
  int pending = 0;
  Lit p{};
  bool have_p = false;
  std::size_t idx = trail_.size();
  CRef cr = conflict;
  do {
    Clause& c = clauses_[cr];
    if (c.learnt) bump_clause(c);
    for (const Lit q : c.lits) {
      if (have_p && q == p) continue;
      const Var v = q.var();
      if (!seen_[index(v)] && level_[index(v)] > 0) {
        seen_[index(v)] = 1;
        bump_var(v);
        if (level_[index(v)] >= decision_level()) {
          ++pending;
        } else {
          learnt.push_back(q);
        }
      }
    }
    while (!seen_[index(trail_[--idx].var())]) {
    }
    p = trail_[idx];
    have_p = true;
    cr = reason_[index(p.var())];
    seen_[index(p.var())] = 0;
    --pending;
  } while (pending > 0);
  learnt[0] = ~p;

  // Local minimisation: drop literals implied by others in the clause.
  std::vector<Lit> all(learnt.begin(), learnt.end());
  std::size_t keep = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    if (!redundant(learnt[i])) learnt[keep++] = learnt[i];
  }
  learnt.resize(keep);
  for (const Lit l : all) seen_[index(l.var())] = 0;

  backtrack_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i) {
      if (level_[index(learnt[i].var())] > level_[index(learnt[max_i].var())]) max_i = i;
    }
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = level_[index(learnt[1].var())];
  }
}

void Solver::cancel_until(int level) {
  if (decision_level() <= level) return;
  const std::size_t stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
  for (std::size_t i = trail_.size(); i-- > stop;) {
    const Var v = trail_[i].var();
    assigns_[index(v)] = 0;
    reason_[index(v)] = kNoReason;
    polarity_[index(v)] = trail_[i].negated();
    heap_insert(v);
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    const Var v = heap_pop();
    if (assigns_[index(v)] == 0) return Lit::make(v, polarity_[index(v)]);
  }
  return Lit{};
}

void Solver::bump_var(Var v) {
  double& a = activity_[index(v)];
  a += var_inc_;
  if (a > 1e100) {
    for (double& x : activity_) x *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_index_[index(v)] >= 0) heap_up(static_cast<std::size_t>(heap_index_[index(v)]));
}

void Solver::bump_clause(Clause& c) {
  c.activity += clause_inc_;
  if (c.activity > 1e20) {
    for (CRef cr : learnts_) clauses_[cr].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

void Solver::reduce_db() {
  std::sort(learnts_.begin(), learnts_.end(), [&](CRef a, CRef b) {
    const Clause& x = clauses_[a];
    const Clause& y = clauses_[b];
    if ((x.lits.size() > 2) != (y.lits.size() > 2)) return x.lits.size() > 2;
    return x.activity < y.activity;
  });
  auto locked = [&](CRef cr) {
    const Clause& c = clauses_[cr];
    const Var v = c.lits[0].var();
    return value(c.lits[0]) == 1 && reason_[index(v)] == cr;
  };
  std::vector<CRef> kept;
  const std::size_t half = learnts_.size() / 2;
  for (std::size_t i = 0; i < learnts_.size(); ++i) {
    Clause& c = clauses_[learnts_[i]];
    if (i < half && c.lits.size() > 2 && !locked(learnts_[i])) {
      c.deleted = true;
      c.lits.shrink_to_fit();
      ++stats_.deleted_clauses;
    } else {
      kept.push_back(learnts_[i]);
    }
  }
  learnts_ = std::move(kept);
  // Purge watchers of deleted clauses.
  for (auto& ws : watches_) {
    std::erase_if(ws, [&](const Watcher& w) { return clauses_[w.clause].deleted; });
  }
}

bool Solver::out_of_budget(const Budget& budget, std::int64_t start_conflicts) const {
  if (budget.conflicts && stats_.conflicts - start_conflicts >= *budget.conflicts) return true;
  return budget.deadline && std::chrono::steady_clock::now() >= *budget.deadline;
}

Result Solver::search(std::int64_t conflict_limit, const Budget& budget, std::span<const Lit> assumptions) {
  std::int64_t conflicts_here = 0;
  std::vector<Lit> learnt;
  for (;;) {
    const CRef conflict = propagate();
    if (conflict != kNoReason) {
      ++stats_.conflicts;
      ++conflicts_here;
      if (decision_level() == 0) {
        ok_ = false;  // independent of the assumptions
        return Result::Unsat;
      }
      int backtrack_level = 0;
      analyze(conflict, learnt, backtrack_level);
      cancel_until(backtrack_level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        const CRef cr = alloc(learnt, true);
        learnts_.push_back(cr);
        attach(cr);
        bump_clause(clauses_[cr]);
        enqueue(learnt[0], cr);
        ++stats_.learnt_clauses;
      }
      var_inc_ /= kVarDecay;
      clause_inc_ /= kClauseDecay;
      continue;
    }
    if (conflicts_here >= conflict_limit ||
        (budget.deadline && (conflicts_here & 255) == 255 && std::chrono::steady_clock::now() >= *budget.deadline)) {
      cancel_until(0);
      return Result::Unknown;
    }
    if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_) reduce_db();

    Lit next{};
    while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
      const Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      if (value(a) == 1) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));  // dummy level
      } else if (value(a) == -1) {
        return Result::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next.x < 0) {
      ++stats_.decisions;
      next = pick_branch();
      if (next.x < 0) return Result::Sat;
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, kNoReason);
  }
}

Result Solver::solve(std::span<const Lit> assumptions, const Budget& budget) {
  model_.clear();
  if (!ok_) return Result::Unsat;
  cancel_until(0);
  max_learnts_ = std::max(1000.0, static_cast<double>(original_.size()) / 3.0);
  const std::int64_t start_conflicts = stats_.conflicts;
  Result result = Result::Unknown;
  for (int round = 0;; ++round) {
    const double limit = luby(2, round) * kRestartBase;
    std::int64_t allowed = static_cast<std::int64_t>(limit);
    if (budget.conflicts) {
      allowed = std::min(allowed, *budget.conflicts - (stats_.conflicts - start_conflicts));
      if (allowed <= 0) break;
    }
    result = search(allowed, budget, assumptions);
    if (result != Result::Unknown) break;
    ++stats_.restarts;
    max_learnts_ *= 1.1;
    if (out_of_budget(budget, start_conflicts)) break;
  }
  if (result == Result::Sat) {
    model_.resize(assigns_.size());
    for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = assigns_[v] == 1;
  }
  cancel_until(0);
  return result;
}

void Solver::heap_insert(Var v) {
  if (heap_index_[index(v)] >= 0) return;
  heap_index_[index(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

Var Solver::heap_pop() {
  const Var top = heap_.front();
  heap_index_[index(top)] = -1;
  const Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_index_[index(last)] = 0;
    heap_down(0);
  }
  return top;
}

void Solver::heap_up(std::size_t i) {
  const Var v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_index_[index(heap_[i])] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_index_[index(v)] = static_cast<int>(i);
}

void Solver::heap_down(std::size_t i) {
  const Var v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_index_[index(heap_[i])] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_index_[index(v)] = static_cast<int>(i);
}

void Solver::write_dimacs(std::ostream& out) const {
  out << "p cnf " << num_vars() << ' ' << original_.size() << '\n';
  for (const auto& clause : original_) {
    for (const Lit l : clause) out << (l.negated() ? -(l.var() + 1) : l.var() + 1) << ' ';
    out << "0\n";
  }
}

}  // namespace covclose::sat
