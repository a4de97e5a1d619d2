#include "covclose/fql.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace covclose::fql {

Query call(PointId point, std::optional<bool> truth) {
  Query q;
  q.kind = Query::Kind::Call;
  q.atom = Atom{point, truth};
  return q;
}

Query not_call(PointId point, std::optional<bool> truth) {
  Query q;
  q.kind = Query::Kind::Not;
  q.atom = Atom{point, truth};
  return q;
}

Query any_event() { return not_call(0); }

namespace {

Query binary(Query::Kind kind, Query lhs, Query rhs) {
  Query q;
  q.kind = kind;
  q.children.push_back(std::move(lhs));
  q.children.push_back(std::move(rhs));
  return q;
}

}  // namespace

Query concat(Query lhs, Query rhs) { return binary(Query::Kind::Concat, std::move(lhs), std::move(rhs)); }
Query seq(Query lhs, Query rhs) { return binary(Query::Kind::Seq, std::move(lhs), std::move(rhs)); }
Query alt(Query lhs, Query rhs) { return binary(Query::Kind::Alt, std::move(lhs), std::move(rhs)); }

Query star(Query q) {
  Query s;
  s.kind = Query::Kind::Star;
  s.children.push_back(std::move(q));
  return s;
}

QueryError::QueryError(std::size_t position, const std::string& message)
    : std::runtime_error("query position " + std::to_string(position) + ": " + message), position_(position) {}

namespace {

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  Query parse() {
    Query q = alternative();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw QueryError(pos_, message); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  Query alternative() {
    Query lhs = sequence();
    if (accept("+")) return alt(std::move(lhs), alternative());
    return lhs;
  }

  Query sequence() {
    Query lhs = concatenation();
    if (accept("->")) return seq(std::move(lhs), sequence());
    return lhs;
  }

  Query concatenation() {
    Query lhs = postfix();
    if (accept(".")) return concat(std::move(lhs), concatenation());
    return lhs;
  }

  Query postfix() {
    Query q = atom();
    while (accept("*")) q = star(std::move(q));
    return q;
  }

  Query atom() {
    skip_space();
    if (accept("(")) {
      Query q = alternative();
      expect(")");
      return q;
    }
    if (accept("\"")) {
      Query q = alternative();
      expect("\"");
      return q;
    }
    if (accept("NOT")) {
      expect("(");
      Atom a = call_atom();
      expect(")");
      return not_call(a.point, a.truth);
    }
    Atom a = call_atom();
    return call(a.point, a.truth);
  }

  Atom call_atom() {
    expect("@CALL");
    expect("(");
    expect("Ipoint");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a point number after 'Ipoint'");
    Atom a;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, a.point);
    if (ec != std::errc()) fail("point number out of range");
    if (pos_ < text_.size() && (text_[pos_] == 't' || text_[pos_] == 'f')) {
      a.truth = text_[pos_] == 't';
      ++pos_;
    }
    expect(")");
    return a;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string atom_text(const Atom& a) {
  std::string s = "@CALL(Ipoint" + std::to_string(a.point);
  if (a.truth) s += *a.truth ? 't' : 'f';
  return s + ')';
}

int precedence(const Query& q) {
  switch (q.kind) {
    case Query::Kind::Alt: return 0;
    case Query::Kind::Seq: return 1;
    case Query::Kind::Concat: return 2;
    case Query::Kind::Star: return 3;
    default: return 4;
  }
}

void print(std::string& out, const Query& q);

void print_operand(std::string& out, const Query& q, bool parens) {
  if (parens) out += '(';
  print(out, q);
  if (parens) out += ')';
}

void print(std::string& out, const Query& q) {
  switch (q.kind) {
    case Query::Kind::Call:
      out += atom_text(q.atom);
      return;
    case Query::Kind::Not:
      out += "\"NOT(" + atom_text(q.atom) + ")\"";
      return;
    case Query::Kind::Star: {
      const Query& inner = q.children[0];
      if (inner.kind == Query::Kind::Not) {
        out += "\"NOT(" + atom_text(inner.atom) + ")*\"";
        return;
      }
      // Alternatives carry their own parentheses.
      print_operand(out, inner, precedence(inner) < 3 && inner.kind != Query::Kind::Alt);
      out += '*';
      return;
    }
    case Query::Kind::Concat:
      print_operand(out, q.children[0], precedence(q.children[0]) <= 2 && q.children[0].kind != Query::Kind::Alt);
      out += '.';
      print_operand(out, q.children[1], precedence(q.children[1]) < 2 && q.children[1].kind != Query::Kind::Alt);
      return;
    case Query::Kind::Seq:
      print_operand(out, q.children[0], q.children[0].kind == Query::Kind::Seq);
      out += " -> ";
      print(out, q.children[1]);
      return;
    case Query::Kind::Alt: {
      out += '(';
      const Query* node = &q;
      while (node->kind == Query::Kind::Alt) {
        print(out, node->children[0]);
        out += " + ";
        node = &node->children[1];
      }
      print(out, *node);
      out += ')';
      return;
    }
  }
}

// Thompson construction with explicit epsilon edges.
struct Builder {
  struct Labeled {
    int from;
    Atom atom;
    bool negated;
    int to;
  };
  int states = 0;
  std::vector<std::pair<int, int>> epsilon;
  std::vector<Labeled> labeled;

  int fresh() { return states++; }

  std::pair<int, int> build(const Query& q) {
    const int s = fresh();
    const int e = fresh();
    switch (q.kind) {
      case Query::Kind::Call:
      case Query::Kind::Not:
        labeled.push_back({s, q.atom, q.kind == Query::Kind::Not, e});
        break;
      case Query::Kind::Concat: {
        auto [a0, a1] = build(q.children[0]);
        auto [b0, b1] = build(q.children[1]);
        epsilon.insert(epsilon.end(), {{s, a0}, {a1, b0}, {b1, e}});
        break;
      }
      case Query::Kind::Seq: {
        // q1 . (any)* . q2
        auto [a0, a1] = build(q.children[0]);
        const int gap = fresh();
        auto [b0, b1] = build(q.children[1]);
        labeled.push_back({gap, Atom{0, std::nullopt}, true, gap});
        epsilon.insert(epsilon.end(), {{s, a0}, {a1, gap}, {gap, b0}, {b1, e}});
        break;
      }
      case Query::Kind::Star: {
        auto [a0, a1] = build(q.children[0]);
        epsilon.insert(epsilon.end(), {{s, a0}, {s, e}, {a1, a0}, {a1, e}});
        break;
      }
      case Query::Kind::Alt: {
        auto [a0, a1] = build(q.children[0]);
        auto [b0, b1] = build(q.children[1]);
        epsilon.insert(epsilon.end(), {{s, a0}, {s, b0}, {a1, e}, {b1, e}});
        break;
      }
    }
    return {s, e};
  }
};

}  // namespace

Query parse_query(std::string_view text) { return QueryParser(text).parse(); }

std::string to_string(const Query& q) {
  std::string out;
  print(out, q);
  return out;
}

Automaton Automaton::compile(const Query& q) {
  Builder b;
  auto [start, final_state] = b.build(q);

  std::vector<std::vector<int>> eps_out(static_cast<std::size_t>(b.states));
  for (auto [from, to] : b.epsilon) eps_out[static_cast<std::size_t>(from)].push_back(to);
  std::vector<std::vector<int>> closure(static_cast<std::size_t>(b.states));
  for (int s = 0; s < b.states; ++s) {
    std::vector<char> seen(static_cast<std::size_t>(b.states), 0);
    std::vector<int> stack{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      closure[static_cast<std::size_t>(s)].push_back(x);
      for (int y : eps_out[static_cast<std::size_t>(x)]) {
        if (!seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = 1;
          stack.push_back(y);
        }
      }
    }
    std::sort(closure[static_cast<std::size_t>(s)].begin(), closure[static_cast<std::size_t>(s)].end());
  }

  Automaton a;
  a.state_count_ = b.states;
  a.initial_ = closure[static_cast<std::size_t>(start)];
  a.accepting_.assign(static_cast<std::size_t>(b.states), false);
  a.accepting_[static_cast<std::size_t>(final_state)] = true;
  for (const auto& edge : b.labeled) {
    for (int target : closure[static_cast<std::size_t>(edge.to)]) {
      a.edges_.push_back(Edge{edge.from, edge.atom, edge.negated, target});
    }
  }
  return a;
}

bool Automaton::accepts_empty() const {
  return std::any_of(initial_.begin(), initial_.end(), [&](int s) { return accepting_[static_cast<std::size_t>(s)]; });
}

bool Automaton::search(std::span<const Event> events) const {
  if (accepts_empty()) return true;
  const auto n = static_cast<std::size_t>(state_count_);
  std::vector<char> active(n, 0);
  std::vector<char> next(n, 0);
  for (int s : initial_) active[static_cast<std::size_t>(s)] = 1;
  for (const Event& e : events) {
    std::fill(next.begin(), next.end(), 0);
    for (const Edge& edge : edges_) {
      if (active[static_cast<std::size_t>(edge.from)] && label_matches(edge, e)) {
        next[static_cast<std::size_t>(edge.to)] = 1;
        if (accepting_[static_cast<std::size_t>(edge.to)]) return true;
      }
    }
    for (int s : initial_) next[static_cast<std::size_t>(s)] = 1;
    active.swap(next);
  }
  return false;
}

bool matches(const Query& q, std::span<const Event> events) { return Automaton::compile(q).search(events); }

bool matches(const Query& q, const Trace& trace) { return matches(q, std::span<const Event>(trace.events)); }

namespace {

Query condition_query(const ConditionGoal& g) {
  Query chain = call(g.decision, g.outcome);
  for (auto it = g.conditions.rbegin(); it != g.conditions.rend(); ++it) {
    chain = concat(call(it->first, it->second), concat(star(not_call(g.decision)), std::move(chain)));
  }
  return chain;
}

template <class Combine>
Query fold_right(const std::vector<Query>& parts, Combine combine) {
  Query acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) acc = combine(*it, std::move(acc));
  return acc;
}

Query path_query(const PathGoal& g) {
  if (g.points.empty()) throw std::invalid_argument("path goal without points");
  std::vector<Query> calls;
  for (PointId p : g.points) calls.push_back(call(p));
  switch (g.form) {
    case PathGoal::Form::Simple:
      return fold_right(calls, [](Query a, Query b) { return seq(std::move(a), std::move(b)); });
    case PathGoal::Form::Disjunction:
      return fold_right(calls, [](Query a, Query b) { return alt(std::move(a), std::move(b)); });
    case PathGoal::Form::Complement: {
      if (calls.size() < 2) throw std::invalid_argument("complement path goal needs two anchor points");
      Query head = concat(calls[0], concat(star(not_call(g.avoided)), calls[1]));
      if (calls.size() == 2) return head;
      std::vector<Query> rest(calls.begin() + 2, calls.end());
      return seq(std::move(head), fold_right(rest, [](Query a, Query b) { return seq(std::move(a), std::move(b)); }));
    }
  }
  return calls.front();
}

}  // namespace

Query mcdc_query(const PointTable& table, const McdcGoal& goal, const std::set<EvalPattern>& observed) {
  std::vector<Query> options;
  auto add = [&](Query q) {
    if (std::find(options.begin(), options.end(), q) == options.end()) options.push_back(std::move(q));
  };
  for (auto [i, j] : goal.pairs) {
    const auto& pi = goal.patterns[i];
    const auto& pj = goal.patterns[j];
    const bool seen_i = observed.count(to_pattern(table, pi)) != 0;
    const bool seen_j = observed.count(to_pattern(table, pj)) != 0;
    if (seen_i && !seen_j) {
      add(condition_query(pj));
    } else if (seen_j && !seen_i) {
      add(condition_query(pi));
    } else if (!seen_i && !seen_j) {
      add(alt(seq(condition_query(pi), condition_query(pj)), seq(condition_query(pj), condition_query(pi))));
    } else {
      add(condition_query(pi));
    }
  }
  if (options.empty()) {
    // A condition with no independence pair can never be shown; the query
    // is unsatisfiable: it needs the decision to be both evaluated and not.
    return concat(call(goal.decision, true), call(goal.decision, false));
  }
  return fold_right(options, [](Query a, Query b) { return alt(std::move(a), std::move(b)); });
}

Query goal_to_query(const TestGoal& goal) {
  struct Visitor {
    Query operator()(const FunctionGoal& g) const { return call(g.point); }
    Query operator()(const StatementGoal& g) const { return call(g.point); }
    Query operator()(const BranchGoal& g) const { return call(g.decision, g.outcome); }
    Query operator()(const ConditionGoal& g) const { return condition_query(g); }
    Query operator()(const McdcGoal& g) const {
      std::vector<Query> options;
      for (auto [i, j] : g.pairs) {
        const Query qi = condition_query(g.patterns[i]);
        const Query qj = condition_query(g.patterns[j]);
        options.push_back(alt(seq(qi, qj), seq(qj, qi)));
      }
      if (options.empty()) return concat(call(g.decision, true), call(g.decision, false));
      return fold_right(options, [](Query a, Query b) { return alt(std::move(a), std::move(b)); });
    }
    Query operator()(const PathGoal& g) const { return path_query(g); }
  };
  return std::visit(Visitor{}, goal);
}

}  // namespace covclose::fql
