#include "support.hpp"

#include <map>
#include <sstream>

namespace covclose::testkit {

namespace {

struct Var {
  std::string name;
  bool is_bool = false;
};

class Generator {
 public:
  Generator(std::mt19937_64& rng, const ProgramShape& shape) : rng_(rng), shape_(shape) {}

  std::string run() {
    declare_inputs();
    declare_states();
    std::ostringstream out;
    for (const auto& line : decls_) out << line << '\n';
    std::string helper;
    if (shape_.allow_calls && chance(0.3)) {
      helper = block(1, 1 + pick(0, 1), false);
      out << "func helper {\n" << helper << "}\n";
    }
    std::string body = block(1, 1 + pick(1, 3), !helper.empty());
    out << "step main {\n" << body << "}\n";
    return out.str();
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  void declare_inputs() {
    std::size_t space = 1;
    const int ints = pick(1, 2);
    for (int i = 0; i < ints; ++i) {
      int width = pick(2, 4);
      while (width > 1 && space * static_cast<std::size_t>(width) > shape_.max_step_space) --width;
      const int lo = pick(-2, 0);
      space *= static_cast<std::size_t>(width);
      const std::string name = "x" + std::to_string(i);
      decls_.push_back("input int32 " + name + " in [" + std::to_string(lo) + ", " + std::to_string(lo + width - 1) +
                       "];");
      ints_.push_back(name);
    }
    if (space * 2 <= shape_.max_step_space && chance(0.5)) {
      decls_.push_back("input bool b0;");
      bools_.push_back("b0");
    }
  }

  void declare_states() {
    const int n = pick(0, shape_.max_states);
    for (int i = 0; i < n; ++i) {
      const std::string name = "s" + std::to_string(i);
      if (chance(0.3)) {
        decls_.push_back("state bool " + name + " = " + (chance(0.5) ? "true" : "false") + ";");
        bools_.push_back(name);
        states_.push_back({name, true});
      } else {
        decls_.push_back("state int32 " + name + " = " + std::to_string(pick(-1, 2)) + ";");
        ints_.push_back(name);
        states_.push_back({name, false});
      }
    }
  }

  std::string int_expr(int depth) {
    if (depth <= 0 || chance(0.4)) {
      if (chance(0.6)) return ints_[static_cast<std::size_t>(pick(0, static_cast<int>(ints_.size()) - 1))];
      const int c = pick(-3, 3);
      return c < 0 ? "(" + std::to_string(c) + ")" : std::to_string(c);
    }
    static const char* kOps[] = {"+", "-", "*", "/", "%"};
    int op = pick(0, shape_.allow_division ? 4 : 2);
    if (op >= 3 && chance(0.5)) op = pick(0, 2);
    if (chance(0.1)) return "-(" + int_expr(depth - 1) + ")";
    return "(" + int_expr(depth - 1) + " " + kOps[op] + " " + int_expr(depth - 1) + ")";
  }

  std::string leaf() {
    if (!bools_.empty() && chance(0.3)) return bools_[static_cast<std::size_t>(pick(0, static_cast<int>(bools_.size()) - 1))];
    static const char* kCmp[] = {"<", "<=", ">", ">=", "==", "!="};
    return int_expr(1) + " " + kCmp[pick(0, 5)] + " " + int_expr(1);
  }

  std::string guard(int leaves) {
    if (leaves <= 1) return chance(0.15) ? "!(" + leaf() + ")" : leaf();
    const int left = pick(1, leaves - 1);
    return "(" + guard(left) + (chance(0.5) ? " && " : " || ") + guard(leaves - left) + ")";
  }

  std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

  std::string block(int depth, int count, bool may_call) {
    std::string out;
    for (int i = 0; i < count; ++i) out += statement(depth, may_call);
    return out;
  }

  std::string statement(int depth, bool& may_call) {
    const std::string ind = indent(depth);
    std::vector<int> options{0, 0, 0, 4};
    if (!states_.empty()) options.insert(options.end(), 3, 1);
    if (decisions_ < shape_.max_decisions && depth < 3) options.insert(options.end(), 3, 2);
    if (shape_.allow_loops && decisions_ < shape_.max_decisions && depth < 3 && has_int_state()) options.push_back(3);
    if (shape_.allow_assume) options.push_back(5);
    if (may_call) options.insert(options.end(), 2, 6);
    switch (options[static_cast<std::size_t>(pick(0, static_cast<int>(options.size()) - 1))]) {
      case 1: {
        const Var& v = states_[static_cast<std::size_t>(pick(0, static_cast<int>(states_.size()) - 1))];
        return ind + v.name + " = " + (v.is_bool ? guard(pick(1, 2)) : int_expr(2)) + ";\n";
      }
      case 2: {
        ++decisions_;
        std::string s = ind + "if (" + guard(pick(1, 3)) + ") {\n" + block(depth + 1, pick(1, 2), false) + ind + "}";
        if (chance(0.5)) s += " else {\n" + block(depth + 1, pick(1, 2), false) + ind + "}";
        return s + "\n";
      }
      case 3: {
        ++decisions_;
        std::string counter;
        for (const auto& v : states_) {
          if (!v.is_bool) counter = v.name;
        }
        std::string g = counter + " < " + std::to_string(pick(0, 4));
        if (chance(0.3)) g = "(" + g + " && " + leaf() + ")";
        std::string s = ind + "while (" + g + ") bound " + std::to_string(pick(0, 3)) + " {\n";
        if (chance(0.85)) s += indent(depth + 1) + counter + " = " + counter + " + 1;\n";
        if (chance(0.3)) s += statement(depth + 1, may_call);
        if (s.back() == '{' || s.ends_with("{\n")) s += indent(depth + 1) + "skip;\n";
        return s + ind + "}\n";
      }
      case 5:
        return ind + "assume(" + guard(1) + ");\n";
      case 6:
        may_call = false;
        return ind + "call helper;\n";
      default:
        return ind + "skip;\n";
    }
  }

  bool has_int_state() const {
    for (const auto& v : states_) {
      if (!v.is_bool) return true;
    }
    return false;
  }

  std::mt19937_64& rng_;
  ProgramShape shape_;
  std::vector<std::string> decls_;
  std::vector<std::string> ints_;
  std::vector<std::string> bools_;
  std::vector<Var> states_;
  int decisions_ = 0;
};

class RegexOracle {
 public:
  RegexOracle(const fql::Query& q, std::span<const Event> events) : events_(events) { index(q); }

  bool any() {
    const std::size_t n = events_.size();
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = i; j <= n; ++j) {
        if (match(0, i, j)) return true;
      }
    }
    return false;
  }

 private:
  int index(const fql::Query& q) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(&q);
    children_.emplace_back();
    for (const auto& c : q.children) {
      const int child = index(c);
      children_[static_cast<std::size_t>(id)].push_back(child);
    }
    return id;
  }

  bool match(int node, std::size_t i, std::size_t j) {
    const auto key = std::make_tuple(node, i, j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const fql::Query& q = *nodes_[static_cast<std::size_t>(node)];
    const auto& ch = children_[static_cast<std::size_t>(node)];
    bool r = false;
    switch (q.kind) {
      case fql::Query::Kind::Call:
        r = j == i + 1 && q.atom.matches(events_[i]);
        break;
      case fql::Query::Kind::Not:
        r = j == i + 1 && !q.atom.matches(events_[i]);
        break;
      case fql::Query::Kind::Alt:
        r = match(ch[0], i, j) || match(ch[1], i, j);
        break;
      case fql::Query::Kind::Concat:
        for (std::size_t m = i; m <= j && !r; ++m) r = match(ch[0], i, m) && match(ch[1], m, j);
        break;
      case fql::Query::Kind::Seq:
        for (std::size_t m = i; m <= j && !r; ++m) {
          if (!match(ch[0], i, m)) continue;
          for (std::size_t m2 = m; m2 <= j && !r; ++m2) r = match(ch[1], m2, j);
        }
        break;
      case fql::Query::Kind::Star:
        r = i == j;
        for (std::size_t m = i + 1; m <= j && !r; ++m) r = match(ch[0], i, m) && match(node, m, j);
        break;
    }
    memo_[key] = r;
    return r;
  }

  std::span<const Event> events_;
  std::vector<const fql::Query*> nodes_;
  std::vector<std::vector<int>> children_;
  std::map<std::tuple<int, std::size_t, std::size_t>, bool> memo_;
};

std::optional<bool> random_truth(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return true;
    case 1: return false;
    default: return std::nullopt;
  }
}

}  // namespace

std::string random_program_source(std::mt19937_64& rng, const ProgramShape& shape) {
  return Generator(rng, shape).run();
}

std::vector<InputValuation> step_space(const Program& program) {
  std::vector<InputValuation> out{InputValuation{}};
  for (const auto& decl : program.inputs) {
    std::vector<InputValuation> next;
    for (const auto& prefix : out) {
      for (std::int64_t v = decl.lo; v <= decl.hi; ++v) {
        InputValuation x = prefix;
        x.push_back(static_cast<std::int32_t>(v));
        next.push_back(std::move(x));
      }
    }
    out = std::move(next);
  }
  return out;
}

void for_each_vector(const Program& program, std::size_t length, const std::function<void(const TestVector&)>& fn) {
  const auto space = step_space(program);
  std::vector<std::size_t> digits(length, 0);
  TestVector v;
  v.steps.assign(length, space.front());
  while (true) {
    for (std::size_t s = 0; s < length; ++s) v.steps[s] = space[digits[s]];
    fn(v);
    std::size_t pos = 0;
    while (pos < length && ++digits[pos] == space.size()) digits[pos++] = 0;
    if (pos == length) return;
  }
}

bool regex_oracle(const fql::Query& q, std::span<const Event> events) { return RegexOracle(q, events).any(); }

fql::Query random_query(std::mt19937_64& rng, PointId max_point, int depth) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const auto point = [&] { return static_cast<PointId>(pick(1, static_cast<int>(max_point))); };
  if (depth <= 0 || pick(0, 3) == 0) {
    if (pick(0, 4) == 0) return fql::not_call(point(), random_truth(rng));
    return fql::call(point(), random_truth(rng));
  }
  switch (pick(0, 3)) {
    case 0: return fql::concat(random_query(rng, max_point, depth - 1), random_query(rng, max_point, depth - 1));
    case 1: return fql::seq(random_query(rng, max_point, depth - 1), random_query(rng, max_point, depth - 1));
    case 2: return fql::alt(random_query(rng, max_point, depth - 1), random_query(rng, max_point, depth - 1));
    default: return fql::star(random_query(rng, max_point, depth - 1));
  }
}

std::vector<Event> random_events(std::mt19937_64& rng, PointId max_point, std::size_t max_length) {
  const auto n = std::uniform_int_distribution<std::size_t>(0, max_length)(rng);
  std::vector<Event> events;
  for (std::size_t i = 0; i < n; ++i) {
    Event e;
    e.point = static_cast<PointId>(std::uniform_int_distribution<int>(1, static_cast<int>(max_point))(rng));
    e.truth = random_truth(rng);
    e.kind = e.truth ? PointKind::Decision : PointKind::Statement;
    events.push_back(e);
  }
  return events;
}

bool brute_force_sat(int vars, const std::vector<Clause>& clauses) {
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << vars); ++m) {
    bool all = true;
    for (const auto& c : clauses) {
      bool sat = false;
      for (sat::Lit l : c) sat = sat || (((m >> l.var()) & 1U) != 0) != l.negated();
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

std::string data_path(const std::string& name) { return std::string(COVCLOSE_DATA_DIR) + "/" + name; }

}  // namespace covclose::testkit
