#include "covclose/goals.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <stdexcept>

namespace covclose {

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::Function: return "function";
    case Criterion::Statement: return "statement";
    case Criterion::Branch: return "branch";
    case Criterion::Mcdc: return "mcdc";
  }
  return "?";
}

std::optional<Criterion> parse_criterion(std::string_view text) {
  if (text == "function" || text == "func") return Criterion::Function;
  if (text == "statement" || text == "stmt") return Criterion::Statement;
  if (text == "branch" || text == "decision") return Criterion::Branch;
  if (text == "mcdc") return Criterion::Mcdc;
  return std::nullopt;
}

std::vector<Criterion> parse_criteria(std::string_view text) {
  std::vector<Criterion> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    if (!item.empty()) {
      auto c = parse_criterion(item);
      if (!c) throw std::invalid_argument("unknown coverage criterion '" + std::string(item) + "'");
      if (std::find(out.begin(), out.end(), *c) == out.end()) out.push_back(*c);
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool independence_pair(const EvalPattern& a, const EvalPattern& b, int leaf) {
  const std::uint64_t bit = std::uint64_t{1} << leaf;
  if ((a.evaluated & b.evaluated & bit) == 0) return false;
  if (((a.values ^ b.values) & bit) == 0) return false;
  if (a.outcome == b.outcome) return false;
  const std::uint64_t common = a.evaluated & b.evaluated & ~bit;
  return ((a.values ^ b.values) & common) == 0;
}

std::vector<EvalPattern> enumerate_patterns(const GuardShape& shape) {
  std::vector<EvalPattern> patterns;
  std::set<EvalPattern> seen;
  const std::uint64_t count = std::uint64_t{1} << shape.leaf_count;
  for (std::uint64_t values = 0; values < count; ++values) {
    EvalPattern p;
    p.outcome = shape.evaluate(values, p.evaluated);
    p.values = values & p.evaluated;
    if (seen.insert(p).second) patterns.push_back(p);
  }
  return patterns;
}

ConditionGoal to_condition_goal(const PointInfo& decision, const EvalPattern& pattern) {
  ConditionGoal g;
  g.decision = decision.id;
  g.outcome = pattern.outcome;
  for (std::size_t i = 0; i < decision.conditions.size(); ++i) {
    if (((pattern.evaluated >> i) & 1U) != 0) {
      g.conditions.emplace_back(decision.conditions[i], ((pattern.values >> i) & 1U) != 0);
    }
  }
  return g;
}

EvalPattern to_pattern(const PointTable& table, const ConditionGoal& goal) {
  EvalPattern p;
  p.outcome = goal.outcome;
  for (const auto& [cond, truth] : goal.conditions) {
    const int leaf = table.at(cond).leaf_index;
    p.evaluated |= std::uint64_t{1} << leaf;
    if (truth) p.values |= std::uint64_t{1} << leaf;
  }
  return p;
}

namespace {

void append_mcdc_goals(const PointInfo& decision, std::vector<TestGoal>& out) {
  if (decision.shape.leaf_count > 20) {
    throw std::length_error("decision " + std::to_string(decision.id) + " has too many conditions for MC/DC enumeration");
  }
  const auto patterns = enumerate_patterns(decision.shape);
  for (int leaf = 0; leaf < decision.shape.leaf_count; ++leaf) {
    McdcGoal goal;
    goal.decision = decision.id;
    goal.condition = decision.conditions[static_cast<std::size_t>(leaf)];
    std::map<std::size_t, std::size_t> local;  // pattern index -> goal.patterns index
    auto index_of = [&](std::size_t p) {
      auto [it, inserted] = local.emplace(p, goal.patterns.size());
      if (inserted) goal.patterns.push_back(to_condition_goal(decision, patterns[p]));
      return it->second;
    };
    for (std::size_t a = 0; a < patterns.size(); ++a) {
      for (std::size_t b = a + 1; b < patterns.size(); ++b) {
        if (independence_pair(patterns[a], patterns[b], leaf)) {
          const std::size_t ia = index_of(a);
          const std::size_t ib = index_of(b);
          goal.pairs.emplace_back(ia, ib);
        }
      }
    }
    out.emplace_back(std::move(goal));
  }
}

std::uint32_t parse_uint(std::string_view text, std::string_view whole) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("malformed goal id '" + std::string(whole) + "'");
  }
  return v;
}

bool parse_truth(std::string_view text, std::string_view whole) {
  if (text == "t" || text == "true") return true;
  if (text == "f" || text == "false") return false;
  throw std::invalid_argument("malformed truth value in goal id '" + std::string(whole) + "'");
}

void expect_kind(const InstrumentedProgram& ip, PointId id, PointKind kind, std::string_view whole) {
  if (!ip.table.contains(id) || ip.table.at(id).kind != kind) {
    throw std::invalid_argument("goal id '" + std::string(whole) + "' does not name a " +
                                std::string(to_string(kind)) + " point");
  }
}

}  // namespace

std::vector<TestGoal> enumerate_goals(const InstrumentedProgram& ip, Criterion criterion) {
  std::vector<TestGoal> goals;
  for (const auto& p : ip.table.points()) {
    switch (criterion) {
      case Criterion::Function:
        if (p.kind == PointKind::FunctionEntry) goals.emplace_back(FunctionGoal{p.id});
        break;
      case Criterion::Statement:
        if (p.kind == PointKind::Statement) goals.emplace_back(StatementGoal{p.id});
        break;
      case Criterion::Branch:
        if (p.kind == PointKind::Decision) {
          goals.emplace_back(BranchGoal{p.id, true});
          goals.emplace_back(BranchGoal{p.id, false});
        }
        break;
      case Criterion::Mcdc:
        if (p.kind == PointKind::Decision) append_mcdc_goals(p, goals);
        break;
    }
  }
  return goals;
}

std::vector<TestGoal> enumerate_goals(const InstrumentedProgram& ip, std::span<const Criterion> criteria) {
  std::vector<TestGoal> goals;
  for (Criterion c : criteria) {
    auto part = enumerate_goals(ip, c);
    std::move(part.begin(), part.end(), std::back_inserter(goals));
  }
  return goals;
}

std::vector<ConditionGoal> condition_goals(const InstrumentedProgram& ip) {
  std::vector<ConditionGoal> out;
  for (const auto& g : enumerate_goals(ip, Criterion::Mcdc)) {
    for (const auto& p : std::get<McdcGoal>(g).patterns) {
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
  }
  return out;
}

std::string goal_id(const TestGoal& goal) {
  struct Visitor {
    std::string operator()(const FunctionGoal& g) const { return "f" + std::to_string(g.point); }
    std::string operator()(const StatementGoal& g) const { return "s" + std::to_string(g.point); }
    std::string operator()(const BranchGoal& g) const {
      return "d" + std::to_string(g.decision) + (g.outcome ? ":true" : ":false");
    }
    std::string operator()(const McdcGoal& g) const { return "c" + std::to_string(g.condition); }
    std::string operator()(const ConditionGoal& g) const {
      std::string id = "p" + std::to_string(g.decision) + (g.outcome ? ":t" : ":f");
      for (const auto& [cond, truth] : g.conditions) {
        id += '/' + std::to_string(cond) + (truth ? ":t" : ":f");
      }
      return id;
    }
    std::string operator()(const PathGoal& g) const {
      static constexpr std::string_view kForms[] = {"path:seq:", "path:any:", "path:avoid:"};
      std::string id(kForms[static_cast<int>(g.form)]);
      for (std::size_t i = 0; i < g.points.size(); ++i) {
        if (i != 0) id += ',';
        id += std::to_string(g.points[i]);
      }
      if (g.form == PathGoal::Form::Complement) id += '!' + std::to_string(g.avoided);
      return id;
    }
  };
  return std::visit(Visitor{}, goal);
}

TestGoal parse_goal_id(std::string_view id, const InstrumentedProgram& ip) {
  if (id.size() < 2) throw std::invalid_argument("malformed goal id '" + std::string(id) + "'");
  const char tag = id[0];
  const std::string_view rest = id.substr(1);
  switch (tag) {
    case 'f': {
      const PointId p = parse_uint(rest, id);
      expect_kind(ip, p, PointKind::FunctionEntry, id);
      return FunctionGoal{p};
    }
    case 's': {
      const PointId p = parse_uint(rest, id);
      expect_kind(ip, p, PointKind::Statement, id);
      return StatementGoal{p};
    }
    case 'd': {
      const auto colon = rest.find(':');
      if (colon == std::string_view::npos) throw std::invalid_argument("branch goal id needs ':true' or ':false'");
      const PointId p = parse_uint(rest.substr(0, colon), id);
      expect_kind(ip, p, PointKind::Decision, id);
      return BranchGoal{p, parse_truth(rest.substr(colon + 1), id)};
    }
    case 'c': {
      const PointId p = parse_uint(rest, id);
      expect_kind(ip, p, PointKind::Condition, id);
      for (auto& g : enumerate_goals(ip, Criterion::Mcdc)) {
        if (std::get<McdcGoal>(g).condition == p) return g;
      }
      break;
    }
    case 'p': {
      ConditionGoal g;
      std::vector<std::string_view> parts;
      std::string_view text = rest;
      while (true) {
        const auto slash = text.find('/');
        parts.push_back(text.substr(0, slash));
        if (slash == std::string_view::npos) break;
        text.remove_prefix(slash + 1);
      }
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto colon = parts[i].find(':');
        if (colon == std::string_view::npos) throw std::invalid_argument("malformed goal id '" + std::string(id) + "'");
        const PointId p = parse_uint(parts[i].substr(0, colon), id);
        const bool truth = parse_truth(parts[i].substr(colon + 1), id);
        if (i == 0) {
          expect_kind(ip, p, PointKind::Decision, id);
          g.decision = p;
          g.outcome = truth;
        } else {
          expect_kind(ip, p, PointKind::Condition, id);
          if (ip.table.at(p).parent_decision != g.decision) {
            throw std::invalid_argument("condition " + std::to_string(p) + " does not belong to decision " +
                                        std::to_string(g.decision));
          }
          g.conditions.emplace_back(p, truth);
        }
      }
      return g;
    }
    default:
      break;
  }
  throw std::invalid_argument("unknown goal id '" + std::string(id) + "'");
}

std::optional<Criterion> criterion_of(const TestGoal& goal) {
  switch (goal.index()) {
    case 0: return Criterion::Function;
    case 1: return Criterion::Statement;
    case 2: return Criterion::Branch;
    case 4: return Criterion::Mcdc;
    default: return std::nullopt;
  }
}

}  // namespace covclose
