#include "covclose/coverage.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "covclose/fql.hpp"
#include "covclose/parallel.hpp"

namespace covclose {

std::string_view to_string(GoalStatus::State state) {
  switch (state) {
    case GoalStatus::State::Open: return "open";
    case GoalStatus::State::Covered: return "covered";
    case GoalStatus::State::ProvenInfeasible: return "proven_infeasible";
  }
  return "?";
}

std::string_view mcdc_flavor_note() {
  return "MC/DC: unique-cause with short-circuit masking; a condition counts once an independence pair "
         "is observed anywhere in the suite (pairs may span tests and steps); total = number of conditions";
}

double CriterionSummary::percent() const {
  return total == 0 ? 100.0 : 100.0 * static_cast<double>(covered) / static_cast<double>(total);
}

double CriterionSummary::effective_percent() const {
  return total == 0 ? 100.0 : 100.0 * static_cast<double>(covered + infeasible) / static_cast<double>(total);
}

CriterionSummary CoverageReport::summary(Criterion criterion) const {
  CriterionSummary s;
  s.criterion = criterion;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (criterion_of(goals[i]) != criterion) continue;
    ++s.total;
    if (status[i].state == GoalStatus::State::Covered) ++s.covered;
    if (status[i].state == GoalStatus::State::ProvenInfeasible) ++s.infeasible;
  }
  return s;
}

std::vector<std::size_t> CoverageReport::open_goals() const {
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (status[i].state == GoalStatus::State::Open) open.push_back(i);
  }
  return open;
}

std::size_t CoverageReport::covered_count() const {
  return static_cast<std::size_t>(std::count_if(status.begin(), status.end(), [](const GoalStatus& s) {
    return s.state == GoalStatus::State::Covered;
  }));
}

bool CoverageReport::fully_effective() const { return open_goals().empty(); }

void CoverageReport::mark_infeasible(std::size_t goal, std::string evidence) {
  auto& s = status.at(goal);
  if (s.state == GoalStatus::State::Covered) return;
  s.state = GoalStatus::State::ProvenInfeasible;
  s.evidence = std::move(evidence);
}

void CoverageReport::write_text(std::ostream& out) const {
  out << "Coverage report (" << test_names.size() << " tests)\n";
  out << "  " << mcdc_flavor_note() << "\n\n";
  out << std::left << std::setw(12) << "criterion" << std::right << std::setw(9) << "covered" << std::setw(12)
      << "infeasible" << std::setw(8) << "total" << std::setw(11) << "coverage" << std::setw(12) << "effective"
      << '\n';
  for (Criterion c : criteria) {
    const auto s = summary(c);
    out << std::left << std::setw(12) << to_string(c) << std::right << std::setw(9) << s.covered << std::setw(12)
        << s.infeasible << std::setw(8) << s.total << std::setw(10) << std::fixed << std::setprecision(1)
        << s.percent() << '%' << std::setw(11) << s.effective_percent() << "%\n";
  }
  const auto open = open_goals();
  if (!open.empty()) {
    out << "\nOpen goals:\n";
    for (std::size_t g : open) out << "  " << goal_id(goals[g]) << '\n';
  }
  bool header = false;
  for (std::size_t g = 0; g < goals.size(); ++g) {
    if (status[g].state != GoalStatus::State::ProvenInfeasible) continue;
    if (!header) out << "\nProven infeasible:\n";
    header = true;
    out << "  " << goal_id(goals[g]) << "  (" << status[g].evidence << ")\n";
  }
}

void CoverageReport::write_json(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["mcdc_flavor"] = std::string(mcdc_flavor_note());
  auto summaries = nlohmann::ordered_json::array();
  for (Criterion c : criteria) {
    const auto s = summary(c);
    summaries.push_back({{"criterion", std::string(to_string(c))},
                         {"total", s.total},
                         {"covered", s.covered},
                         {"proven_infeasible", s.infeasible},
                         {"percent", s.percent()},
                         {"effective_percent", s.effective_percent()}});
  }
  doc["summary"] = std::move(summaries);
  auto goal_records = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < goals.size(); ++g) {
    nlohmann::ordered_json rec;
    rec["goal"] = goal_id(goals[g]);
    rec["criterion"] = std::string(to_string(*criterion_of(goals[g])));
    rec["status"] = std::string(to_string(status[g].state));
    auto tests = nlohmann::ordered_json::array();
    for (std::size_t t : status[g].covered_by) tests.push_back(test_names[t]);
    rec["tests"] = std::move(tests);
    if (!status[g].evidence.empty()) rec["evidence"] = status[g].evidence;
    goal_records.push_back(std::move(rec));
  }
  doc["goals"] = std::move(goal_records);
  auto tests = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < test_names.size(); ++t) {
    auto ids = nlohmann::ordered_json::array();
    for (std::size_t g : per_test[t]) ids.push_back(goal_id(goals[g]));
    tests.push_back({{"name", test_names[t]}, {"goals", std::move(ids)}});
  }
  doc["tests"] = std::move(tests);
  out << doc.dump(2) << '\n';
}

std::vector<DecisionEvaluation> decision_evaluations(const PointTable& table, const Trace& trace) {
  std::vector<DecisionEvaluation> out;
  EvalPattern pending;
  for (const auto& e : trace.events) {
    if (e.kind == PointKind::Condition) {
      const int leaf = table.at(e.point).leaf_index;
      pending.evaluated |= std::uint64_t{1} << leaf;
      if (*e.truth) pending.values |= std::uint64_t{1} << leaf;
    } else if (e.kind == PointKind::Decision) {
      pending.outcome = *e.truth;
      out.push_back(DecisionEvaluation{e.point, pending});
      pending = EvalPattern{};
    }
  }
  return out;
}

CoverageTracker::CoverageTracker(const InstrumentedProgram& ip, std::span<const Criterion> criteria) : ip_(&ip) {
  report_.criteria.assign(criteria.begin(), criteria.end());
  std::sort(report_.criteria.begin(), report_.criteria.end());
  report_.goals = enumerate_goals(ip, report_.criteria);
  report_.status.resize(report_.goals.size());
  for (std::size_t i = 0; i < report_.goals.size(); ++i) {
    const auto& g = report_.goals[i];
    if (const auto* f = std::get_if<FunctionGoal>(&g)) function_goal_[f->point] = i;
    if (const auto* s = std::get_if<StatementGoal>(&g)) statement_goal_[s->point] = i;
    if (const auto* b = std::get_if<BranchGoal>(&g)) branch_goal_[{b->decision, b->outcome}] = i;
    if (const auto* m = std::get_if<McdcGoal>(&g)) mcdc_goals_[m->decision].push_back(i);
  }
}

std::vector<std::size_t> CoverageTracker::apply(const Trace& trace, std::size_t test_index, bool commit) {
  std::set<std::size_t> hit;  // every goal this trace covers (for attribution)
  std::vector<std::size_t> fresh;
  auto note = [&](std::size_t goal) {
    if (!hit.insert(goal).second) return;
    if (report_.status[goal].state != GoalStatus::State::Covered) fresh.push_back(goal);
  };
  for (const auto& e : trace.events) {
    if (e.kind == PointKind::FunctionEntry) {
      if (auto it = function_goal_.find(e.point); it != function_goal_.end()) note(it->second);
    } else if (e.kind == PointKind::Statement) {
      if (auto it = statement_goal_.find(e.point); it != statement_goal_.end()) note(it->second);
    } else if (e.kind == PointKind::Decision) {
      if (auto it = branch_goal_.find({e.point, *e.truth}); it != branch_goal_.end()) note(it->second);
    }
  }

  std::map<PointId, std::set<EvalPattern>> added;
  if (!mcdc_goals_.empty()) {
    std::set<std::size_t> completed;
    for (const auto& ev : decision_evaluations(ip_->table, trace)) {
      auto goals_it = mcdc_goals_.find(ev.decision);
      if (goals_it == mcdc_goals_.end()) continue;
      static const std::set<EvalPattern> kNone;
      auto seen_it = observed_.find(ev.decision);
      const auto& seen = seen_it == observed_.end() ? kNone : seen_it->second;
      auto& local = added[ev.decision];
      if (seen.count(ev.pattern) != 0 || local.count(ev.pattern) != 0) continue;
      for (std::size_t goal : goals_it->second) {
        if (report_.status[goal].state == GoalStatus::State::Covered || completed.count(goal) != 0) continue;
        const int leaf = ip_->table.at(std::get<McdcGoal>(report_.goals[goal]).condition).leaf_index;
        auto pairs_with = [&](const std::set<EvalPattern>& others) {
          return std::any_of(others.begin(), others.end(),
                             [&](const EvalPattern& o) { return independence_pair(ev.pattern, o, leaf); });
        };
        if (pairs_with(seen) || pairs_with(local)) {
          completed.insert(goal);
          note(goal);
        }
      }
      local.insert(ev.pattern);
    }
  }

  if (commit) {
    for (auto& [decision, patterns] : added) observed_[decision].insert(patterns.begin(), patterns.end());
    std::vector<std::size_t> attributed(hit.begin(), hit.end());
    for (std::size_t goal : attributed) {
      auto& s = report_.status[goal];
      s.state = GoalStatus::State::Covered;
      s.evidence.clear();
      s.covered_by.push_back(test_index);
    }
    report_.per_test.push_back(std::move(attributed));
  }
  return fresh;
}

std::vector<std::size_t> CoverageTracker::add(const Trace& trace, std::string name) {
  const std::size_t index = report_.test_names.size();
  report_.test_names.push_back(name.empty() ? "test" + std::to_string(index) : std::move(name));
  return apply(trace, index, true);
}

std::vector<std::size_t> CoverageTracker::preview(const Trace& trace) const {
  // apply() only mutates when committing
  return const_cast<CoverageTracker*>(this)->apply(trace, report_.test_names.size(), false);
}

CoverageReport measure(const InstrumentedProgram& ip, const TestSuite& suite, std::span<const Criterion> criteria,
                       unsigned jobs) {
  std::vector<Trace> traces(suite.size());
  parallel_for(suite.size(), jobs, [&](std::size_t i) { traces[i] = run(ip, suite.tests[i].vector); });
  CoverageTracker tracker(ip, criteria);
  for (std::size_t i = 0; i < suite.size(); ++i) tracker.add(traces[i], suite.tests[i].name);
  return std::move(tracker.report());
}

std::set<std::size_t> covered_goals(const InstrumentedProgram& ip, const Trace& trace,
                                    std::span<const TestGoal> goals) {
  std::set<std::size_t> out;
  const auto evaluations = decision_evaluations(ip.table, trace);
  auto has_event = [&](PointId id, std::optional<bool> truth) {
    return std::any_of(trace.events.begin(), trace.events.end(),
                       [&](const Event& e) { return e.point == id && (!truth || e.truth == truth); });
  };
  for (std::size_t i = 0; i < goals.size(); ++i) {
    const auto& g = goals[i];
    bool covered = false;
    if (const auto* f = std::get_if<FunctionGoal>(&g)) {
      covered = has_event(f->point, std::nullopt);
    } else if (const auto* s = std::get_if<StatementGoal>(&g)) {
      covered = has_event(s->point, std::nullopt);
    } else if (const auto* b = std::get_if<BranchGoal>(&g)) {
      covered = has_event(b->decision, b->outcome);
    } else if (const auto* c = std::get_if<ConditionGoal>(&g)) {
      const EvalPattern want = to_pattern(ip.table, *c);
      covered = std::any_of(evaluations.begin(), evaluations.end(), [&](const DecisionEvaluation& ev) {
        return ev.decision == c->decision && ev.pattern == want;
      });
    } else if (const auto* m = std::get_if<McdcGoal>(&g)) {
      const int leaf = ip.table.at(m->condition).leaf_index;
      for (std::size_t a = 0; a < evaluations.size() && !covered; ++a) {
        if (evaluations[a].decision != m->decision) continue;
        for (std::size_t b = a + 1; b < evaluations.size() && !covered; ++b) {
          covered = evaluations[b].decision == m->decision &&
                    independence_pair(evaluations[a].pattern, evaluations[b].pattern, leaf);
        }
      }
    } else if (const auto* p = std::get_if<PathGoal>(&g)) {
      covered = fql::matches(fql::goal_to_query(*p), trace);
    }
    if (covered) out.insert(i);
  }
  return out;
}

}  // namespace covclose
