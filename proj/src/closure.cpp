#include "covclose/closure.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <set>
#include <span>
#include <sstream>

#include <json.hpp>

#include "covclose/parallel.hpp"

namespace covclose {

TestCase new_test_case(const TestSuite& suite, const TestVector& vector, const TestGoal& goal,
                       std::string annotation) {
  std::string base = "gen_" + goal_id(goal);
  for (char& ch : base) {
    if (ch == ':' || ch == '/') ch = '_';
  }
  TestCase tc;
  tc.name = suite.unique_name(base);
  tc.vector = vector;
  tc.provenance = Provenance{goal_id(goal), std::move(annotation)};
  return tc;
}

void write_attempt_json(std::ostream& out, const AttemptRecord& r) {
  nlohmann::ordered_json rec;
  rec["goal"] = r.goal;
  rec["attempt"] = r.kind;
  rec["k"] = r.k;
  rec["verdict"] = r.verdict;
  rec["seconds"] = r.seconds;
  rec["conflicts"] = r.stats.conflicts;
  rec["decisions"] = r.stats.decisions;
  rec["propagations"] = r.stats.propagations;
  if (!r.test.empty()) rec["test"] = r.test;
  if (!r.grouped.empty()) rec["grouped"] = r.grouped;
  out << rec.dump() << '\n';
  out.flush();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct GenerationOutcome {
  bmc::Result result;
  fql::Query query;
  double seconds = 0;
  std::size_t extra_calls = 0;
  std::vector<std::size_t> grouped;
};

struct InfeasibilityOutcome {
  std::optional<std::string> evidence;
  double seconds = 0;
};

class Closure {
 public:
  Closure(const InstrumentedProgram& ip, TestSuite suite, const ClosureConfig& config)
      : ip_(ip), config_(config), tracker_(ip, config.criteria) {
    result_.suite = std::move(suite);
    std::vector<Trace> traces(result_.suite.size());
    parallel_for(traces.size(), config_.jobs,
                 [&](std::size_t i) { traces[i] = run(ip_, result_.suite.tests[i].vector); });
    for (std::size_t i = 0; i < traces.size(); ++i) tracker_.add(traces[i], result_.suite.tests[i].name);
    tried_infeasible_.assign(tracker_.report().goals.size(), false);
  }

  ClosureResult run_loop() {
    for (std::size_t k = 1; k <= config_.k_max && !done(); ++k) {
      result_.k_reached = k;
      sweep(k);
    }
    if (config_.prove_infeasible && !config_.infeasibility_first && !done()) {
      prove(open_in_order());
    }
    result_.report = tracker_.report();
    return std::move(result_);
  }

 private:
  bool done() const { return result_.budget_exhausted || tracker_.report().open_goals().empty(); }

  std::size_t remaining_budget() const {
    if (!config_.budget) return static_cast<std::size_t>(-1);
    return *config_.budget > result_.solver_calls ? *config_.budget - result_.solver_calls : 0;
  }

  bool is_open(std::size_t goal) const {
    return tracker_.report().status[goal].state == GoalStatus::State::Open;
  }

  std::vector<std::size_t> open_in_order() const { return tracker_.report().open_goals(); }

  void record(AttemptRecord r) {
    if (config_.log) write_attempt_json(*config_.log, r);
    result_.attempts.push_back(std::move(r));
  }

  void prove(const std::vector<std::size_t>& candidates) {
    std::vector<std::size_t> todo;
    for (std::size_t g : candidates) {
      if (!tried_infeasible_[g] && is_open(g) && !std::holds_alternative<PathGoal>(tracker_.report().goals[g])) {
        todo.push_back(g);
      }
    }
    if (todo.size() > remaining_budget()) {
      todo.resize(remaining_budget());
      result_.budget_exhausted = true;
    }
    std::vector<InfeasibilityOutcome> outcomes(todo.size());
    parallel_for(todo.size(), config_.jobs, [&](std::size_t i) {
      const auto start = Clock::now();
      outcomes[i].evidence = bmc::prove_infeasible(ip_, tracker_.report().goals[todo[i]], config_.limits);
      outcomes[i].seconds = seconds_since(start);
    });
    for (std::size_t i = 0; i < todo.size(); ++i) {
      const std::size_t g = todo[i];
      tried_infeasible_[g] = true;
      ++result_.solver_calls;
      AttemptRecord r;
      r.goal = goal_id(tracker_.report().goals[g]);
      r.kind = "infeasibility";
      r.k = 1;
      r.seconds = outcomes[i].seconds;
      if (outcomes[i].evidence && is_open(g)) {
        tracker_.report().mark_infeasible(g, *outcomes[i].evidence);
        r.verdict = "proven_infeasible";
      } else {
        r.verdict = "no_proof";
      }
      record(std::move(r));
    }
  }

  fql::Query query_for(std::size_t g) const {
    const TestGoal& goal = tracker_.report().goals[g];
    if (const auto* m = std::get_if<McdcGoal>(&goal)) {
      static const std::set<EvalPattern> kNone;
      const auto& observed = tracker_.observed();
      auto it = observed.find(m->decision);
      return fql::mcdc_query(ip_.table, *m, it == observed.end() ? kNone : it->second);
    }
    return fql::goal_to_query(goal);
  }

  void sweep(std::size_t k) {
    const std::vector<std::size_t> open = open_in_order();
    const std::size_t width = std::max(1U, config_.jobs);
    for (std::size_t pos = 0; pos < open.size() && !result_.budget_exhausted;) {
      std::vector<std::size_t> batch;
      while (pos < open.size() && batch.size() < width) {
        if (is_open(open[pos])) batch.push_back(open[pos]);
        ++pos;
      }
      if (config_.prove_infeasible && config_.infeasibility_first) prove(batch);
      std::erase_if(batch, [&](std::size_t g) { return !is_open(g); });
      if (batch.size() > remaining_budget()) {
        batch.resize(remaining_budget());
        result_.budget_exhausted = true;
      }
      generate(batch, k);
    }
  }

  // Extends a covering vector to further open goals, one solver call each.
  void extend(std::size_t g, std::size_t k, std::size_t allowance, GenerationOutcome& out) const {
    bmc::Session session(ip_, std::max(k, config_.group_length));
    std::vector<sat::Lit> assumed{session.encode(out.query)};
    const auto& goals = tracker_.report().goals;
    std::set<std::size_t> covered;
    auto refresh = [&] {
      const auto fresh = tracker_.preview(run(ip_, *out.result.vector));
      covered.insert(fresh.begin(), fresh.end());
    };
    refresh();
    for (std::size_t h : open_in_order()) {
      if (out.extra_calls >= allowance) break;
      if (h == g || covered.count(h) != 0 || std::holds_alternative<PathGoal>(goals[h])) continue;
      assumed.push_back(session.encode(query_for(h)));
      ++out.extra_calls;
      bmc::Result r = session.solve(assumed, config_.limits);
      if (r.outcome != bmc::Outcome::Covered) {
        assumed.pop_back();
        continue;
      }
      out.result.vector = std::move(r.vector);
      out.result.stats.conflicts += r.stats.conflicts;
      out.result.stats.decisions += r.stats.decisions;
      out.result.stats.propagations += r.stats.propagations;
      out.grouped.push_back(h);
      refresh();
    }
  }

  void generate(const std::vector<std::size_t>& batch, std::size_t k) {
    std::vector<GenerationOutcome> outcomes(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) outcomes[i].query = query_for(batch[i]);
    const std::size_t spare = batch.empty() ? 0 : (remaining_budget() - batch.size()) / batch.size();
    const std::size_t allowance = std::min(config_.group_attempts, spare);
    parallel_for(batch.size(), config_.jobs, [&](std::size_t i) {
      const auto start = Clock::now();
      bmc::Options options;
      options.k = k;
      options.limits = config_.limits;
      outcomes[i].result = bmc::solve(ip_, outcomes[i].query, options);
      if (config_.group && outcomes[i].result.outcome == bmc::Outcome::Covered) extend(batch[i], k, allowance, outcomes[i]);
      outcomes[i].seconds = seconds_since(start);
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const std::size_t g = batch[i];
      const TestGoal& goal = tracker_.report().goals[g];
      result_.solver_calls += 1 + outcomes[i].extra_calls;
      if (result_.solver_calls >= config_.budget.value_or(static_cast<std::size_t>(-1))) result_.budget_exhausted = true;
      AttemptRecord r;
      r.goal = goal_id(goal);
      r.kind = "generate";
      r.k = k;
      r.seconds = outcomes[i].seconds;
      r.stats = outcomes[i].result.stats;
      r.verdict = std::string(bmc::to_string(outcomes[i].result.outcome));
      if (outcomes[i].result.outcome == bmc::Outcome::Covered) {
        const TestVector& v = *outcomes[i].result.vector;
        const Trace trace = run(ip_, v);
        if (!is_open(g)) {
          // An earlier vector of this batch covered it already.
          r.verdict = "superseded";
        } else {
          const auto fresh = tracker_.preview(trace);
          if (std::find(fresh.begin(), fresh.end(), g) == fresh.end()) {
            std::ostringstream dump;
            dump << "generated vector does not cover goal " << r.goal << " (k=" << k << ")\n  query: "
                 << fql::to_string(outcomes[i].query) << "\n  vector:";
            for (const auto& step : v.steps) {
              dump << " [";
              for (std::size_t j = 0; j < step.size(); ++j) dump << (j ? "," : "") << step[j];
              dump << ']';
            }
            dump << "\n  trace: " << format_trace(trace);
            throw RevalidationError(dump.str());
          }
          TestCase tc = new_test_case(result_.suite, v, goal, "bmc k=" + std::to_string(v.steps.size()));
          r.test = tc.name;
          for (std::size_t h : outcomes[i].grouped) r.grouped.push_back(goal_id(tracker_.report().goals[h]));
          tracker_.add(trace, tc.name);
          result_.suite.tests.push_back(std::move(tc));
          ++result_.generated;
        }
      }
      record(std::move(r));
    }
  }

  const InstrumentedProgram& ip_;
  const ClosureConfig& config_;
  CoverageTracker tracker_;
  std::vector<bool> tried_infeasible_;
  ClosureResult result_;
};

}  // namespace

ClosureResult close(const InstrumentedProgram& ip, TestSuite suite, const ClosureConfig& config) {
  return Closure(ip, std::move(suite), config).run_loop();
}

}  // namespace covclose
