#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "covclose/bmc.hpp"
#include "covclose/closure.hpp"
#include "covclose/coverage.hpp"
#include "covclose/fql.hpp"
#include "covclose/frontend.hpp"
#include "covclose/goals.hpp"
#include "covclose/instrument.hpp"
#include "covclose/suite.hpp"
#include "covclose/suite_tools.hpp"

using namespace covclose;

namespace {

struct Common {
  std::string program;
  std::string suite;
  std::string criteria = "statement,branch,mcdc";
  unsigned jobs = 1;
  bool deterministic = false;
  std::int64_t conflicts = 1'000'000;
  double time_limit = 10.0;
  bool no_group = false;
};

InstrumentedProgram load(const std::string& path) { return instrument(parse_file(path)); }

TestSuite load_suite(const std::string& path, const Program& program) {
  if (path.empty()) return {};
  return read_suite_file(path, program);
}

bmc::Limits limits_of(const Common& c) {
  bmc::Limits l;
  l.conflicts = c.conflicts;
  l.time = std::chrono::milliseconds(static_cast<std::int64_t>(c.time_limit * 1000));
  l.deterministic = c.deterministic;
  return l;
}

std::string format_vector(const Program& program, const TestVector& v) {
  std::ostringstream out;
  for (std::size_t s = 0; s < v.steps.size(); ++s) {
    out << "  step " << s << ':';
    for (std::size_t i = 0; i < program.inputs.size(); ++i) {
      out << ' ' << program.inputs[i].name << '=';
      if (program.inputs[i].type == Type::Bool) {
        out << (v.steps[s][i] != 0 ? "true" : "false");
      } else {
        out << v.steps[s][i];
      }
    }
    out << '\n';
  }
  return out.str();
}

void write_output_suite(const std::string& path, const TestSuite& suite, const Program& program) {
  if (has_unset_expectations(suite)) {
    std::cerr << "warning: the exported suite contains test cases without expected outcomes; "
                 "they must be supplied from the requirements before use\n";
  }
  if (path.empty() || path == "-") {
    write_suite(std::cout, suite, program);
  } else {
    write_suite_file(path, suite, program);
  }
}

void print_summary_row(std::ostream& out, const std::string& label, const CoverageReport& report) {
  out << std::left << std::setw(28) << label;
  for (Criterion c : report.criteria) {
    out << std::right << std::setw(10) << std::fixed << std::setprecision(1) << report.summary(c).percent() << '%';
  }
  out << '\n';
}

int cmd_instrument(const Common& c, const std::string& output) {
  const auto ip = load(c.program);
  if (output.empty() || output == "-") {
    ip.table.write_csv(std::cout, ip.program.file);
  } else {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write '" + output + "'");
    ip.table.write_csv(out, ip.program.file);
  }
  return 0;
}

int cmd_run(const Common& c) {
  const auto ip = load(c.program);
  const auto suite = load_suite(c.suite, ip.program);
  for (const auto& t : suite.tests) std::cout << t.name << ": " << format_trace(run(ip, t.vector)) << '\n';
  return 0;
}

int cmd_cover(const Common& c, const std::string& json_path, bool prove) {
  const auto ip = load(c.program);
  const auto suite = load_suite(c.suite, ip.program);
  const auto criteria = parse_criteria(c.criteria);
  auto report = measure(ip, suite, criteria, c.jobs);
  if (prove) {
    for (std::size_t g : report.open_goals()) {
      if (auto evidence = bmc::prove_infeasible(ip, report.goals[g], limits_of(c))) {
        report.mark_infeasible(g, *evidence);
      }
    }
  }
  report.write_text(std::cout);
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot write '" + json_path + "'");
    report.write_json(out);
  }
  return report.fully_effective() ? 0 : 1;
}

int cmd_goals(const Common& c) {
  const auto ip = load(c.program);
  for (const auto& g : enumerate_goals(ip, parse_criteria(c.criteria))) {
    std::cout << goal_id(g) << '\t' << fql::to_string(fql::goal_to_query(g)) << '\n';
  }
  return 0;
}

int cmd_generate(const Common& c, const std::string& goal_text, const std::string& query_text, std::size_t k,
                 std::size_t k_max, const std::string& dimacs_path) {
  const auto ip = load(c.program);
  fql::Query query;
  std::string label;
  if (!query_text.empty()) {
    query = fql::parse_query(query_text);
    label = query_text;
  } else if (!goal_text.empty()) {
    const TestGoal goal = parse_goal_id(goal_text, ip);
    label = goal_id(goal);
    if (const auto* m = std::get_if<McdcGoal>(&goal)) {
      CoverageTracker tracker(ip, std::vector<Criterion>{Criterion::Mcdc});
      for (const auto& t : load_suite(c.suite, ip.program).tests) tracker.add(run(ip, t.vector), t.name);
      static const std::set<EvalPattern> kNone;
      auto it = tracker.observed().find(m->decision);
      query = fql::mcdc_query(ip.table, *m, it == tracker.observed().end() ? kNone : it->second);
    } else {
      query = fql::goal_to_query(goal);
    }
  } else {
    throw CLI::ValidationError("generate", "one of --goal or --query is required");
  }
  std::cout << "query: " << fql::to_string(query) << '\n';

  bmc::Result result;
  if (k != 0) {
    bmc::Options options;
    options.k = k;
    options.limits = limits_of(c);
    std::ofstream dimacs;
    if (!dimacs_path.empty()) {
      dimacs.open(dimacs_path);
      if (!dimacs) throw std::runtime_error("cannot write '" + dimacs_path + "'");
      options.dimacs = &dimacs;
    }
    result = bmc::solve(ip, query, options);
  } else {
    result = bmc::generate(ip, query, k_max, limits_of(c));
  }
  std::cout << "verdict: " << bmc::to_string(result.outcome) << " (k=" << result.k << ", "
            << result.variables << " variables, " << result.clauses << " clauses, " << result.stats.conflicts
            << " conflicts)\n";
  if (result.vector) {
    std::cout << "vector:\n" << format_vector(ip.program, *result.vector);
    const Trace trace = run(ip, *result.vector);
    std::cout << "trace: " << format_trace(trace) << '\n';
    if (!fql::matches(query, trace)) {
      std::cerr << "error: the generated vector does not match the query\n";
      return 3;
    }
    return 0;
  }
  if (!goal_text.empty() && result.outcome == bmc::Outcome::NoVector) {
    if (auto evidence = bmc::prove_infeasible(ip, parse_goal_id(goal_text, ip), limits_of(c))) {
      std::cout << "proven infeasible: " << *evidence << '\n';
    }
  }
  return 1;
}

ClosureConfig closure_config(const Common& c, std::size_t k_max, std::optional<std::size_t> budget) {
  ClosureConfig config;
  config.criteria = parse_criteria(c.criteria);
  config.k_max = k_max;
  config.group_length = k_max;
  config.limits = limits_of(c);
  config.budget = budget;
  config.jobs = c.jobs;
  config.group = !c.no_group;
  return config;
}

int cmd_close(const Common& c, std::size_t k_max, std::optional<std::size_t> budget, const std::string& output,
              const std::string& log_path, bool infeasibility_last) {
  const auto ip = load(c.program);
  auto config = closure_config(c, k_max, budget);
  config.infeasibility_first = !infeasibility_last;
  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path);
    if (!log) throw std::runtime_error("cannot write '" + log_path + "'");
    config.log = &log;
  }
  const auto initial = load_suite(c.suite, ip.program);
  const auto before = measure(ip, initial, config.criteria, c.jobs);
  const auto result = close(ip, initial, config);
  std::cout << "closure: " << result.generated << " tests generated, " << result.solver_calls
            << " solver calls, k reached " << result.k_reached
            << (result.budget_exhausted ? ", budget exhausted" : "") << "\n\n";
  print_summary_row(std::cout, "initial suite", before);
  print_summary_row(std::cout, "after closure", result.report);
  std::cout << '\n';
  result.report.write_text(std::cout);
  if (!output.empty()) write_output_suite(output, result.suite, ip.program);
  return result.report.fully_effective() ? 0 : 1;
}

int cmd_baseline(const Common& c, std::size_t budget, std::size_t length, std::uint64_t seed,
                 const std::string& output) {
  const auto ip = load(c.program);
  RandomClosureConfig config;
  config.criteria = parse_criteria(c.criteria);
  config.budget = budget;
  config.length = length;
  config.seed = seed;
  config.jobs = c.jobs;
  const auto initial = load_suite(c.suite, ip.program);
  const auto before = measure(ip, initial, config.criteria, c.jobs);
  const auto result = random_closure(ip, initial, config);
  std::cout << "random search (seed " << seed << "): " << result.generated << " generated, " << result.kept
            << " kept, " << std::fixed << std::setprecision(1) << 100.0 * result.redundancy() << "% redundant\n\n";
  print_summary_row(std::cout, "initial suite", before);
  print_summary_row(std::cout, "after random search", result.report);
  if (!output.empty()) write_output_suite(output, result.suite, ip.program);
  return 0;
}

int cmd_reduce(const Common& c, const std::string& output) {
  const auto ip = load(c.program);
  const auto suite = load_suite(c.suite, ip.program);
  const auto criteria = parse_criteria(c.criteria);
  const auto reduced = reduce(ip, suite, criteria);
  std::cerr << "reduced " << suite.size() << " tests to " << reduced.size() << '\n';
  write_output_suite(output.empty() ? "-" : output, reduced, ip.program);
  return 0;
}

int cmd_experiment(const Common& c, std::size_t budget, std::size_t length, std::uint64_t seed, std::size_t k_max) {
  const auto ip = load(c.program);
  const auto criteria = parse_criteria(c.criteria);
  const auto initial = load_suite(c.suite, ip.program);
  const auto before = measure(ip, initial, criteria, c.jobs);

  RandomClosureConfig rconfig;
  rconfig.criteria = criteria;
  rconfig.budget = budget;
  rconfig.length = length;
  rconfig.seed = seed;
  rconfig.jobs = c.jobs;
  const auto random = random_closure(ip, initial, rconfig);
  const auto closure = close(ip, initial, closure_config(c, k_max, budget));

  const auto col = [](auto value) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << value;
    return s.str();
  };
  std::cout << "Logical budget: " << budget << " units (random: vectors of length " << length
            << ", seed " << seed << "; bmc: solver calls, k_max " << k_max << ")\n\n";
  std::cout << std::left << std::setw(26) << "" << std::right << std::setw(14) << "initial" << std::setw(14)
            << "random" << std::setw(14) << "bmc" << '\n';
  std::cout << std::left << std::setw(26) << "Generated test cases" << std::right << std::setw(14) << "-"
            << std::setw(14) << random.generated << std::setw(14) << closure.generated << '\n';
  std::cout << std::left << std::setw(26) << "  thereof non-redundant" << std::right << std::setw(14) << "-"
            << std::setw(14) << random.kept << std::setw(14) << closure.generated << '\n';
  std::cout << std::left << std::setw(26) << "Total test cases" << std::right << std::setw(14) << initial.size()
            << std::setw(14) << random.suite.size() << std::setw(14) << closure.suite.size() << '\n';
  for (Criterion cr : criteria) {
    const auto b = before.summary(cr).percent();
    const auto r = random.report.summary(cr).percent();
    const auto m = closure.report.summary(cr).percent();
    std::cout << std::left << std::setw(26) << (std::string(to_string(cr)) + " coverage") << std::right
              << std::setw(13) << col(b) << '%' << std::setw(13) << col(r) << '%' << std::setw(13) << col(m) << "%\n";
    std::cout << std::left << std::setw(26) << "  increase" << std::right << std::setw(14) << "" << std::setw(13)
              << col(r - b) << '%' << std::setw(13) << col(m - b) << "%\n";
    const auto eff = closure.report.summary(cr).effective_percent();
    if (eff != m) {
      std::cout << std::left << std::setw(26) << "  effective (bmc)" << std::right << std::setw(28) << ""
                << std::setw(13) << col(eff) << "%\n";
    }
  }
  return 0;
}

int cmd_seed_suite(const Common& c, std::size_t count, std::size_t length, std::uint64_t seed,
                   const std::string& output) {
  const auto ip = load(c.program);
  const auto suite = random_suite(ip.program, count, length, seed);
  if (output.empty() || output == "-") {
    write_suite(std::cout, suite, ip.program);
  } else {
    write_suite_file(output, suite, ip.program);
  }
  return 0;
}

void add_solver_flags(CLI::App* app, Common& c) {
  app->add_flag("--deterministic", c.deterministic, "Ignore wall-clock limits; budgets in solver conflicts only");
  app->add_option("--conflicts", c.conflicts, "Solver conflict limit per call")->capture_default_str();
  app->add_option("--time-limit", c.time_limit, "Seconds per solver call (ignored with --deterministic)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage measurement and closure for .mc control programs"};
  app.require_subcommand(1);
  Common c;
  std::string output;
  std::string json_path;
  std::string log_path;
  std::string goal_text;
  std::string query_text;
  std::string dimacs_path;
  std::size_t k = 0;
  std::size_t k_max = 3;
  std::size_t budget_units = 0;
  std::size_t length = 5;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  bool prove = false;
  bool infeasibility_last = false;

  auto add_program = [&](CLI::App* sub) { sub->add_option("program", c.program, "Program (.mc)")->required()->check(CLI::ExistingFile); };
  auto add_suite = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("suite", c.suite, "Test suite (JSON Lines)")->check(CLI::ExistingFile);
    if (required) opt->required();
  };
  auto add_criteria = [&](CLI::App* sub) {
    sub->add_option("--criteria", c.criteria, "function,statement,branch,mcdc")->capture_default_str();
  };
  auto add_jobs = [&](CLI::App* sub) { sub->add_option("--jobs,-j", c.jobs, "Worker threads")->capture_default_str(); };

  auto* instrument_cmd = app.add_subcommand("instrument", "Write the instrumentation point table (CSV)");
  add_program(instrument_cmd);
  instrument_cmd->add_option("-o,--output", output, "Output file (default stdout)");

  auto* run_cmd = app.add_subcommand("run", "Print the trace of every test");
  add_program(run_cmd);
  add_suite(run_cmd, true);

  auto* cover_cmd = app.add_subcommand("cover", "Coverage report; exit 0 iff 100% effective coverage");
  add_program(cover_cmd);
  add_suite(cover_cmd, true);
  add_criteria(cover_cmd);
  add_jobs(cover_cmd);
  cover_cmd->add_option("--json", json_path, "Also write the report as JSON");
  cover_cmd->add_flag("--prove-infeasible", prove, "Try to prove open goals infeasible");
  add_solver_flags(cover_cmd, c);

  auto* goals_cmd = app.add_subcommand("goals", "List goals with their queries");
  add_program(goals_cmd);
  add_criteria(goals_cmd);

  auto* generate_cmd = app.add_subcommand("generate", "Generate a vector for one goal or query");
  add_program(generate_cmd);
  generate_cmd->add_option("--goal", goal_text, "Goal id, e.g. s5, d4:true, c3, p4:t/2:f/3:t");
  generate_cmd->add_option("--query", query_text, "Query text");
  generate_cmd->add_option("-k", k, "Exact number of steps (default: 1..k-max)");
  generate_cmd->add_option("--k-max", k_max, "Largest k tried")->capture_default_str();
  generate_cmd->add_option("--suite", c.suite, "Suite whose observed evaluations complete MC/DC pairs")
      ->check(CLI::ExistingFile);
  generate_cmd->add_option("--dimacs", dimacs_path, "Write the CNF (requires -k)");
  add_solver_flags(generate_cmd, c);

  std::optional<std::size_t> close_budget;
  auto* close_cmd = app.add_subcommand("close", "Run the coverage closure loop");
  add_program(close_cmd);
  add_suite(close_cmd, false);
  add_criteria(close_cmd);
  add_jobs(close_cmd);
  close_cmd->add_option("--k-max", k_max, "Largest number of steps")->capture_default_str();
  close_cmd->add_option("--budget", close_budget, "Maximum solver calls");
  close_cmd->add_option("-o,--output", output, "Write the extended suite");
  close_cmd->add_option("--log", log_path, "Write one JSON record per goal attempt");
  close_cmd->add_flag("--infeasibility-last", infeasibility_last,
                      "Attempt infeasibility proofs only for goals still open after generation");
  add_solver_flags(close_cmd, c);
  close_cmd->add_flag("--no-group", c.no_group, "One goal per generated vector");

  auto* baseline_cmd = app.add_subcommand("baseline", "Random-search closure");
  add_program(baseline_cmd);
  add_suite(baseline_cmd, false);
  add_criteria(baseline_cmd);
  add_jobs(baseline_cmd);
  baseline_cmd->add_option("--budget", budget_units, "Number of random vectors")->required();
  baseline_cmd->add_option("--length", length, "Vector length")->capture_default_str();
  baseline_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  baseline_cmd->add_option("-o,--output", output, "Write the extended suite");

  auto* reduce_cmd = app.add_subcommand("reduce", "Greedy set-cover suite reduction");
  add_program(reduce_cmd);
  add_suite(reduce_cmd, true);
  add_criteria(reduce_cmd);
  reduce_cmd->add_option("-o,--output", output, "Output file (default stdout)");

  auto* experiment_cmd = app.add_subcommand("experiment", "Random search vs. closure with equal logical budgets");
  add_program(experiment_cmd);
  add_suite(experiment_cmd, false);
  add_criteria(experiment_cmd);
  add_jobs(experiment_cmd);
  experiment_cmd->add_option("--budget", budget_units, "Logical budget (vectors / solver calls)")->required();
  experiment_cmd->add_option("--length", length, "Random vector length")->capture_default_str();
  experiment_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  experiment_cmd->add_option("--k-max", k_max, "Largest number of steps")->capture_default_str();
  add_solver_flags(experiment_cmd, c);
  experiment_cmd->add_flag("--no-group", c.no_group, "One goal per generated vector");

  auto* seed_cmd = app.add_subcommand("seed-suite", "Write a suite of uniformly random tests");
  add_program(seed_cmd);
  seed_cmd->add_option("--count", count, "Number of tests")->capture_default_str();
  seed_cmd->add_option("--length", length, "Vector length")->capture_default_str();
  seed_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  seed_cmd->add_option("-o,--output", output, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*instrument_cmd) return cmd_instrument(c, output);
    if (*run_cmd) return cmd_run(c);
    if (*cover_cmd) return cmd_cover(c, json_path, prove);
    if (*goals_cmd) return cmd_goals(c);
    if (*generate_cmd) return cmd_generate(c, goal_text, query_text, k, k_max, dimacs_path);
    if (*close_cmd) return cmd_close(c, k_max, close_budget, output, log_path, infeasibility_last);
    if (*baseline_cmd) return cmd_baseline(c, budget_units, length, seed, output);
    if (*reduce_cmd) return cmd_reduce(c, output);
    if (*experiment_cmd) return cmd_experiment(c, budget_units, length, seed, k_max);
    if (*seed_cmd) return cmd_seed_suite(c, count, length, seed, output);
  } catch (const FrontendError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.format() << '\n';
    return 2;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const RevalidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
