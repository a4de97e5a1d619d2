#include "covclose/suite_tools.hpp"

#include <algorithm>
#include <cstdio>

#include "covclose/parallel.hpp"

namespace covclose {

TestVector random_vector(const Program& program, std::size_t length, std::mt19937_64& rng) {
  TestVector v;
  v.steps.reserve(length);
  for (std::size_t step = 0; step < length; ++step) {
    InputValuation values;
    values.reserve(program.inputs.size());
    for (const auto& decl : program.inputs) {
      std::uniform_int_distribution<std::int32_t> dist(decl.lo, decl.hi);
      values.push_back(dist(rng));
    }
    v.steps.push_back(std::move(values));
  }
  return v;
}

TestVector random_vector(const Program& program, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_vector(program, length, rng);
}

TestSuite random_suite(const Program& program, std::size_t count, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TestSuite suite;
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "seed_%04zu", i + 1);
    suite.tests.push_back(TestCase{name, random_vector(program, length, rng), std::nullopt, std::nullopt});
  }
  return suite;
}

RandomClosureResult random_closure(const InstrumentedProgram& ip, TestSuite suite, const RandomClosureConfig& config) {
  CoverageTracker tracker(ip, config.criteria);
  {
    std::vector<Trace> traces(suite.size());
    parallel_for(suite.size(), config.jobs, [&](std::size_t i) { traces[i] = run(ip, suite.tests[i].vector); });
    for (std::size_t i = 0; i < suite.size(); ++i) tracker.add(traces[i], suite.tests[i].name);
  }
  RandomClosureResult result;
  std::mt19937_64 rng(config.seed);
  const std::size_t batch_size = std::max<std::size_t>(64, config.jobs);
  while (result.generated < config.budget) {
    const std::size_t n = std::min(batch_size, config.budget - result.generated);
    std::vector<TestVector> vectors;
    for (std::size_t i = 0; i < n; ++i) vectors.push_back(random_vector(ip.program, config.length, rng));
    std::vector<Trace> traces(n);
    parallel_for(n, config.jobs, [&](std::size_t i) { traces[i] = run(ip, vectors[i]); });
    for (std::size_t i = 0; i < n; ++i) {
      ++result.generated;
      if (tracker.preview(traces[i]).empty()) continue;
      TestCase tc{suite.unique_name("rand_" + std::to_string(result.generated)), std::move(vectors[i]), std::nullopt,
                  Provenance{"", "random seed=" + std::to_string(config.seed)}};
      tracker.add(traces[i], tc.name);
      suite.tests.push_back(std::move(tc));
      ++result.kept;
    }
  }
  result.suite = std::move(suite);
  result.report = std::move(tracker.report());
  return result;
}

namespace {

std::set<std::size_t> covered_set(const CoverageReport& report) {
  std::set<std::size_t> out;
  for (std::size_t g = 0; g < report.goals.size(); ++g) {
    if (report.is_covered(g)) out.insert(g);
  }
  return out;
}

std::size_t gain(const std::vector<std::size_t>& fresh, const std::set<std::size_t>& missing) {
  return static_cast<std::size_t>(
      std::count_if(fresh.begin(), fresh.end(), [&](std::size_t g) { return missing.count(g) != 0; }));
}

}  // namespace

TestSuite reduce(const InstrumentedProgram& ip, const TestSuite& suite, std::span<const Criterion> criteria) {
  std::vector<Trace> traces;
  traces.reserve(suite.size());
  for (const auto& t : suite.tests) traces.push_back(run(ip, t.vector));

  CoverageTracker full(ip, criteria);
  for (std::size_t i = 0; i < traces.size(); ++i) full.add(traces[i]);
  const std::set<std::size_t> target = covered_set(full.report());
  const auto& goals = full.report().goals;

  std::vector<std::set<std::size_t>> standalone;
  for (const auto& trace : traces) {
    std::set<std::size_t> s;
    for (std::size_t g : covered_goals(ip, trace, goals)) {
      if (target.count(g) != 0) s.insert(g);
    }
    standalone.push_back(std::move(s));
  }
  std::vector<std::size_t> picked = greedy_set_cover<std::size_t>(standalone);
  std::vector<bool> used(suite.size(), false);

  CoverageTracker kept(ip, criteria);
  for (std::size_t i : picked) {
    used[i] = true;
    kept.add(traces[i]);
  }
  auto missing_goals = [&] {
    std::set<std::size_t> missing;
    for (std::size_t g : target) {
      if (!kept.report().is_covered(g)) missing.insert(g);
    }
    return missing;
  };
  for (auto missing = missing_goals(); !missing.empty(); missing = missing_goals()) {
    std::size_t best = suite.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
      if (used[i]) continue;
      const std::size_t g = gain(kept.preview(traces[i]), missing);
      if (g > best_gain) {
        best = i;
        best_gain = g;
      }
    }
    if (best != suite.size()) {
      used[best] = true;
      kept.add(traces[best]);
      continue;
    }
    // Pairs split across two unused tests.
    std::pair<std::size_t, std::size_t> best_pair{suite.size(), suite.size()};
    for (std::size_t i = 0; i < suite.size() && best_pair.first == suite.size(); ++i) {
      if (used[i]) continue;
      CoverageTracker trial = kept;
      trial.add(traces[i]);
      for (std::size_t j = i + 1; j < suite.size(); ++j) {
        if (!used[j] && gain(trial.preview(traces[j]), missing) > 0) {
          best_pair = {i, j};
          break;
        }
      }
    }
    if (best_pair.first == suite.size()) {
      for (std::size_t i = 0; i < suite.size(); ++i) {
        if (!used[i]) {
          used[i] = true;
          kept.add(traces[i]);
        }
      }
      break;
    }
    for (std::size_t i : {best_pair.first, best_pair.second}) {
      used[i] = true;
      kept.add(traces[i]);
    }
  }

  TestSuite reduced;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    if (used[i]) reduced.tests.push_back(suite.tests[i]);
  }
  return reduced;
}

}  // namespace covclose
