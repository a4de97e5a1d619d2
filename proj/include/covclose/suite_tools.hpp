#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "covclose/coverage.hpp"
#include "covclose/suite.hpp"

namespace covclose {

/// Each input at each step drawn uniformly from its declared range.
TestVector random_vector(const Program& program, std::size_t length, std::mt19937_64& rng);
TestVector random_vector(const Program& program, std::size_t length, std::uint64_t seed);

/// `count` random tests named seed_0001, seed_0002, ...
TestSuite random_suite(const Program& program, std::size_t count, std::size_t length, std::uint64_t seed);

struct RandomClosureConfig {
  std::vector<Criterion> criteria{Criterion::Statement, Criterion::Branch, Criterion::Mcdc};
  std::size_t budget = 1000;  // vectors to generate
  std::size_t length = 5;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

struct RandomClosureResult {
  TestSuite suite;
  CoverageReport report;
  std::size_t generated = 0;
  std::size_t kept = 0;

  double redundancy() const {
    return generated == 0 ? 0.0 : static_cast<double>(generated - kept) / static_cast<double>(generated);
  }
};

/// Generate, measure, keep a vector only if it covers a new goal.
RandomClosureResult random_closure(const InstrumentedProgram& ip, TestSuite suite, const RandomClosureConfig& config);

/// Greedy set cover: repeatedly picks the set with the most uncovered
/// elements (earliest on ties) until nothing more can be covered. Returns
/// the picked indices in pick order.
template <class T>
std::vector<std::size_t> greedy_set_cover(std::span<const std::set<T>> sets) {
  std::set<T> universe;
  for (const auto& s : sets) universe.insert(s.begin(), s.end());
  std::vector<std::size_t> picked;
  std::vector<bool> used(sets.size(), false);
  while (!universe.empty()) {
    std::size_t best = sets.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (used[i]) continue;
      std::size_t gain = 0;
      for (const auto& x : sets[i]) gain += universe.count(x);
      if (gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    if (best == sets.size()) break;
    used[best] = true;
    picked.push_back(best);
    for (const auto& x : sets[best]) universe.erase(x);
  }
  return picked;
}

/// Smallest greedy subset (in original order) whose coverage equals the
/// full suite's on every goal of `criteria`. MC/DC pairs that only exist
/// across tests are restored after the set cover by adding tests (or test
/// pairs) with the largest marginal gain.
TestSuite reduce(const InstrumentedProgram& ip, const TestSuite& suite, std::span<const Criterion> criteria);

}  // namespace covclose
