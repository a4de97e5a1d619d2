#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "covclose/fql.hpp"
#include "covclose/instrument.hpp"
#include "covclose/interpreter.hpp"
#include "covclose/sat.hpp"

namespace covclose::testkit {

struct ProgramShape {
  int max_decisions = 3;
  int max_states = 2;
  /// Upper bound on the number of distinct input valuations per step.
  std::size_t max_step_space = 16;
  bool allow_loops = true;
  bool allow_division = true;
  bool allow_assume = true;
  bool allow_calls = true;
};

/// Source text of a random well-typed program with small input ranges.
std::string random_program_source(std::mt19937_64& rng, const ProgramShape& shape = {});

/// Every input valuation of one step, in lexicographic order.
std::vector<InputValuation> step_space(const Program& program);

/// Calls fn for every vector of exactly `length` steps.
void for_each_vector(const Program& program, std::size_t length, const std::function<void(const TestVector&)>& fn);

/// Naive substring regex semantics: some events[i..j) is in L(q).
bool regex_oracle(const fql::Query& q, std::span<const Event> events);

fql::Query random_query(std::mt19937_64& rng, PointId max_point, int depth);
std::vector<Event> random_events(std::mt19937_64& rng, PointId max_point, std::size_t max_length);

using Clause = std::vector<sat::Lit>;

/// Satisfiability of a CNF over `vars` variables by enumeration.
bool brute_force_sat(int vars, const std::vector<Clause>& clauses);

std::string data_path(const std::string& name);

}  // namespace covclose::testkit
