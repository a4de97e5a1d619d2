#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "covclose/ast.hpp"
#include "covclose/interpreter.hpp"

namespace covclose {

/// Where a generated test came from.
struct Provenance {
  std::string goal;
  std::string annotation;

  bool operator==(const Provenance&) const = default;
};

/// A test vector plus the requirement-derived expected outcome. Generated
/// cases leave `expected` unset: a human has to supply it.
struct TestCase {
  std::string name;
  TestVector vector;
  std::optional<std::string> expected;  // JSON text, kept verbatim
  std::optional<Provenance> provenance;

  bool operator==(const TestCase&) const = default;
};

struct TestSuite {
  std::vector<TestCase> tests;

  std::size_t size() const { return tests.size(); }
  bool empty() const { return tests.empty(); }
  bool contains_name(const std::string& name) const;
  /// `base`, or `base_2`, `base_3`, ... if taken.
  std::string unique_name(const std::string& base) const;
};

bool has_unset_expectations(const TestSuite& suite);

class SuiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON Lines: one object per test,
/// {"name":..,"steps":[{"in":v,..},..],"expected":null|<json>,"generated":{"goal":..,"annotation":..}}
/// Blank lines and lines starting with '#' are skipped.
TestSuite read_suite(std::istream& in, const Program& program);
TestSuite read_suite_file(const std::string& path, const Program& program);

void write_suite(std::ostream& out, const TestSuite& suite, const Program& program);
void write_suite_file(const std::string& path, const TestSuite& suite, const Program& program);

}  // namespace covclose
