#include "covclose/suite.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace covclose {

using nlohmann::json;

bool TestSuite::contains_name(const std::string& name) const {
  return std::any_of(tests.begin(), tests.end(), [&](const TestCase& t) { return t.name == name; });
}

std::string TestSuite::unique_name(const std::string& base) const {
  if (!contains_name(base)) return base;
  for (int n = 2;; ++n) {
    std::string candidate = base + "_" + std::to_string(n);
    if (!contains_name(candidate)) return candidate;
  }
}

bool has_unset_expectations(const TestSuite& suite) {
  return std::any_of(suite.tests.begin(), suite.tests.end(), [](const TestCase& t) { return !t.expected; });
}

namespace {

std::int32_t read_value(const json& v, const InputDecl& decl, const std::string& where) {
  if (decl.type == Type::Bool) {
    if (!v.is_boolean()) throw SuiteError(where + ": input '" + decl.name + "' expects true/false");
    return v.get<bool>() ? 1 : 0;
  }
  if (!v.is_number_integer()) throw SuiteError(where + ": input '" + decl.name + "' expects a decimal integer");
  if (v.is_number_unsigned() &&
      (decl.hi < 0 || v.get<std::uint64_t>() > static_cast<std::uint64_t>(decl.hi))) {
    throw SuiteError(where + ": value " + v.dump() + " for input '" + decl.name + "' out of range");
  }
  const auto raw = v.get<std::int64_t>();
  if (raw < decl.lo || raw > decl.hi) {
    throw SuiteError(where + ": value " + std::to_string(raw) + " for input '" + decl.name + "' outside [" +
                     std::to_string(decl.lo) + ", " + std::to_string(decl.hi) + "]");
  }
  return static_cast<std::int32_t>(raw);
}

TestCase read_case(const json& record, const Program& program, const std::string& where) {
  if (!record.is_object()) throw SuiteError(where + ": expected a JSON object");
  TestCase tc;
  if (!record.contains("name") || !record["name"].is_string()) throw SuiteError(where + ": missing string 'name'");
  tc.name = record["name"].get<std::string>();
  if (!record.contains("steps") || !record["steps"].is_array() || record["steps"].empty()) {
    throw SuiteError(where + ": 'steps' must be a non-empty array");
  }
  for (const auto& step : record["steps"]) {
    if (!step.is_object()) throw SuiteError(where + ": every step must be an object");
    InputValuation values;
    values.reserve(program.inputs.size());
    for (const auto& decl : program.inputs) {
      auto it = step.find(decl.name);
      if (it == step.end()) throw SuiteError(where + ": step is missing input '" + decl.name + "'");
      values.push_back(read_value(*it, decl, where));
    }
    if (step.size() != program.inputs.size()) {
      for (const auto& [key, value] : step.items()) {
        const bool known = std::any_of(program.inputs.begin(), program.inputs.end(),
                                       [&](const InputDecl& d) { return d.name == key; });
        if (!known) throw SuiteError(where + ": unknown input '" + key + "'");
      }
    }
    tc.vector.steps.push_back(std::move(values));
  }
  if (auto it = record.find("expected"); it != record.end() && !it->is_null()) tc.expected = it->dump();
  if (auto it = record.find("generated"); it != record.end() && !it->is_null()) {
    Provenance p;
    p.goal = it->value("goal", "");
    p.annotation = it->value("annotation", "");
    tc.provenance = std::move(p);
  }
  return tc;
}

}  // namespace

TestSuite read_suite(std::istream& in, const Program& program) {
  TestSuite suite;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = "line " + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SuiteError(where + ": " + e.what());
    }
    TestCase tc = read_case(record, program, where);
    if (suite.contains_name(tc.name)) throw SuiteError(where + ": duplicate test name '" + tc.name + "'");
    suite.tests.push_back(std::move(tc));
  }
  return suite;
}

TestSuite read_suite_file(const std::string& path, const Program& program) {
  std::ifstream in(path);
  if (!in) throw SuiteError("cannot open suite file '" + path + "'");
  try {
    return read_suite(in, program);
  } catch (const SuiteError& e) {
    throw SuiteError(path + ": " + e.what());
  }
}

void write_suite(std::ostream& out, const TestSuite& suite, const Program& program) {
  for (const auto& tc : suite.tests) {
    // ordered_json keeps the record layout stable for diffs
    nlohmann::ordered_json record;
    record["name"] = tc.name;
    auto steps = nlohmann::ordered_json::array();
    for (const auto& values : tc.vector.steps) {
      nlohmann::ordered_json step = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < program.inputs.size(); ++i) {
        if (program.inputs[i].type == Type::Bool) {
          step[program.inputs[i].name] = values.at(i) != 0;
        } else {
          step[program.inputs[i].name] = values.at(i);
        }
      }
      steps.push_back(std::move(step));
    }
    record["steps"] = std::move(steps);
    record["expected"] = tc.expected ? nlohmann::ordered_json::parse(*tc.expected) : nlohmann::ordered_json();
    if (tc.provenance) {
      record["generated"] = {{"goal", tc.provenance->goal}, {"annotation", tc.provenance->annotation}};
    }
    out << record.dump() << '\n';
  }
}

void write_suite_file(const std::string& path, const TestSuite& suite, const Program& program) {
  std::ofstream out(path);
  if (!out) throw SuiteError("cannot write suite file '" + path + "'");
  write_suite(out, suite, program);
}

}  // namespace covclose
