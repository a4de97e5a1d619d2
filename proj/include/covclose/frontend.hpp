#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "covclose/ast.hpp"

namespace covclose {

struct Diagnostic {
  std::string file;
  SourceLoc loc;
  std::string message;

  /// `file:line:col: message`
  std::string format() const;
};

class FrontendError : public std::runtime_error {
 public:
  explicit FrontendError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Parses and checks a `.mc` program. Throws FrontendError with every
/// diagnostic found.
Program parse(std::string_view source, std::string file = "<input>");

/// Reads and parses a file.
Program parse_file(const std::string& path);

/// Resolves names and types, checks the call graph. Returns diagnostics
/// instead of throwing; `program` is annotated with variable slots.
std::vector<Diagnostic> check(Program& program);

/// Canonical source text. parse(pretty_print(p)) is structurally equal to p.
std::string pretty_print(const Program& program);
std::string pretty_print(const Expr& expr);

/// Replaces every `call` with the callee body until none remain. The
/// program must have passed check().
Program inline_calls(const Program& program);

bool contains_calls(const Program& program);

}  // namespace covclose
