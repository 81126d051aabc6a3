#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pybmc {

struct SourceLocation {
  std::string file;
  int line = 0;
  int column = 0;

  bool valid() const { return line > 0; }
  bool operator==(const SourceLocation&) const = default;
  std::string to_string() const;
};

enum class ErrorCode {
  UnsupportedConstruct,
  MalformedAst,
  ModuleNotFound,
  ImportCycle,
  FunctionNotFound,
  TypeConflict,
  UntypeableExpression,
  UnknownName,
  DuplicateDefinition,
  UnresolvedName,
  MemberNotFound,
  UnsupportedSort,
  SolverCrashed,
  ModelParseError,
  DomainTooLarge,
  UnsupportedSortForOracle,
  IncompleteModel,
  MissingExpectation,
  InvalidConfig,
  Io,
  Internal,
};

std::string_view error_code_name(ErrorCode code);

// Every stage reports failures through this one exception type; the code
// decides the exit status and the location (when known) points at the input.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, SourceLocation location = {});

  ErrorCode code() const { return code_; }
  const SourceLocation& location() const { return location_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  SourceLocation location_;
  std::string detail_;
};

// Front-end errors (everything before the solver) map to exit code 2.
bool is_frontend_error(ErrorCode code);

}  // namespace pybmc
