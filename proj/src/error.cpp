#include "pybmc/error.hpp"

namespace pybmc {

std::string SourceLocation::to_string() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  if (line > 0) {
    out += ":" + std::to_string(line);
    out += ":" + std::to_string(column);
  }
  return out;
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::MalformedAst: return "MalformedAst";
    case ErrorCode::ModuleNotFound: return "ModuleNotFound";
    case ErrorCode::ImportCycle: return "ImportCycle";
    case ErrorCode::FunctionNotFound: return "FunctionNotFound";
    case ErrorCode::TypeConflict: return "TypeConflict";
    case ErrorCode::UntypeableExpression: return "UntypeableExpression";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorCode::UnresolvedName: return "UnresolvedName";
    case ErrorCode::MemberNotFound: return "MemberNotFound";
    case ErrorCode::UnsupportedSort: return "UnsupportedSort";
    case ErrorCode::SolverCrashed: return "SolverCrashed";
    case ErrorCode::ModelParseError: return "ModelParseError";
    case ErrorCode::DomainTooLarge: return "DomainTooLarge";
    case ErrorCode::UnsupportedSortForOracle: return "UnsupportedSortForOracle";
    case ErrorCode::IncompleteModel: return "IncompleteModel";
    case ErrorCode::MissingExpectation: return "MissingExpectation";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

static std::string format_message(ErrorCode code, const std::string& message,
                                  const SourceLocation& location) {
  std::string out(error_code_name(code));
  if (location.valid()) out += " at " + location.to_string();
  out += ": " + message;
  return out;
}

Error::Error(ErrorCode code, std::string message, SourceLocation location)
    : std::runtime_error(format_message(code, message, location)),
      code_(code),
      location_(std::move(location)),
      detail_(std::move(message)) {}

bool is_frontend_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverCrashed:
    case ErrorCode::ModelParseError:
    case ErrorCode::IncompleteModel:
    case ErrorCode::DomainTooLarge:
    case ErrorCode::UnsupportedSortForOracle:
      return false;
    default:
      return true;
  }
}

}  // namespace pybmc
