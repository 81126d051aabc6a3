#pragma once

// Counterexample reconstruction and the textual / JSON verdict reports.

#include <string>
#include <vector>

#include <json.hpp>

#include "pybmc/solver.hpp"

namespace pybmc {

struct TraceAssignment {
  std::string name;     // display name, e.g. "n" or "p.x"
  std::string decimal;  // "5", "-3", "True", "1.5"
  std::string binary;   // bytes separated by spaces
};

struct CounterexampleState {
  int ordinal = 0;
  SourceLocation loc;
  int thread = 0;
  std::vector<TraceAssignment> assignments;
};

struct Violation {
  PropertyClass property_class = PropertyClass::UserAssertion;
  std::string text;
  SourceLocation loc;
  int ordinal = 0;
  std::vector<CounterexampleState> states;
  Model model;
};

enum class Outcome { Successful, Failed, Unknown, Error };

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct VerificationResult {
  Outcome outcome = Outcome::Successful;
  std::vector<Violation> violations;
  std::string source_name;
  std::string diagnostic;  // errors and unknown verdicts
  std::optional<ErrorCode> error;
  SourceLocation error_location;
  std::vector<StageTiming> timings;
  std::size_t vcs_total = 0;
  std::size_t vcs_checked = 0;
  std::string solver;
};

// Replays the trace under the model up to the violated assertion at trace
// position `assertion_step`. Printed states are the nondeterministic inputs
// on the counterexample path; ordinals count every executed top-level step,
// so the violated assertion's ordinal is one past the last counted step.
// Inputs outside the model default to zero unless listed in `required`.
Violation build_trace(const Model& model, const SsaTrace& trace, std::size_t assertion_step,
                      const std::vector<Expr>& required = {});

// Values of every versioned symbol after replaying the whole trace prefix.
std::map<std::string, Value> replay(const Model& model, const SsaTrace& trace, std::size_t upto);

int exit_code(const VerificationResult& result);
std::string render_text(const VerificationResult& result);
nlohmann::json render_json(const VerificationResult& result);

inline constexpr const char* kVersion = "0.4.0";

}  // namespace pybmc
