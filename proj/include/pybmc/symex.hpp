#pragma once

// Symbolic execution of an unwound GOTO program into a guarded SSA trace.

#include <map>
#include <string>
#include <vector>

#include "pybmc/goto.hpp"

namespace pybmc {

enum class StepKind { Assignment, Phi, Assumption, Assertion };

struct SsaStep {
  StepKind kind = StepKind::Assignment;
  Expr guard;  // path condition under which the step executes
  Expr lhs;    // versioned symbol (assignments and phis)
  Expr rhs;    // null for nondeterministic inputs
  Expr cond;   // assumptions and assertions
  PropertyClass property = PropertyClass::UserAssertion;
  std::string text;
  SourceLocation loc;
  std::size_t goto_index = 0;
  int depth = 0;
  bool input = false;   // lhs is an unconstrained input
  bool hidden = false;  // synthetic: guard symbols, phis, anonymous inputs
  bool decl = false;    // default initialization of a local
};

struct SsaTrace {
  std::vector<SsaStep> steps;
  std::map<std::string, int> final_versions;
  std::vector<Expr> inputs;  // in creation order
  std::map<std::string, VerifierType> types;  // leaf types by unversioned name
};

SsaTrace execute(const GotoProgram& unwound);
// Constant propagation and folding; drops steps whose guard folds to false.
SsaTrace simplify(const SsaTrace& trace);

// One line per step: `guard ⊢ lhs := rhs  // file:line`.
std::string render_ssa(const SsaTrace& trace);

// Whether each versioned symbol is assigned at most once.
bool is_single_assignment(const SsaTrace& trace);

inline constexpr const char* kGuardSymbol = "$guard";
inline constexpr const char* kNondetSymbol = "$nondet";

}  // namespace pybmc
