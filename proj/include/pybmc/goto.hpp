#pragma once

// GOTO programs: per-function instruction lists with guarded jumps, the
// property instrumentation pass, loop/recursion unwinding and a concrete
// reference interpreter.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pybmc/expr.hpp"
#include "pybmc/symtab.hpp"

namespace pybmc {

enum class InstrKind { Decl, Assign, Assume, Assert, Goto, Skip, FunctionCall, End };

enum class PropertyClass { UserAssertion, DivisionByZero, Overflow, Bounds, Unwinding };

std::string_view instr_kind_name(InstrKind kind);
// "user-assertion", "division-by-zero", ...
std::string_view property_class_name(PropertyClass cls);
// Wording of the counterexample report: "assertion", "division by zero", ...
std::string_view property_class_words(PropertyClass cls);

// A safety condition attached to the instruction that evaluates the
// operation; instrumentation turns enabled ones into assertions.
struct Check {
  PropertyClass cls = PropertyClass::UserAssertion;
  Expr condition;
  std::string text;
  SourceLocation loc;
};

struct CallSite {
  std::string callee;
  std::vector<Expr> args;     // one value per callee parameter leaf
  std::vector<Expr> results;  // symbols receiving the return leaves
  std::vector<Expr> outs;     // per parameter leaf: caller symbol written back after the call, or null
};

struct Instruction {
  InstrKind kind = InstrKind::Skip;
  Expr lhs;   // Decl, Assign
  Expr expr;  // Assign value; Assume/Assert condition; Goto guard (null when unconditional)
  std::size_t target = 0;
  PropertyClass property = PropertyClass::UserAssertion;
  std::string text;  // assertion text
  std::shared_ptr<const CallSite> call;
  std::vector<Check> checks;
  SourceLocation loc;
  bool loop_exit = false;  // conditional exit of the enclosing loop
  int depth = 0;           // inlining depth, 0 for the entry function
  std::string function;    // function the instruction was lowered from
};

struct GotoFunction {
  std::string name;
  std::vector<Expr> params;   // parameter leaf symbols in order
  std::vector<Expr> returns;  // return-value leaf symbols
  std::vector<Instruction> body;
};

struct GotoProgram {
  std::map<std::string, GotoFunction> functions;
  std::vector<std::string> order;
  std::string entry;
  std::optional<unsigned> unwound;  // bound k once unwinding has run
  // Scalar type of every leaf symbol, for signedness and display.
  std::map<std::string, VerifierType> leaf_types;

  const GotoFunction& entry_function() const { return functions.at(entry); }
};

struct CheckOptions {
  bool overflow = false;
};

GotoProgram lower_to_goto(SymbolTable& st);
GotoProgram instrument_properties(const GotoProgram& gp, const CheckOptions& options);
// Duplicates every loop body k times and inlines calls up to k active frames
// per function; the residual iteration or call becomes an unwinding
// assertion (or assumption when `unwinding_assertions` is false).
GotoProgram unwind(const GotoProgram& gp, unsigned k, bool unwinding_assertions);

std::string render_goto(const GotoProgram& gp);

// Jump graph checks. A back edge is a jump to an earlier or equal index.
bool has_back_edge(const GotoFunction& fn);
// Topological sort of the jump graph (fall-through and jump edges).
bool is_acyclic(const GotoFunction& fn);
std::size_t count_assertions(const GotoProgram& gp, PropertyClass cls);

// Display name of a leaf symbol: the last component ("main@p.x" -> "p.x").
std::string display_name(const std::string& symbol);
// Temporaries and synthetic variables contain '$' in their last component.
bool is_user_variable(const std::string& symbol);

// Concrete execution with real calls and loops. Nondet values come from
// `input`, called in execution order.
struct ConcreteRun {
  enum class Status { Completed, AssertionFailed, AssumptionFailed, StepLimit };
  Status status = Status::Completed;
  const Instruction* failed = nullptr;
  std::map<std::string, Value> state;
  std::size_t steps = 0;
  // Executions per (function, instruction index).
  std::map<std::pair<std::string, std::size_t>, std::size_t> visits;
};
using InputSource = std::function<Value(const Sort& sort, std::size_t ordinal)>;
ConcreteRun run_concrete(const GotoProgram& gp, const InputSource& input, std::size_t step_limit = 1000000);

Value zero_value(const Sort& sort);
Sort sort_of(const VerifierType& type);

}  // namespace pybmc
