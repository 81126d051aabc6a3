#pragma once

// Verification conditions C ∧ ¬P and their SMT-LIB v2 rendering.

#include <string>
#include <vector>

#include "pybmc/symex.hpp"

namespace pybmc {

struct Vc {
  std::vector<Expr> definitions;  // assignment equalities, trace order
  std::vector<Expr> assumptions;  // guard ⇒ condition, trace order
  Expr property;                  // guard ⇒ asserted condition
  std::vector<Expr> symbols;      // every symbol of the query, declaration order
  std::vector<Expr> inputs;       // symbols without a defining equation
  std::size_t step = 0;           // assertion step in the trace
  PropertyClass property_class = PropertyClass::UserAssertion;
  std::string text;
  SourceLocation loc;

  Expr constraints() const;  // C
  Expr query() const;        // C ∧ ¬P
};

// Trace positions of the assertion steps, in order.
std::vector<std::size_t> assertion_steps(const SsaTrace& trace);

// VC of the assertion_index-th assertion: C holds the definitions in the cone
// of influence of P and of the preceding assumptions.
Vc generate_vc(const SsaTrace& trace, std::size_t assertion_index);

// Solver-facing name of a versioned symbol: `base!version`.
std::string ssa_name(const Expr& symbol);
std::string smt_sort(const Sort& sort);
std::string smt_symbol(const Expr& symbol);

struct SmtScript {
  std::string declarations;  // declare-fun and define-fun lines
  std::string assertions;    // (assert ...) lines
};
// The query's declarations and assertions, without logic, check or model commands.
SmtScript smtlib_body(const Vc& vc);
// Complete standalone script ending in check-sat and get-value over the inputs.
std::string emit_smtlib(const Vc& vc);
std::string smt_logic(const Vc& vc);

}  // namespace pybmc
