#pragma once

// External SMT solver driver and the exhaustive enumeration oracle.

#include <map>
#include <string>
#include <vector>

#include "pybmc/vc.hpp"

namespace pybmc {

enum class SolverStatus { Sat, Unsat, Unknown, Timeout };

std::string_view solver_status_name(SolverStatus status);

// Model values keyed by ssa_name ("main@n!0").
using Model = std::map<std::string, Value>;

struct Verdict {
  SolverStatus status = SolverStatus::Unknown;
  Model model;
  std::string reason;
  double seconds = 0.0;
};

inline constexpr const char* kDefaultSolver = "z3 -in -smt2";

// Runs `solver_cmd` on the script; `inputs` are the symbols whose values are
// read back after `sat`.
Verdict solve_external(const std::string& script, const std::vector<Expr>& inputs, const std::string& solver_cmd,
                       double timeout_seconds);
Verdict solve_external(const Vc& vc, const std::string& solver_cmd, double timeout_seconds);

// One solver process for several VCs, each checked between push and pop.
std::vector<Verdict> solve_external_batch(const std::vector<Vc>& vcs, const std::string& solver_cmd,
                                          double timeout_seconds);

// Parses `(get-value ...)` output: `((|a!0| #x00000005) (|b!1| true))`.
Model parse_model(const std::string& text, const std::vector<Expr>& inputs);

// ---------------------------------------------------------------------------
// Oracle

struct InputDomain {
  Expr symbol;
  cpp_int lo;  // inclusive, in the signed or unsigned reading below
  cpp_int hi;
  bool is_signed = false;

  cpp_int size() const { return hi >= lo ? hi - lo + 1 : cpp_int(0); }
};

inline constexpr std::uint64_t kOracleDomainLimit = std::uint64_t{1} << 20;

// Domains of the VC's inputs narrowed by unconditional assumption bounds
// (comparisons of an input with a constant). Throws UnsupportedSortForOracle
// for floating-point inputs and DomainTooLarge above kOracleDomainLimit.
std::vector<InputDomain> oracle_domains(const Vc& vc);

// Enumerates input assignments in lexicographic order (first input most
// significant) and returns SAT with the first one satisfying C ∧ ¬P.
Verdict solve_oracle(const Vc& vc);
// Same search split across OpenMP threads; returns the same first witness.
Verdict solve_oracle_parallel(const Vc& vc, int threads = 0);

// Evaluates C ∧ ¬P under an input assignment (defined symbols are computed).
bool evaluate_query(const Vc& vc, const Model& inputs);

}  // namespace pybmc
