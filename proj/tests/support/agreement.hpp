#pragma once

// Cross-check of the enumeration oracle against the external solver.

#include <string>

#include "pybmc/solver.hpp"

namespace oracle {

struct Agreement {
  std::size_t checked = 0;     // VCs decided by both
  std::size_t skipped = 0;     // oracle domain too large or floating point
  std::size_t disagreements = 0;
  std::size_t bad_models = 0;  // SAT models that do not satisfy C ∧ ¬P
  std::size_t sat = 0;
  std::string first_problem;
  std::string first_skip;

  void merge(const Agreement& o);
  bool ok() const { return disagreements == 0 && bad_models == 0; }
};

// Solves `vc` both ways and re-evaluates every SAT model.
Agreement compare_solvers(const pybmc::Vc& vc, const std::string& solver_cmd, double timeout_seconds = 60.0);

}  // namespace oracle
