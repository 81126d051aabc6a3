#pragma once

// End-to-end wiring of the verifier stages behind the command line.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pybmc/report.hpp"

namespace pybmc {

enum class OutputFormat { Text, Json };

struct RunConfig {
  std::string input;
  unsigned unwind = 1;
  std::optional<std::string> function;
  unsigned int_width = 32;
  bool overflow_check = false;
  bool unwinding_assertions = true;
  // External command line, or "oracle" for the enumeration oracle.
  std::string solver = kDefaultSolver;
  double timeout_seconds = 300.0;
  OutputFormat output = OutputFormat::Text;
  bool multi_property = false;

  bool parse_tree = false;
  bool dump_annotated = false;
  bool show_symbol_table = false;
  bool show_goto = false;
  bool show_ssa = false;
  std::optional<std::string> smt_lib_out;

  // Throws InvalidConfig when k or the timeout is out of range.
  void validate() const;
};

inline constexpr const char* kOracleSolver = "oracle";

// Everything the front and middle stages produce for one input.
struct Artifacts {
  std::unique_ptr<SymbolTable> symbols;
  GotoProgram program;  // instrumented, before unwinding
  GotoProgram unwound;
  SsaTrace trace;       // simplified
  std::vector<Vc> vcs;  // assertions left after simplification
  std::size_t vcs_total = 0;
};

// Runs every stage up to VC generation. Intermediates requested by the dump
// flags go to `dumps` when it is non-null. Stage errors propagate as Error.
Artifacts build_artifacts(const RunConfig& config, std::vector<StageTiming>* timings = nullptr,
                          std::ostream* dumps = nullptr);

// Complete verification, errors folded into the result.
VerificationResult verify(const RunConfig& config, std::ostream* dumps = nullptr);

// Verifies and prints the report; returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pybmc
