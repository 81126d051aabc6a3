#pragma once

#include <vector>

#include <json.hpp>

#include "pybmc/ast.hpp"
#include "pybmc/program.hpp"

namespace pybmc {

// Fills every missing annotation: plain assignments become AnnAssign nodes,
// parameters and return types get inferred annotations. Explicit annotations
// are kept as written. Throws on the first type error.
ast::ProgramUnit infer_and_annotate(ast::ProgramUnit unit, const TypingOptions& options = {});

// Consistency check of an annotated unit; empty when it is well typed.
std::vector<Diagnostic> check_types(const ast::ProgramUnit& unit, const TypingOptions& options = {});

// The main module in the dumper's JSON format.
nlohmann::json annotated_json(const ast::ProgramUnit& unit);

}  // namespace pybmc
