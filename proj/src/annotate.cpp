#include "pybmc/annotate.hpp"

namespace pybmc {

ast::ProgramUnit infer_and_annotate(ast::ProgramUnit unit, const TypingOptions& options) {
  {
    ProgramModel model(unit, options);
    model.annotate(false);
  }
  return unit;
}

std::vector<Diagnostic> check_types(const ast::ProgramUnit& unit, const TypingOptions& options) {
  ast::ProgramUnit copy = unit;
  try {
    ProgramModel model(copy, options);
    model.annotate(true);
    return model.diagnostics();
  } catch (const Error& e) {
    return {Diagnostic{e.code(), e.detail(), e.location()}};
  }
}

nlohmann::json annotated_json(const ast::ProgramUnit& unit) { return ast::to_json(unit.main_module.root); }

}  // namespace pybmc
