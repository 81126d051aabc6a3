#include <doctest.h>

#include <fstream>
#include <functional>

#include "fixtures.hpp"
#include "pybmc/annotate.hpp"
#include "pybmc/ast.hpp"
#include "pybmc/types.hpp"

using namespace pybmc;
using fixtures::suite_test;

namespace {

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Internal;
}

nlohmann::json load_doc(const std::filesystem::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("suite documents load and re-serialize losslessly") {
  for (const auto& c : fixtures::suite_cases()) {
    CAPTURE(c.test.input);
    const ast::AstNode root = ast::load_ast_file(c.test.input, "main.py");
    CHECK(root.is(ast::NodeKind::Module));
    CHECK(ast::load_ast(ast::to_json(root), "main.py") == root);
    CHECK(ast::count_nodes(root) > 1);
  }
}

TEST_CASE("locations come from the document") {
  const auto root = ast::load_ast_file(suite_test("functions", "factorial_fails").string(), "main.py");
  const auto& body = root.list("body");
  REQUIRE(body.size() == 5);
  CHECK(body[0].is(ast::NodeKind::FunctionDef));
  CHECK(body[0].loc.line == 1);
  CHECK(body[4].is(ast::NodeKind::Assert));
  CHECK(body[4].loc.line == 10);
  CHECK(ast::unparse(*body[4].child("test")) == "result != 120");
}

TEST_CASE("malformed documents are rejected") {
  CHECK(error_of([] { ast::load_ast(nlohmann::json::array(), "x.py"); }) == ErrorCode::MalformedAst);
  CHECK(error_of([] { ast::load_ast(nlohmann::json{{"body", nlohmann::json::array()}}, "x.py"); }) ==
        ErrorCode::MalformedAst);
  auto doc = load_doc(suite_test("functions", "factorial_fails"));
  doc["body"][0].erase("name");
  CHECK(error_of([&] { ast::load_ast(doc, "x.py"); }) == ErrorCode::MalformedAst);
}

TEST_CASE("constructs outside the subset are rejected") {
  auto doc = load_doc(suite_test("functions", "factorial_fails"));
  doc["body"][4]["_type"] = "Raise";
  CHECK(error_of([&] { ast::load_ast(doc, "x.py"); }) == ErrorCode::UnsupportedConstruct);
}

TEST_CASE("missing input files and functions") {
  CHECK(error_of([] { ast::load_program("/nonexistent/main.json"); }) == ErrorCode::Io);
  auto unit = ast::load_program(suite_test("functions", "factorial_fails").string());
  CHECK(error_of([&] { ast::isolate_function(unit, "nope"); }) == ErrorCode::FunctionNotFound);
  CHECK(ast::isolate_function(unit, "factorial").isolated_function == "factorial");
}

TEST_CASE("imports resolve next to the main module") {
  const auto p = suite_test("imports", "module_function");
  auto unit = ast::resolve_imports(ast::load_program(p.string()), p.parent_path().string());
  CHECK(unit.imported_modules.size() == 1);
  CHECK(unit.all_modules().back() == &unit.main_module);
}

TEST_CASE("fixed-width type names") {
  CHECK(builtin_type_named("int", 32) == VerifierType::integer(32, true));
  CHECK(builtin_type_named("int", 64) == VerifierType::integer(64, true));
  CHECK(builtin_type_named("uint64", 32) == VerifierType::integer(64, false));
  CHECK(builtin_type_named("int256", 32) == VerifierType::integer(256, true));
  CHECK_FALSE(builtin_type_named("uint8", 32).has_value());
  CHECK_FALSE(builtin_type_named("int7", 32).has_value());
  CHECK(is_valid_int_width(128));
  CHECK_FALSE(is_valid_int_width(16));
}

TEST_CASE("inference annotates every assignment and the result type checks") {
  for (const auto& c : fixtures::suite_cases()) {
    CAPTURE(c.test.input);
    auto unit = ast::resolve_imports(ast::load_program(c.test.input),
                                     std::filesystem::path(c.test.input).parent_path().string());
    const auto annotated = infer_and_annotate(std::move(unit), TypingOptions{c.config.int_width});
    CHECK(check_types(annotated).empty());
    int plain = 0;
    std::function<void(const ast::AstNode&)> walk = [&](const ast::AstNode& n) {
      // Attribute and subscript targets keep Assign; names become AnnAssign.
      if (n.is(ast::NodeKind::Assign)) {
        for (const auto& t : n.list("targets")) plain += t.is(ast::NodeKind::Name);
      }
      for (const auto& [f, child] : n.children) {
        for (const auto& k : child.nodes) walk(k);
      }
    };
    walk(annotated.main_module.root);
    CHECK(plain == 0);
  }
}
