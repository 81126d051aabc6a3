#pragma once

// Typed view over the JSON AST produced by the host interpreter's `ast`
// module, restricted to the statically-typed subset the verifier accepts.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pybmc/error.hpp"

namespace pybmc::ast {

enum class NodeKind {
  Module,
  FunctionDef,
  ClassDef,
  AnnAssign,
  Assign,
  AugAssign,
  If,
  While,
  For,
  Return,
  Expr,
  Pass,
  Break,
  Continue,
  Assert,
  Import,
  ImportFrom,
  Call,
  Name,
  Attribute,
  Constant,
  BinOp,
  BoolOp,
  UnaryOp,
  Compare,
  IfExp,
  Subscript,
  List,
  Arguments,
  Arg,
  Keyword,
  Alias,
  Operator,
};

std::string_view node_kind_name(NodeKind kind);

// Leaf field values. Integers keep their decimal text so literals wider than
// 64 bits survive until the type of the literal is known.
struct Scalar {
  enum class Kind { Null, Bool, Int, Float, String };
  Kind kind = Kind::Null;
  bool boolean = false;
  double real = 0.0;
  std::string text;

  static Scalar null() { return {}; }
  static Scalar from_bool(bool value);
  static Scalar from_int(std::string decimal);
  static Scalar from_float(double value);
  static Scalar from_string(std::string value);

  bool operator==(const Scalar&) const = default;
};

struct AstNode;

struct ChildField {
  bool is_list = false;
  std::vector<AstNode> nodes;

  bool operator==(const ChildField&) const = default;
};

struct AstNode {
  NodeKind kind = NodeKind::Module;
  // The host AST class name; for Operator nodes this is the operator
  // ("Add", "FloorDiv", "Eq", ...).
  std::string type_name = "Module";
  SourceLocation loc;
  int end_line = 0;
  int end_column = 0;
  std::map<std::string, ChildField> children;
  std::map<std::string, Scalar> scalars;

  const AstNode* child(std::string_view field) const;
  AstNode* child(std::string_view field);
  const std::vector<AstNode>& list(std::string_view field) const;
  std::vector<AstNode>& list(std::string_view field);
  const Scalar* scalar(std::string_view field) const;
  // String-valued scalar; empty when absent or null.
  std::string str(std::string_view field) const;

  void set_child(const std::string& field, AstNode node);
  void set_list(const std::string& field, std::vector<AstNode> nodes);
  void set_scalar(const std::string& field, Scalar value);
  void erase(const std::string& field);

  bool is(NodeKind k) const { return kind == k; }
  bool operator==(const AstNode&) const = default;
};

// Node builders used by the annotator and entry-point synthesis.
AstNode make_node(NodeKind kind, std::string type_name, const SourceLocation& loc);
AstNode make_name(const std::string& id, const SourceLocation& loc);
AstNode make_call(AstNode func, std::vector<AstNode> args, const SourceLocation& loc);
AstNode make_int_constant(const std::string& decimal, const SourceLocation& loc);

// Deserialize one document. `file` is recorded in every node location.
AstNode load_ast(const nlohmann::json& doc, const std::string& file);
AstNode load_ast_file(const std::string& json_path, const std::string& source_name);

// Re-serialize in the dumper's format (sorted keys, location attributes).
nlohmann::json to_json(const AstNode& node);

std::size_t count_nodes(const AstNode& node);

// Python source text of an expression (and of simple statements).
std::string unparse(const AstNode& node);

// Python versions whose AST shape this loader was tested against.
inline constexpr int kMinPythonMinor = 9;
inline constexpr int kMaxPythonMinor = 13;

struct ModuleAst {
  std::string name;
  std::string path;         // JSON document the module was loaded from
  std::string source_name;  // file name shown in traces, e.g. "main.py"
  AstNode root;
};

struct ProgramUnit {
  ModuleAst main_module;
  // Dependencies first: every module appears after the modules it imports.
  std::vector<ModuleAst> imported_modules;
  std::string source_path;
  std::optional<std::string> isolated_function;

  const ModuleAst* find_module(std::string_view name) const;
  std::vector<const ModuleAst*> all_modules() const;  // imports, then main
};

// Load the main module from a JSON AST, or from Python source when an AST
// dumper executable (`ast-dump`, or $PYBMC_AST_DUMP) is available.
ProgramUnit load_program(const std::string& path);

// Resolve `import m` / `from m import f` against `m.json` (or `m.py`) in
// search_dir, recursively.
ProgramUnit resolve_imports(ProgramUnit unit, const std::string& search_dir);

// `name` is either a top-level function or `Class.method`.
ProgramUnit isolate_function(ProgramUnit unit, const std::string& name);

std::string render_parse_tree(const ProgramUnit& unit);
std::string render_parse_tree(const AstNode& node);

// Module names that are accepted in imports but carry no definitions.
bool is_ignored_module(std::string_view name);

}  // namespace pybmc::ast
