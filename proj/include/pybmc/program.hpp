#pragma once

// Declarations, scopes and static typing of a loaded program. The annotator
// runs this model in inference mode; the symbol table re-runs it on the
// annotated program, where every declaration already carries its type, and
// keeps it for lowering.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pybmc/ast.hpp"
#include "pybmc/types.hpp"

namespace pybmc {

struct TypingOptions {
  unsigned int_width = 32;
};

struct Diagnostic {
  ErrorCode code;
  std::string message;
  SourceLocation loc;
};

struct ParamInfo {
  std::string name;
  std::optional<VerifierType> type;
  const ast::AstNode* default_value = nullptr;
  SourceLocation loc;
};

struct FunctionInfo {
  enum class State { Pending, InProgress, Done };

  std::string qualified;    // main@factorial, main@Point@move, main@$top
  std::string name;         // short name
  std::string module;
  std::string owner_class;  // qualified class for methods
  ast::AstNode* def = nullptr;
  std::vector<ast::AstNode*> body;
  std::vector<ParamInfo> params;
  std::optional<VerifierType> result;
  std::set<std::string> local_names;
  std::map<std::string, VerifierType> locals;
  // Zero-argument functions executed before the body (module initializers).
  std::vector<std::string> prelude;
  bool is_module_top = false;  // assignments bind module globals
  bool synthetic = false;
  State state = State::Pending;
  SourceLocation loc;

  bool is_method() const { return !owner_class.empty(); }
};

struct AttributeInfo {
  std::string name;
  VerifierType type = VerifierType::none();
  std::string owner;  // qualified class declaring it
  bool class_level = false;
  const ast::AstNode* value = nullptr;  // class-level initializer
  SourceLocation loc;
};

struct ClassInfo {
  std::string qualified;
  std::string name;
  std::string module;
  ast::AstNode* def = nullptr;
  std::vector<std::string> bases;  // qualified, in source order
  std::vector<std::string> methods;
  std::map<std::string, std::string> method_qualified;
  std::vector<AttributeInfo> attributes;  // own, in discovery order
  int tag = 0;
  SourceLocation loc;

  const AttributeInfo* own_attribute(const std::string& name) const;
};

struct ModuleInfo {
  std::string name;
  std::string source_name;
  ast::AstNode* root = nullptr;
  std::map<std::string, std::string> functions;  // short -> qualified
  std::map<std::string, std::string> classes;
  std::set<std::string> global_names;
  std::map<std::string, VerifierType> globals;
  std::map<std::string, std::string> module_aliases;  // local alias -> module
  std::map<std::string, std::pair<std::string, std::string>> from_imports;  // alias -> (module, member)
  std::string top_function;
};

struct Resolution {
  enum class Kind { Variable, Function, Class, Module, Builtin };
  Kind kind;
  std::string qualified;  // variable symbol, function, class or module name
  std::optional<VerifierType> type;  // variables only
};

// Field path and scalar type of every leaf of an aggregate.
struct Leaf {
  std::string path;  // ".x", "[2]", "[0].y", "" for scalars
  VerifierType type;
};

inline constexpr const char* kClassTagField = "$class";

class ProgramModel {
 public:
  ProgramModel(ast::ProgramUnit& unit, TypingOptions options);
  ProgramModel(const ProgramModel&) = delete;
  ProgramModel& operator=(const ProgramModel&) = delete;

  // Types every statement, filling missing annotations in place. In collect
  // mode errors become diagnostics and typing continues with the next statement.
  void annotate(bool collect_diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

  const TypingOptions& options() const { return options_; }
  ast::ProgramUnit& unit() { return unit_; }

  FunctionInfo* function(const std::string& qualified);
  const FunctionInfo* function(const std::string& qualified) const;
  const ClassInfo* klass(const std::string& qualified) const;
  ClassInfo* klass(const std::string& qualified);
  const ModuleInfo* module(const std::string& name) const;
  const std::vector<std::string>& function_order() const { return function_order_; }
  const std::vector<std::string>& class_order() const { return class_order_; }
  const std::vector<std::string>& module_order() const { return module_order_; }

  FunctionInfo& add_function(FunctionInfo info);
  // Qualified function named by the unit's isolation request, if any.
  std::optional<std::string> isolated_target() const;
  // Under isolation, the main module's top-level assignments that retained
  // code depends on, in source order.
  std::vector<ast::AstNode*> initializer_statements() const;
  void annotate_function(const std::string& qualified);

  Resolution resolve_name(const std::string& id, const FunctionInfo& scope,
                          const SourceLocation& loc) const;
  std::optional<Resolution> try_resolve_name(const std::string& id, const FunctionInfo& scope) const;
  // Qualified variable symbol a Name denotes in `scope`, if it is a variable.
  std::optional<std::string> variable_symbol(const std::string& id, const FunctionInfo& scope) const;

  VerifierType type_of(const ast::AstNode& expr, FunctionInfo& scope);
  // Operand type of a binary arithmetic/comparison after literal adaptation
  // and int->float widening.
  VerifierType operand_type(const ast::AstNode& left, const ast::AstNode& right, FunctionInfo& scope);
  VerifierType parse_annotation(const ast::AstNode& annotation, const std::string& module) const;
  ast::AstNode annotation_node(const VerifierType& type, const std::string& module,
                               const SourceLocation& loc) const;

  // Depth-first, left-to-right search over the ordered base lists.
  std::vector<std::string> mro(const std::string& cls) const;
  std::optional<std::string> find_method(const std::string& cls, const std::string& name) const;
  std::optional<AttributeInfo> find_attribute(const std::string& cls, const std::string& name) const;
  std::vector<std::string> descendants(const std::string& cls) const;
  bool is_subclass(const std::string& derived, const std::string& base) const;
  // Record fields of a value whose static type is `cls`: the class tag, then
  // the attributes of the class, its bases and its subclasses.
  std::vector<AttributeInfo> record_layout(const std::string& cls) const;
  std::vector<Leaf> leaves(const VerifierType& type) const;

  // Function called by a Call node (user function, method via static type,
  // constructor's __init__) or nullopt for builtins.
  struct CallTarget {
    enum class Kind { Function, Method, Constructor, Builtin } kind;
    std::string function;  // qualified function (empty for builtins / no __init__)
    std::string klass;     // constructors and methods: static class
    std::string builtin;
    const ast::AstNode* receiver = nullptr;  // bound method receiver
    bool explicit_self = false;             // Class.method(obj, ...)
  };
  CallTarget call_target(const ast::AstNode& call, FunctionInfo& scope);
  // Arguments in parameter order after keyword matching and defaults;
  // excludes the implicit receiver.
  std::vector<const ast::AstNode*> bind_arguments(const ast::AstNode& call, const FunctionInfo& callee,
                                                  bool skip_self);

  static bool is_int_literal(const ast::AstNode& expr);
  static bool is_builtin(const std::string& name);

 private:
  void collect_module(ModuleInfo& module);
  void collect_function(ast::AstNode& def, const std::string& module, const std::string& owner);
  void collect_class(ast::AstNode& def, ModuleInfo& module);
  void collect_locals(FunctionInfo& fn);

  void annotate_block(std::vector<ast::AstNode*> stmts, FunctionInfo& fn);
  void annotate_statement(ast::AstNode& stmt, FunctionInfo& fn);
  void annotate_assignment(ast::AstNode& stmt, FunctionInfo& fn);
  void annotate_for(ast::AstNode& stmt, FunctionInfo& fn);
  void check_condition(const ast::AstNode& test, FunctionInfo& fn);
  void define_variable(const std::string& id, const VerifierType& type, FunctionInfo& fn,
                       const SourceLocation& loc);
  void check_assignable(const VerifierType& from, const VerifierType& to, const ast::AstNode& value,
                        const SourceLocation& loc);
  bool assignable(const VerifierType& from, const VerifierType& to, const ast::AstNode* value) const;
  VerifierType normalize_inferred(const VerifierType& type) const;

  VerifierType type_of_call(const ast::AstNode& call, FunctionInfo& scope);
  VerifierType type_of_builtin(const std::string& name, const ast::AstNode& call, FunctionInfo& scope);
  VerifierType type_of_binop(const ast::AstNode& expr, FunctionInfo& scope);
  VerifierType type_of_attribute(const ast::AstNode& expr, FunctionInfo& scope);
  void check_call_arguments(const ast::AstNode& call, FunctionInfo& callee, bool skip_self,
                            FunctionInfo& scope);
  const FunctionInfo& ensure_signature(const std::string& qualified);
  void ensure_attribute(const std::string& cls, const std::string& name);
  void type_global_lazily(const std::string& id);

  ast::ProgramUnit& unit_;
  TypingOptions options_;
  std::map<std::string, ModuleInfo> modules_;
  std::vector<std::string> module_order_;
  std::map<std::string, FunctionInfo> functions_;
  std::vector<std::string> function_order_;
  std::map<std::string, ClassInfo> classes_;
  std::vector<std::string> class_order_;
  std::vector<Diagnostic> diagnostics_;
  bool collect_ = false;
  bool lazy_globals_ = false;
  std::set<const ast::AstNode*> lazy_statements_;
};

}  // namespace pybmc
