#pragma once

// Flat, fully qualified symbol table of the retained program, plus the
// verification entry point.

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pybmc/program.hpp"

namespace pybmc {

enum class SymbolKind { Variable, Parameter, Function, Class, Attribute, Method };

std::string_view symbol_kind_name(SymbolKind kind);

struct Symbol {
  std::string qualified;  // module@class@function@identifier
  SymbolKind kind = SymbolKind::Variable;
  VerifierType type;
  SourceLocation loc;
  std::optional<std::string> value;  // initializer source text
};

struct ClassMeta {
  std::string qualified;
  std::vector<std::string> bases;  // source order
  std::vector<std::string> attributes;
  std::vector<std::string> methods;
  int tag = 0;
};

class SymbolTable {
 public:
  SymbolTable(ast::ProgramUnit unit, TypingOptions options);
  SymbolTable(const SymbolTable&) = delete;
  SymbolTable& operator=(const SymbolTable&) = delete;

  const std::vector<Symbol>& symbols() const { return symbols_; }
  const Symbol* find(const std::string& qualified) const;
  const std::map<std::string, ClassMeta>& classes() const { return classes_; }
  const std::string& entry() const { return entry_; }
  // Functions to lower, in definition order (entry and initializers included).
  const std::vector<std::string>& retained_functions() const { return retained_; }
  bool is_retained(const std::string& function) const;

  ProgramModel& model() { return *model_; }
  const ProgramModel& model() const { return *model_; }
  const ast::ProgramUnit& unit() const { return *unit_; }

  void add(Symbol symbol);
  std::string render() const;

 private:
  friend void synthesize_entry(SymbolTable& st);
  void populate();
  std::vector<std::string> reachable_from(const std::vector<std::string>& roots);
  void add_function_symbols(const FunctionInfo& fn);
  void check_names(const FunctionInfo& fn);

  std::unique_ptr<ast::ProgramUnit> unit_;
  std::unique_ptr<ProgramModel> model_;
  std::deque<ast::AstNode> synthetic_;  // bodies of synthesized functions
  std::vector<Symbol> symbols_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, ClassMeta> classes_;
  std::vector<std::string> retained_;
  std::string entry_;
};

// One symbol per declaration of the annotated program. Under isolation only
// the isolated function, its transitive callees and the declarations they
// use are kept.
std::unique_ptr<SymbolTable> build_symbol_table(ast::ProgramUnit unit, TypingOptions options = {});

// Member of `cls` or, failing that, of its bases searched depth-first from
// the left.
Symbol resolve_member(const SymbolTable& st, const std::string& cls, const std::string& member);

// Sets the entry function: the main module's top level, or a synthesized
// function assigning a nondeterministic value to each parameter of the
// isolated function and calling it.
void synthesize_entry(SymbolTable& st);

inline constexpr const char* kEntryFunction = "$entry";
inline constexpr const char* kInitFunction = "$init";

}  // namespace pybmc
