#include "pybmc/symtab.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace pybmc {

using ast::AstNode;
using ast::NodeKind;

namespace {

VerifierType signature(const FunctionInfo& fn) {
  std::vector<VerifierType> params;
  for (const auto& p : fn.params) params.push_back(p.type.value_or(VerifierType::none()));
  return VerifierType::function(params, fn.result.value_or(VerifierType::none()));
}

// Class names mentioned by a type, including nested list elements.
void classes_in(const VerifierType& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case VerifierType::Kind::Class: out.insert(t.class_name()); break;
    case VerifierType::Kind::List: classes_in(t.element(), out); break;
    case VerifierType::Kind::Function:
      for (const auto& p : t.params()) classes_in(p, out);
      classes_in(t.result(), out);
      break;
    default: break;
  }
}

// Visits every node below `node` except nested function definitions and
// annotation subtrees.
void walk_code(const AstNode& node, const std::function<void(const AstNode&)>& visit) {
  visit(node);
  if (node.is(NodeKind::ClassDef)) {
    // Only attribute initializers run; their targets are class members.
    for (const auto& member : node.list("body")) {
      if (!member.is(NodeKind::AnnAssign) && !member.is(NodeKind::Assign)) continue;
      if (const AstNode* value = member.child("value")) walk_code(*value, visit);
    }
    return;
  }
  for (const auto& [field, child] : node.children) {
    if (field == "annotation" || field == "returns") continue;
    for (const auto& c : child.nodes) {
      if (c.is(NodeKind::FunctionDef)) continue;
      walk_code(c, visit);
    }
  }
}

}  // namespace

std::string_view symbol_kind_name(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Variable: return "variable";
    case SymbolKind::Parameter: return "parameter";
    case SymbolKind::Function: return "function";
    case SymbolKind::Class: return "class";
    case SymbolKind::Attribute: return "attribute";
    case SymbolKind::Method: return "method";
  }
  return "?";
}

SymbolTable::SymbolTable(ast::ProgramUnit unit, TypingOptions options)
    : unit_(std::make_unique<ast::ProgramUnit>(std::move(unit))) {
  model_ = std::make_unique<ProgramModel>(*unit_, options);
  // Re-typing an annotated program changes nothing and rebuilds the scopes.
  model_->annotate(false);
  populate();
}

const Symbol* SymbolTable::find(const std::string& qualified) const {
  auto it = index_.find(qualified);
  return it == index_.end() ? nullptr : &symbols_[it->second];
}

bool SymbolTable::is_retained(const std::string& function) const {
  return std::find(retained_.begin(), retained_.end(), function) != retained_.end();
}

void SymbolTable::add(Symbol symbol) {
  if (index_.count(symbol.qualified)) {
    throw Error(ErrorCode::DuplicateDefinition, "'" + symbol.qualified + "' is declared more than once", symbol.loc);
  }
  index_[symbol.qualified] = symbols_.size();
  symbols_.push_back(std::move(symbol));
}

std::vector<std::string> SymbolTable::reachable_from(const std::vector<std::string>& roots) {
  std::set<std::string> seen;
  std::vector<std::string> work = roots;
  while (!work.empty()) {
    std::string q = work.back();
    work.pop_back();
    if (q.empty() || !seen.insert(q).second) continue;
    FunctionInfo* fn = model_->function(q);
    if (!fn) continue;
    for (const auto& p : fn->prelude) work.push_back(p);
    for (const AstNode* stmt : fn->body) {
      walk_code(*stmt, [&](const AstNode& node) {
        if (!node.is(NodeKind::Call)) return;
        auto target = model_->call_target(node, *fn);
        switch (target.kind) {
          case ProgramModel::CallTarget::Kind::Builtin:
            break;
          case ProgramModel::CallTarget::Kind::Method:
            work.push_back(target.function);
            if (!target.explicit_self) {
              // Overrides reachable through dynamic dispatch.
              const std::string attr = node.child("func")->str("attr");
              for (const auto& d : model_->descendants(target.klass)) {
                if (auto m = model_->find_method(d, attr)) work.push_back(*m);
              }
            }
            break;
          default:
            work.push_back(target.function);
            break;
        }
      });
    }
  }
  std::vector<std::string> out;
  for (const auto& q : model_->function_order()) {
    if (seen.count(q)) out.push_back(q);
  }
  return out;
}

void SymbolTable::add_function_symbols(const FunctionInfo& fn) {
  add({fn.qualified, fn.is_method() ? SymbolKind::Method : SymbolKind::Function, signature(fn), fn.loc, std::nullopt});
  if (fn.is_module_top) return;
  for (const auto& p : fn.params) {
    std::optional<std::string> value;
    if (p.default_value) value = ast::unparse(*p.default_value);
    add({fn.qualified + "@" + p.name, SymbolKind::Parameter, p.type.value_or(VerifierType::none()), p.loc, value});
  }
  for (const auto& [name, type] : fn.locals) {
    bool is_param = std::any_of(fn.params.begin(), fn.params.end(), [&](const ParamInfo& p) { return p.name == name; });
    if (is_param) continue;
    add({fn.qualified + "@" + name, SymbolKind::Variable, type, fn.loc, std::nullopt});
  }
}

void SymbolTable::populate() {
  const ProgramModel& m = *model_;
  std::vector<std::string> roots;
  const bool isolated = unit_->isolated_function.has_value();
  if (isolated) {
    roots.push_back(*model_->isolated_target());
    for (const auto& mod : unit_->imported_modules) roots.push_back(m.module(mod.name)->top_function);
  } else {
    roots = m.function_order();
  }
  retained_ = reachable_from(roots);

  // Module globals: every typed global of a retained top level, and under
  // isolation the main module globals that retained code uses.
  for (const auto& name : m.module_order()) {
    const ModuleInfo& mod = *m.module(name);
    const bool main = name == unit_->main_module.name;
    if (!is_retained(mod.top_function) && !(isolated && main)) continue;
    for (const auto& [id, type] : mod.globals) {
      add({name + "@" + id, SymbolKind::Variable, type, mod.root ? mod.root->loc : SourceLocation{}, std::nullopt});
    }
  }
  // Global initializers, for display.
  for (const auto& name : m.module_order()) {
    const FunctionInfo& top = *m.function(m.module(name)->top_function);
    for (const AstNode* stmt : top.body) {
      if (!stmt->is(NodeKind::AnnAssign) || !stmt->child("value")) continue;
      const AstNode* target = stmt->child("target");
      if (!target->is(NodeKind::Name)) continue;
      auto it = index_.find(name + "@" + target->str("id"));
      if (it == index_.end()) continue;
      Symbol& s = symbols_[it->second];
      if (!s.value) {
        s.value = ast::unparse(*stmt->child("value"));
        s.loc = stmt->loc;
      }
    }
  }

  std::set<std::string> used_classes;
  for (const auto& q : retained_) {
    const FunctionInfo& fn = *m.function(q);
    add_function_symbols(fn);
    classes_in(signature(fn), used_classes);
    for (const auto& [name, type] : fn.locals) classes_in(type, used_classes);
    if (fn.is_method()) used_classes.insert(fn.owner_class);
  }
  for (const auto& s : symbols_) classes_in(s.type, used_classes);
  if (!isolated) {
    for (const auto& c : m.class_order()) used_classes.insert(c);
  }
  // Close under bases and subclasses: both shape the record layout.
  std::set<std::string> closed;
  for (const auto& c : used_classes) {
    for (const auto& b : m.mro(c)) closed.insert(b);
    for (const auto& d : m.descendants(c)) {
      for (const auto& b : m.mro(d)) closed.insert(b);
    }
  }
  for (const auto& c : m.class_order()) {
    if (!closed.count(c)) continue;
    const ClassInfo& info = *m.klass(c);
    ClassMeta meta;
    meta.qualified = c;
    meta.bases = info.bases;
    meta.tag = info.tag;
    add({c, SymbolKind::Class, VerifierType::class_ref(c), info.loc, std::nullopt});
    for (const auto& a : info.attributes) {
      meta.attributes.push_back(a.name);
      if (index_.count(c + "@" + a.name)) continue;
      std::optional<std::string> value;
      if (a.value) value = ast::unparse(*a.value);
      add({c + "@" + a.name, SymbolKind::Attribute, a.type, a.loc, value});
    }
    for (const auto& name : info.methods) {
      meta.methods.push_back(name);
    }
    classes_[c] = std::move(meta);
  }
  for (const auto& q : retained_) check_names(*model_->function(q));
}

void SymbolTable::check_names(const FunctionInfo& fn) {
  FunctionInfo& scope = *model_->function(fn.qualified);
  for (const AstNode* stmt : fn.body) {
    walk_code(*stmt, [&](const AstNode& node) {
      if (!node.is(NodeKind::Name)) return;
      const std::string id = node.str("id");
      auto r = model_->try_resolve_name(id, scope);
      if (!r) throw Error(ErrorCode::UnresolvedName, "'" + id + "' does not name a declaration", node.loc);
      if (r->kind == Resolution::Kind::Variable && !find(r->qualified)) {
        throw Error(ErrorCode::UnresolvedName, "'" + id + "' has no symbol (" + r->qualified + ")", node.loc);
      }
    });
  }
}

std::string SymbolTable::render() const {
  std::ostringstream out;
  const unsigned w = model_->options().int_width;
  out << "Symbol table: " << symbols_.size() << " symbols, entry " << (entry_.empty() ? "<none>" : entry_) << "\n";
  std::size_t width = 0;
  for (const auto& s : symbols_) width = std::max(width, s.qualified.size());
  for (const auto& s : symbols_) {
    std::string kind(symbol_kind_name(s.kind));
    out << s.qualified << std::string(width + 2 - s.qualified.size(), ' ') << kind
        << std::string(11 - kind.size(), ' ') << s.type.to_string(w);
    if (s.value) out << " = " << *s.value;
    out << "\n";
  }
  for (const auto& [name, meta] : classes_) {
    out << "class " << name << " tag " << meta.tag << " bases (";
    for (std::size_t i = 0; i < meta.bases.size(); ++i) out << (i ? ", " : "") << meta.bases[i];
    out << ")\n";
  }
  return out.str();
}

std::unique_ptr<SymbolTable> build_symbol_table(ast::ProgramUnit unit, TypingOptions options) {
  return std::make_unique<SymbolTable>(std::move(unit), options);
}

Symbol resolve_member(const SymbolTable& st, const std::string& cls, const std::string& member) {
  if (!st.classes().count(cls)) throw Error(ErrorCode::MemberNotFound, "no class '" + cls + "'");
  for (const auto& c : st.model().mro(cls)) {
    if (const Symbol* s = st.find(c + "@" + member)) {
      if (s->kind == SymbolKind::Method || s->kind == SymbolKind::Attribute) return *s;
    }
    // Methods outside the retained set are still members of the class.
    auto meta = st.classes().find(c);
    if (meta != st.classes().end()) {
      const auto& methods = meta->second.methods;
      if (std::find(methods.begin(), methods.end(), member) != methods.end()) {
        const FunctionInfo* fn = st.model().function(c + "@" + member);
        return {c + "@" + member, SymbolKind::Method, fn ? signature(*fn) : VerifierType::none(),
                fn ? fn->loc : SourceLocation{}, std::nullopt};
      }
    }
  }
  throw Error(ErrorCode::MemberNotFound, "class " + short_name(cls) + " has no member '" + member + "'");
}

void synthesize_entry(SymbolTable& st) {
  ProgramModel& m = *st.model_;
  const std::string main = st.unit_->main_module.name;
  const ModuleInfo& main_info = *m.module(main);
  if (!st.unit_->isolated_function) {
    st.entry_ = main_info.top_function;
    return;
  }
  const std::string target = *m.isolated_target();
  const FunctionInfo& callee = *m.function(target);
  const FunctionInfo& top = *m.function(main_info.top_function);

  // Initializer: class bodies plus the globals retained code reads, in
  // source order, behind the imported modules.
  std::vector<AstNode*> init_statements = m.initializer_statements();
  FunctionInfo init;
  init.qualified = main + "@" + kInitFunction;
  init.name = kInitFunction;
  init.module = main;
  init.is_module_top = true;
  init.synthetic = true;
  init.local_names = top.local_names;
  init.prelude = top.prelude;
  init.loc = top.loc;
  for (AstNode* stmt : top.body) {
    bool wanted = stmt->is(NodeKind::ClassDef) ||
                  std::find(init_statements.begin(), init_statements.end(), stmt) != init_statements.end();
    if (wanted) init.body.push_back(stmt);
  }
  init.state = FunctionInfo::State::Done;
  m.add_function(std::move(init));

  // Entry: one nondeterministic local per parameter, then the call.
  const SourceLocation loc = callee.loc;
  const std::string& requested = *st.unit_->isolated_function;
  std::string receiver_class;
  if (auto dot = requested.find('.'); dot != std::string::npos) {
    receiver_class = main_info.classes.at(requested.substr(0, dot));
  }
  FunctionInfo entry;
  entry.qualified = main + "@" + kEntryFunction;
  entry.name = kEntryFunction;
  entry.module = main;
  entry.synthetic = true;
  entry.loc = loc;
  entry.prelude = {main + "@" + kInitFunction};
  entry.result = VerifierType::none();
  std::vector<AstNode> call_args;
  for (std::size_t i = 0; i < callee.params.size(); ++i) {
    const ParamInfo& p = callee.params[i];
    VerifierType type = *p.type;
    if (i == 0 && !receiver_class.empty()) type = VerifierType::class_ref(receiver_class);
    AstNode assign = ast::make_node(NodeKind::AnnAssign, "AnnAssign", p.loc);
    assign.set_child("target", ast::make_name(p.name, p.loc));
    assign.set_child("annotation", m.annotation_node(type, main, p.loc));
    assign.set_child("value", ast::make_call(ast::make_name("$nondet", p.loc), {}, p.loc));
    assign.set_scalar("simple", ast::Scalar::from_int("1"));
    st.synthetic_.push_back(std::move(assign));
    entry.body.push_back(&st.synthetic_.back());
    call_args.push_back(ast::make_name(p.name, p.loc));
  }
  AstNode func;
  if (receiver_class.empty()) {
    func = ast::make_name(callee.name, loc);
  } else {
    func = ast::make_node(NodeKind::Attribute, "Attribute", loc);
    func.set_child("value", ast::make_name(short_name(receiver_class), loc));
    func.set_scalar("attr", ast::Scalar::from_string(callee.name));
  }
  AstNode stmt = ast::make_node(NodeKind::Expr, "Expr", loc);
  stmt.set_child("value", ast::make_call(std::move(func), std::move(call_args), loc));
  st.synthetic_.push_back(std::move(stmt));
  entry.body.push_back(&st.synthetic_.back());
  m.add_function(std::move(entry));
  m.annotate_function(main + "@" + kEntryFunction);

  const FunctionInfo& init_fn = *m.function(main + "@" + kInitFunction);
  const FunctionInfo& entry_fn = *m.function(main + "@" + kEntryFunction);
  st.add_function_symbols(init_fn);
  st.add_function_symbols(entry_fn);
  st.retained_.push_back(init_fn.qualified);
  st.retained_.push_back(entry_fn.qualified);
  // The initializer may call functions the isolated code does not.
  for (const auto& q : st.reachable_from({init_fn.qualified})) {
    if (st.is_retained(q)) continue;
    st.retained_.insert(st.retained_.end() - 2, q);
    st.add_function_symbols(*m.function(q));
  }
  st.check_names(init_fn);
  st.check_names(entry_fn);
  st.entry_ = entry_fn.qualified;
}

}  // namespace pybmc
