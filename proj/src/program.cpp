#include "pybmc/program.hpp"

#include <algorithm>
#include <functional>
#include <utility>

namespace pybmc {

using ast::AstNode;
using ast::NodeKind;

namespace {

const std::vector<AstNode>& items(const AstNode& node, std::string_view field) {
  return node.list(field);
}

// Mutable pointers to a list field's nodes without creating the field.
std::vector<AstNode*> mutable_items(AstNode& node, const std::string& field) {
  std::vector<AstNode*> out;
  auto it = node.children.find(field);
  if (it == node.children.end() || !it->second.is_list) return out;
  for (auto& n : it->second.nodes) out.push_back(&n);
  return out;
}

void collect_assigned_names(const AstNode& stmt, std::set<std::string>& out) {
  auto add_target = [&](const AstNode* target) {
    if (target && target->is(NodeKind::Name)) out.insert(target->str("id"));
  };
  switch (stmt.kind) {
    case NodeKind::Assign:
      for (const auto& t : items(stmt, "targets")) add_target(&t);
      break;
    case NodeKind::AnnAssign:
    case NodeKind::AugAssign:
    case NodeKind::For:
      add_target(stmt.child("target"));
      break;
    default:
      break;
  }
  if (stmt.is(NodeKind::FunctionDef) || stmt.is(NodeKind::ClassDef)) return;
  for (const char* field : {"body", "orelse"}) {
    for (const auto& s : items(stmt, field)) collect_assigned_names(s, out);
  }
}

const std::set<std::string>& builtin_names() {
  static const std::set<std::string> names = [] {
    std::set<std::string> s = {"abs",         "min",           "max",          "int",
                               "float",       "bool",          "len",          "range",
                               "nondet_int",  "nondet_bool",   "nondet_float", "__ESBMC_assume",
                               "__VERIFIER_assume", "$nondet"};
    for (unsigned w : {32u, 64u, 128u, 256u}) {
      for (const char* prefix : {"int", "uint", "nondet_int", "nondet_uint"}) {
        s.insert(prefix + std::to_string(w));
      }
    }
    return s;
  }();
  return names;
}

}  // namespace

const AttributeInfo* ClassInfo::own_attribute(const std::string& attr) const {
  for (const auto& a : attributes) {
    if (a.name == attr) return &a;
  }
  return nullptr;
}

bool ProgramModel::is_builtin(const std::string& name) { return builtin_names().count(name) > 0; }

ProgramModel::ProgramModel(ast::ProgramUnit& unit, TypingOptions options)
    : unit_(unit), options_(options) {
  std::vector<ast::ModuleAst*> modules;
  for (auto& m : unit_.imported_modules) modules.push_back(&m);
  modules.push_back(&unit_.main_module);
  for (ast::ModuleAst* m : modules) {
    ModuleInfo info;
    info.name = m->name;
    info.source_name = m->source_name;
    info.root = &m->root;
    module_order_.push_back(m->name);
    modules_[m->name] = std::move(info);
    collect_module(modules_[m->name]);
  }

  // The main module's initializer runs every imported module's first.
  FunctionInfo& main_top = functions_.at(modules_.at(unit_.main_module.name).top_function);
  for (const auto& m : unit_.imported_modules) main_top.prelude.push_back(modules_.at(m.name).top_function);

  // Signatures need every class name, so they are resolved after collection.
  for (const auto& q : function_order_) {
    FunctionInfo& fn = functions_.at(q);
    if (fn.synthetic || !fn.def) continue;
    const AstNode* args = fn.def->child("args");
    const auto& arg_nodes = items(*args, "args");
    for (std::size_t i = 0; i < arg_nodes.size(); ++i) {
      ParamInfo& p = fn.params[i];
      if (const AstNode* ann = arg_nodes[i].child("annotation")) {
        p.type = parse_annotation(*ann, fn.module);
      } else if (i == 0 && fn.is_method()) {
        p.type = VerifierType::class_ref(fn.owner_class);
      }
    }
    if (const AstNode* returns = fn.def->child("returns")) fn.result = parse_annotation(*returns, fn.module);
  }

  int tag = 1;
  for (const auto& c : class_order_) classes_.at(c).tag = tag++;
}

void ProgramModel::collect_module(ModuleInfo& module) {
  FunctionInfo top;
  top.qualified = module.name + "@$top";
  top.name = "$top";
  top.module = module.name;
  top.is_module_top = true;
  top.synthetic = true;
  top.loc = SourceLocation{module.source_name, 1, 0};
  module.top_function = top.qualified;

  auto claim = [&](const std::string& name, const SourceLocation& loc) {
    if (module.functions.count(name) || module.classes.count(name)) {
      throw Error(ErrorCode::DuplicateDefinition, "'" + name + "' is defined more than once", loc);
    }
  };

  for (AstNode* stmt : mutable_items(*module.root, "body")) {
    switch (stmt->kind) {
      case NodeKind::FunctionDef: {
        const std::string name = stmt->str("name");
        claim(name, stmt->loc);
        module.functions[name] = module.name + "@" + name;
        collect_function(*stmt, module.name, "");
        break;
      }
      case NodeKind::ClassDef: {
        const std::string name = stmt->str("name");
        claim(name, stmt->loc);
        module.classes[name] = module.name + "@" + name;
        collect_class(*stmt, module);
        top.body.push_back(stmt);  // class-level attributes initialize in order
        break;
      }
      case NodeKind::Import:
        for (const auto& alias : items(*stmt, "names")) {
          const std::string name = alias.str("name");
          if (ast::is_ignored_module(name)) continue;
          if (name.find('.') != std::string::npos) {
            throw Error(ErrorCode::UnsupportedConstruct, "dotted import '" + name + "'", stmt->loc);
          }
          std::string local = alias.str("asname");
          module.module_aliases[local.empty() ? name : local] = name;
        }
        break;
      case NodeKind::ImportFrom: {
        const std::string from = stmt->str("module");
        if (ast::is_ignored_module(from)) break;
        for (const auto& alias : items(*stmt, "names")) {
          const std::string name = alias.str("name");
          if (name == "*") {
            throw Error(ErrorCode::UnsupportedConstruct, "wildcard import", stmt->loc);
          }
          std::string local = alias.str("asname");
          module.from_imports[local.empty() ? name : local] = {from, name};
        }
        break;
      }
      default:
        collect_assigned_names(*stmt, module.global_names);
        top.body.push_back(stmt);
        break;
    }
  }
  for (const auto& g : module.global_names) {
    if (module.functions.count(g) || module.classes.count(g)) {
      throw Error(ErrorCode::DuplicateDefinition,
                  "'" + g + "' names both a variable and a definition", top.loc);
    }
  }
  top.local_names = module.global_names;
  function_order_.push_back(top.qualified);
  functions_[top.qualified] = std::move(top);
}

void ProgramModel::collect_function(AstNode& def, const std::string& module, const std::string& owner) {
  FunctionInfo fn;
  fn.name = def.str("name");
  fn.module = module;
  fn.owner_class = owner;
  fn.qualified = (owner.empty() ? module : owner) + "@" + fn.name;
  fn.def = &def;
  fn.loc = def.loc;
  const AstNode* args = def.child("args");
  const auto& arg_nodes = items(*args, "args");
  const auto& defaults = items(*args, "defaults");
  const std::size_t first_default = arg_nodes.size() - std::min(arg_nodes.size(), defaults.size());
  for (std::size_t i = 0; i < arg_nodes.size(); ++i) {
    ParamInfo p;
    p.name = arg_nodes[i].str("arg");
    p.loc = arg_nodes[i].loc.valid() ? arg_nodes[i].loc : def.loc;
    if (i >= first_default) p.default_value = &defaults[i - first_default];
    for (const auto& other : fn.params) {
      if (other.name == p.name) {
        throw Error(ErrorCode::DuplicateDefinition, "duplicate parameter '" + p.name + "'", p.loc);
      }
    }
    fn.local_names.insert(p.name);
    fn.params.push_back(std::move(p));
  }
  if (!owner.empty() && fn.params.empty()) {
    throw Error(ErrorCode::UnsupportedConstruct,
                "method '" + fn.name + "' needs an explicit receiver parameter", def.loc);
  }
  fn.body = mutable_items(def, "body");
  collect_locals(fn);
  if (functions_.count(fn.qualified)) {
    throw Error(ErrorCode::DuplicateDefinition, "'" + fn.qualified + "' is defined more than once", def.loc);
  }
  function_order_.push_back(fn.qualified);
  functions_[fn.qualified] = std::move(fn);
}

void ProgramModel::collect_locals(FunctionInfo& fn) {
  for (const AstNode* stmt : fn.body) collect_assigned_names(*stmt, fn.local_names);
}

void ProgramModel::collect_class(AstNode& def, ModuleInfo& module) {
  ClassInfo cls;
  cls.name = def.str("name");
  cls.module = module.name;
  cls.qualified = module.name + "@" + cls.name;
  cls.def = &def;
  cls.loc = def.loc;
  for (const auto& base : items(def, "bases")) {
    std::string qualified;
    if (base.is(NodeKind::Name)) {
      const std::string id = base.str("id");
      if (id == "object") continue;
      if (auto it = module.classes.find(id); it != module.classes.end()) {
        qualified = it->second;
      } else if (auto imp = module.from_imports.find(id); imp != module.from_imports.end()) {
        const ModuleInfo* other = this->module(imp->second.first);
        if (other && other->classes.count(imp->second.second)) {
          qualified = other->classes.at(imp->second.second);
        }
      }
    } else if (base.is(NodeKind::Attribute) && base.child("value")->is(NodeKind::Name)) {
      auto alias = module.module_aliases.find(base.child("value")->str("id"));
      if (alias != module.module_aliases.end()) {
        const ModuleInfo* other = this->module(alias->second);
        if (other && other->classes.count(base.str("attr"))) qualified = other->classes.at(base.str("attr"));
      }
    }
    if (qualified.empty()) {
      throw Error(ErrorCode::UnknownName, "unknown base class '" + ast::unparse(base) + "'", base.loc);
    }
    if (std::find(cls.bases.begin(), cls.bases.end(), qualified) != cls.bases.end()) {
      throw Error(ErrorCode::DuplicateDefinition, "duplicate base class '" + ast::unparse(base) + "'",
                  base.loc);
    }
    cls.bases.push_back(qualified);
  }
  for (AstNode* stmt : mutable_items(def, "body")) {
    switch (stmt->kind) {
      case NodeKind::FunctionDef: {
        const std::string name = stmt->str("name");
        if (cls.method_qualified.count(name)) {
          throw Error(ErrorCode::DuplicateDefinition, "method '" + name + "' is defined more than once",
                      stmt->loc);
        }
        cls.methods.push_back(name);
        cls.method_qualified[name] = cls.qualified + "@" + name;
        collect_function(*stmt, module.name, cls.qualified);
        break;
      }
      case NodeKind::AnnAssign:
      case NodeKind::Assign:
      case NodeKind::Pass:
        break;
      case NodeKind::Expr:
        if (stmt->child("value")->is(NodeKind::Constant)) break;
        [[fallthrough]];
      default:
        throw Error(ErrorCode::UnsupportedConstruct,
                    std::string(ast::node_kind_name(stmt->kind)) + " in a class body", stmt->loc);
    }
  }
  class_order_.push_back(cls.qualified);
  classes_[cls.qualified] = std::move(cls);
}

FunctionInfo* ProgramModel::function(const std::string& qualified) {
  auto it = functions_.find(qualified);
  return it == functions_.end() ? nullptr : &it->second;
}

const FunctionInfo* ProgramModel::function(const std::string& qualified) const {
  auto it = functions_.find(qualified);
  return it == functions_.end() ? nullptr : &it->second;
}

const ClassInfo* ProgramModel::klass(const std::string& qualified) const {
  auto it = classes_.find(qualified);
  return it == classes_.end() ? nullptr : &it->second;
}

ClassInfo* ProgramModel::klass(const std::string& qualified) {
  auto it = classes_.find(qualified);
  return it == classes_.end() ? nullptr : &it->second;
}

const ModuleInfo* ProgramModel::module(const std::string& name) const {
  auto it = modules_.find(name);
  return it == modules_.end() ? nullptr : &it->second;
}

FunctionInfo& ProgramModel::add_function(FunctionInfo info) {
  if (functions_.count(info.qualified)) {
    throw Error(ErrorCode::DuplicateDefinition, "'" + info.qualified + "' already exists", info.loc);
  }
  function_order_.push_back(info.qualified);
  auto& slot = functions_[info.qualified];
  slot = std::move(info);
  collect_locals(slot);
  return slot;
}

// ---------------------------------------------------------------------------
// Names

std::optional<Resolution> ProgramModel::try_resolve_name(const std::string& id,
                                                          const FunctionInfo& scope) const {
  const ModuleInfo& mod = modules_.at(scope.module);
  if (scope.local_names.count(id)) {
    Resolution r{Resolution::Kind::Variable, {}, std::nullopt};
    if (scope.is_module_top) {
      r.qualified = mod.name + "@" + id;
      if (auto it = mod.globals.find(id); it != mod.globals.end()) r.type = it->second;
    } else {
      r.qualified = scope.qualified + "@" + id;
      if (auto it = scope.locals.find(id); it != scope.locals.end()) r.type = it->second;
    }
    return r;
  }
  std::function<std::optional<Resolution>(const ModuleInfo&, const std::string&, int)> member;
  member = [&](const ModuleInfo& m, const std::string& name, int depth) -> std::optional<Resolution> {
    if (m.global_names.count(name)) {
      Resolution r{Resolution::Kind::Variable, m.name + "@" + name, std::nullopt};
      if (auto it = m.globals.find(name); it != m.globals.end()) r.type = it->second;
      return r;
    }
    if (auto it = m.functions.find(name); it != m.functions.end()) {
      return Resolution{Resolution::Kind::Function, it->second, std::nullopt};
    }
    if (auto it = m.classes.find(name); it != m.classes.end()) {
      return Resolution{Resolution::Kind::Class, it->second, std::nullopt};
    }
    if (auto it = m.module_aliases.find(name); it != m.module_aliases.end()) {
      return Resolution{Resolution::Kind::Module, it->second, std::nullopt};
    }
    if (auto it = m.from_imports.find(name); it != m.from_imports.end() && depth < 8) {
      const ModuleInfo* other = module(it->second.first);
      if (other) return member(*other, it->second.second, depth + 1);
    }
    return std::nullopt;
  };
  if (auto r = member(mod, id, 0)) return r;
  if (is_builtin(id)) return Resolution{Resolution::Kind::Builtin, id, std::nullopt};
  return std::nullopt;
}

Resolution ProgramModel::resolve_name(const std::string& id, const FunctionInfo& scope,
                                      const SourceLocation& loc) const {
  auto r = try_resolve_name(id, scope);
  if (!r) throw Error(ErrorCode::UnknownName, "unknown name '" + id + "'", loc);
  return *r;
}

std::optional<std::string> ProgramModel::variable_symbol(const std::string& id,
                                                         const FunctionInfo& scope) const {
  auto r = try_resolve_name(id, scope);
  if (r && r->kind == Resolution::Kind::Variable) return r->qualified;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Classes

std::vector<std::string> ProgramModel::mro(const std::string& cls) const {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::function<void(const std::string&)> visit = [&](const std::string& c) {
    if (!seen.insert(c).second) return;
    order.push_back(c);
    const ClassInfo* info = klass(c);
    if (!info) return;
    for (const auto& b : info->bases) visit(b);
  };
  visit(cls);
  return order;
}

std::optional<std::string> ProgramModel::find_method(const std::string& cls, const std::string& name) const {
  for (const auto& c : mro(cls)) {
    const ClassInfo* info = klass(c);
    if (!info) continue;
    if (auto it = info->method_qualified.find(name); it != info->method_qualified.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<AttributeInfo> ProgramModel::find_attribute(const std::string& cls,
                                                          const std::string& name) const {
  for (const auto& c : mro(cls)) {
    const ClassInfo* info = klass(c);
    if (!info) continue;
    if (const AttributeInfo* a = info->own_attribute(name)) return *a;
  }
  return std::nullopt;
}

bool ProgramModel::is_subclass(const std::string& derived, const std::string& base) const {
  for (const auto& c : mro(derived)) {
    if (c == base) return true;
  }
  return false;
}

std::vector<std::string> ProgramModel::descendants(const std::string& cls) const {
  std::vector<std::string> out;
  for (const auto& c : class_order_) {
    if (c != cls && is_subclass(c, cls)) out.push_back(c);
  }
  return out;
}

std::vector<AttributeInfo> ProgramModel::record_layout(const std::string& cls) const {
  // Every class an object of static type `cls` may dynamically belong to,
  // plus everything those classes inherit from.
  std::set<std::string> members;
  std::vector<std::string> roots = descendants(cls);
  roots.insert(roots.begin(), cls);
  for (const auto& r : roots) {
    for (const auto& c : mro(r)) members.insert(c);
  }
  std::vector<AttributeInfo> fields;
  AttributeInfo tag;
  tag.name = kClassTagField;
  tag.type = VerifierType::integer(32, true);
  tag.owner = cls;
  fields.push_back(tag);
  for (const auto& c : class_order_) {
    if (!members.count(c)) continue;
    for (const auto& a : classes_.at(c).attributes) {
      if (a.class_level) continue;
      auto same = std::find_if(fields.begin(), fields.end(), [&](const AttributeInfo& f) { return f.name == a.name; });
      if (same == fields.end()) {
        fields.push_back(a);
      } else if (same->type != a.type) {
        throw Error(ErrorCode::TypeConflict,
                    "attribute '" + a.name + "' has type " + same->type.to_string(options_.int_width) +
                        " in " + short_name(same->owner) + " but " + a.type.to_string(options_.int_width) +
                        " in " + short_name(a.owner),
                    a.loc);
      }
    }
  }
  return fields;
}

std::vector<Leaf> ProgramModel::leaves(const VerifierType& type) const {
  std::vector<Leaf> out;
  std::vector<std::string> stack;
  std::function<void(const VerifierType&, const std::string&)> walk = [&](const VerifierType& t,
                                                                           const std::string& path) {
    switch (t.kind()) {
      case VerifierType::Kind::List:
        for (std::size_t i = 0; i < t.length(); ++i) walk(t.element(), path + "[" + std::to_string(i) + "]");
        break;
      case VerifierType::Kind::Class: {
        if (std::find(stack.begin(), stack.end(), t.class_name()) != stack.end()) {
          throw Error(ErrorCode::UnsupportedConstruct,
                      "class " + short_name(t.class_name()) + " contains itself; recursive objects");
        }
        stack.push_back(t.class_name());
        for (const auto& f : record_layout(t.class_name())) walk(f.type, path + "." + f.name);
        stack.pop_back();
        break;
      }
      case VerifierType::Kind::Function:
        throw Error(ErrorCode::UnsupportedConstruct, "function values");
      default:
        out.push_back({path, t});
        break;
    }
  };
  walk(type, "");
  return out;
}

}  // namespace pybmc
