// Expression typing and annotation inference for ProgramModel.

#include <algorithm>
#include <limits>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "pybmc/program.hpp"

namespace pybmc {

using ast::AstNode;
using ast::NodeKind;
using boost::multiprecision::cpp_int;

namespace {

constexpr std::size_t kUnknownLength = std::numeric_limits<std::size_t>::max();

const std::vector<AstNode>& items(const AstNode& node, std::string_view field) { return node.list(field); }

std::string op_of(const AstNode& node) {
  const AstNode* op = node.child("op");
  return op ? op->type_name : std::string();
}

bool is_arith_op(const std::string& op) {
  return op == "Add" || op == "Sub" || op == "Mult" || op == "FloorDiv" || op == "Mod" ||
         op == "BitAnd" || op == "BitOr" || op == "BitXor" || op == "LShift" || op == "RShift";
}

std::optional<cpp_int> plain_literal_value(const AstNode& expr) {
  if (expr.is(NodeKind::Constant)) {
    const ast::Scalar* v = expr.scalar("value");
    if (v && v->kind == ast::Scalar::Kind::Int) return cpp_int(v->text);
    return std::nullopt;
  }
  if (expr.is(NodeKind::UnaryOp) && (op_of(expr) == "USub" || op_of(expr) == "UAdd")) {
    auto inner = plain_literal_value(*expr.child("operand"));
    if (inner && op_of(expr) == "USub") return -*inner;
    return inner;
  }
  return std::nullopt;
}

bool literal_fits(const cpp_int& value, const VerifierType& t) {
  if (t.is_signed()) {
    cpp_int bound = cpp_int(1) << (t.width() - 1);
    return value >= -bound && value < bound;
  }
  return value >= 0 && value < (cpp_int(1) << t.width());
}

bool is_call_to(const AstNode& expr, const std::string& name) {
  if (!expr.is(NodeKind::Call)) return false;
  const AstNode* func = expr.child("func");
  return func && func->is(NodeKind::Name) && func->str("id") == name;
}

Error untypeable(const std::string& what, const SourceLocation& loc) {
  return Error(ErrorCode::UntypeableExpression, what, loc);
}

}  // namespace

bool ProgramModel::is_int_literal(const AstNode& expr) {
  switch (expr.kind) {
    case NodeKind::Constant: {
      const ast::Scalar* v = expr.scalar("value");
      return v && v->kind == ast::Scalar::Kind::Int;
    }
    case NodeKind::UnaryOp: {
      const std::string op = op_of(expr);
      return (op == "USub" || op == "UAdd" || op == "Invert") && is_int_literal(*expr.child("operand"));
    }
    case NodeKind::BinOp:
      return is_arith_op(op_of(expr)) && is_int_literal(*expr.child("left")) &&
             is_int_literal(*expr.child("right"));
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Annotations

VerifierType ProgramModel::parse_annotation(const AstNode& ann, const std::string& module_name) const {
  const ModuleInfo& mod = modules_.at(module_name);
  auto class_named = [&](const std::string& id) -> std::optional<std::string> {
    if (auto it = mod.classes.find(id); it != mod.classes.end()) return it->second;
    if (auto it = mod.from_imports.find(id); it != mod.from_imports.end()) {
      const ModuleInfo* other = module(it->second.first);
      if (other && other->classes.count(it->second.second)) return other->classes.at(it->second.second);
    }
    return std::nullopt;
  };
  switch (ann.kind) {
    case NodeKind::Name: {
      const std::string id = ann.str("id");
      if (auto t = builtin_type_named(id, options_.int_width)) return *t;
      if (auto c = class_named(id)) return VerifierType::class_ref(*c);
      if (id == "list") throw untypeable("list annotations need an element type, e.g. list[int]", ann.loc);
      throw Error(ErrorCode::UnknownName, "unknown type '" + id + "'", ann.loc);
    }
    case NodeKind::Constant: {
      const ast::Scalar* v = ann.scalar("value");
      if (!v || v->kind == ast::Scalar::Kind::Null) return VerifierType::none();
      if (v->kind == ast::Scalar::Kind::String) {
        if (auto c = class_named(v->text)) return VerifierType::class_ref(*c);
        if (auto t = builtin_type_named(v->text, options_.int_width)) return *t;
        throw Error(ErrorCode::UnknownName, "unknown type '" + v->text + "'", ann.loc);
      }
      break;
    }
    case NodeKind::Attribute: {
      const AstNode* value = ann.child("value");
      if (value && value->is(NodeKind::Name)) {
        std::string target = value->str("id");
        if (auto it = mod.module_aliases.find(target); it != mod.module_aliases.end()) target = it->second;
        const ModuleInfo* other = module(target);
        if (other && other->classes.count(ann.str("attr"))) {
          return VerifierType::class_ref(other->classes.at(ann.str("attr")));
        }
      }
      throw Error(ErrorCode::UnknownName, "unknown type '" + ast::unparse(ann) + "'", ann.loc);
    }
    case NodeKind::Subscript: {
      const AstNode* value = ann.child("value");
      if (value && value->is(NodeKind::Name) && (value->str("id") == "list" || value->str("id") == "List")) {
        return VerifierType::list_of(parse_annotation(*ann.child("slice"), module_name), kUnknownLength);
      }
      break;
    }
    default:
      break;
  }
  throw untypeable("unsupported type annotation '" + ast::unparse(ann) + "'", ann.loc);
}

AstNode ProgramModel::annotation_node(const VerifierType& type, const std::string& module_name,
                                      const SourceLocation& loc) const {
  switch (type.kind()) {
    case VerifierType::Kind::None: {
      AstNode node = ast::make_node(NodeKind::Constant, "Constant", loc);
      node.set_scalar("value", ast::Scalar::null());
      return node;
    }
    case VerifierType::Kind::List: {
      AstNode node = ast::make_node(NodeKind::Subscript, "Subscript", loc);
      node.set_child("value", ast::make_name("list", loc));
      node.set_child("slice", annotation_node(type.element(), module_name, loc));
      return node;
    }
    case VerifierType::Kind::Class: {
      const ModuleInfo& mod = modules_.at(module_name);
      const ClassInfo& cls = classes_.at(type.class_name());
      if (cls.module == module_name) return ast::make_name(cls.name, loc);
      for (const auto& [alias, target] : mod.from_imports) {
        if (target.first == cls.module && target.second == cls.name) return ast::make_name(alias, loc);
      }
      std::string prefix = cls.module;
      for (const auto& [alias, target] : mod.module_aliases) {
        if (target == cls.module) prefix = alias;
      }
      AstNode node = ast::make_node(NodeKind::Attribute, "Attribute", loc);
      node.set_child("value", ast::make_name(prefix, loc));
      node.set_scalar("attr", ast::Scalar::from_string(cls.name));
      return node;
    }
    case VerifierType::Kind::Function:
      throw untypeable("function values cannot be annotated", loc);
    default:
      return ast::make_name(type.to_string(options_.int_width), loc);
  }
}

// ---------------------------------------------------------------------------
// Expressions

VerifierType ProgramModel::type_of(const AstNode& expr, FunctionInfo& scope) {
  switch (expr.kind) {
    case NodeKind::Constant: {
      const ast::Scalar* v = expr.scalar("value");
      if (!v || v->kind == ast::Scalar::Kind::Null) return VerifierType::none();
      switch (v->kind) {
        case ast::Scalar::Kind::Bool: return VerifierType::boolean();
        case ast::Scalar::Kind::Int: return VerifierType::integer(options_.int_width, true);
        case ast::Scalar::Kind::Float: return VerifierType::floating();
        default: throw untypeable("string values are outside the supported subset", expr.loc);
      }
    }
    case NodeKind::Name: {
      const std::string id = expr.str("id");
      Resolution r = resolve_name(id, scope, expr.loc);
      switch (r.kind) {
        case Resolution::Kind::Variable:
          if (!r.type && lazy_globals_ && r.qualified == unit_.main_module.name + "@" + id) {
            type_global_lazily(id);
            r = resolve_name(id, scope, expr.loc);
          }
          if (!r.type) throw Error(ErrorCode::UnknownName, "'" + id + "' is used before it is assigned", expr.loc);
          return *r.type;
        case Resolution::Kind::Function: {
          const FunctionInfo& fn = ensure_signature(r.qualified);
          std::vector<VerifierType> params;
          for (const auto& p : fn.params) params.push_back(p.type.value_or(VerifierType::none()));
          return VerifierType::function(params, fn.result.value_or(VerifierType::none()));
        }
        default:
          throw untypeable("'" + id + "' cannot be used as a value", expr.loc);
      }
    }
    case NodeKind::Attribute:
      return type_of_attribute(expr, scope);
    case NodeKind::BinOp:
      return type_of_binop(expr, scope);
    case NodeKind::UnaryOp: {
      const std::string op = op_of(expr);
      const AstNode& operand = *expr.child("operand");
      if (op == "Not") {
        check_condition(operand, scope);
        return VerifierType::boolean();
      }
      VerifierType t = type_of(operand, scope);
      if (op == "Invert" ? !t.is(VerifierType::Kind::Int) : !t.is_numeric()) {
        throw untypeable("operator '" + ast::unparse(expr) + "' does not apply to " +
                             t.to_string(options_.int_width),
                         expr.loc);
      }
      return t;
    }
    case NodeKind::BoolOp: {
      for (const auto& v : items(expr, "values")) {
        VerifierType t = type_of(v, scope);
        if (!t.is(VerifierType::Kind::Bool)) {
          throw untypeable("operands of '" + std::string(op_of(expr) == "And" ? "and" : "or") +
                               "' must be bool, got " + t.to_string(options_.int_width),
                           v.loc.valid() ? v.loc : expr.loc);
        }
      }
      return VerifierType::boolean();
    }
    case NodeKind::Compare: {
      const AstNode* left = expr.child("left");
      const auto& ops = items(expr, "ops");
      const auto& rights = items(expr, "comparators");
      if (ops.size() != rights.size() || ops.empty()) throw Error(ErrorCode::MalformedAst, "bad Compare", expr.loc);
      for (std::size_t i = 0; i < ops.size(); ++i) {
        VerifierType t = operand_type(*left, rights[i], scope);
        const std::string& op = ops[i].type_name;
        bool equality = op == "Eq" || op == "NotEq";
        if (!(t.is_numeric() || (equality && t.is(VerifierType::Kind::Bool)))) {
          throw untypeable("cannot compare values of type " + t.to_string(options_.int_width), expr.loc);
        }
        left = &rights[i];
      }
      return VerifierType::boolean();
    }
    case NodeKind::IfExp: {
      check_condition(*expr.child("test"), scope);
      return operand_type(*expr.child("body"), *expr.child("orelse"), scope);
    }
    case NodeKind::Call:
      return type_of_call(expr, scope);
    case NodeKind::Subscript: {
      VerifierType t = type_of(*expr.child("value"), scope);
      if (!t.is(VerifierType::Kind::List)) {
        throw untypeable("subscript of non-list type " + t.to_string(options_.int_width), expr.loc);
      }
      const AstNode* index = expr.child("slice");
      if (!index) throw untypeable("unsupported subscript", expr.loc);
      VerifierType it = type_of(*index, scope);
      if (!it.is(VerifierType::Kind::Int)) {
        throw untypeable("list index must be an integer, got " + it.to_string(options_.int_width), expr.loc);
      }
      return t.element();
    }
    case NodeKind::List: {
      const auto& elts = items(expr, "elts");
      if (elts.empty()) throw untypeable("the empty list needs a declared type", expr.loc);
      VerifierType elem = type_of(elts[0], scope);
      const AstNode* representative = &elts[0];
      for (std::size_t i = 1; i < elts.size(); ++i) {
        VerifierType t = type_of(elts[i], scope);
        if (t == elem) continue;
        if (is_int_literal(elts[i]) && elem.is(VerifierType::Kind::Int) && !is_int_literal(*representative)) {
          continue;
        }
        if (is_int_literal(*representative) && t.is(VerifierType::Kind::Int)) {
          elem = t;
          representative = &elts[i];
          continue;
        }
        if (elem.is_numeric() && t.is_numeric()) {
          elem = VerifierType::floating();
          continue;
        }
        throw Error(ErrorCode::TypeConflict,
                    "list elements of types " + elem.to_string(options_.int_width) + " and " +
                        t.to_string(options_.int_width),
                    elts[i].loc);
      }
      if (elem.is(VerifierType::Kind::List) || elem.is(VerifierType::Kind::None)) {
        throw untypeable("list elements must be scalars or objects", expr.loc);
      }
      return VerifierType::list_of(elem, elts.size());
    }
    default:
      throw untypeable(std::string(ast::node_kind_name(expr.kind)) + " is not an expression", expr.loc);
  }
}

VerifierType ProgramModel::operand_type(const AstNode& left, const AstNode& right, FunctionInfo& scope) {
  VerifierType tl = type_of(left, scope);
  VerifierType tr = type_of(right, scope);
  const bool ll = is_int_literal(left);
  const bool lr = is_int_literal(right);
  auto fits = [&](const AstNode& lit, const VerifierType& t) {
    if (auto v = plain_literal_value(lit); v && !literal_fits(*v, t)) {
      throw Error(ErrorCode::TypeConflict,
                  "literal " + v->str() + " does not fit in " + t.to_string(options_.int_width), lit.loc);
    }
  };
  if (tl.is(VerifierType::Kind::Int) && tr.is(VerifierType::Kind::Int)) {
    if (ll && !lr) {
      fits(left, tr);
      return tr;
    }
    if (lr && !ll) {
      fits(right, tl);
      return tl;
    }
    if (tl == tr) return tl;
    throw Error(ErrorCode::TypeConflict,
                "mixing " + tl.to_string(options_.int_width) + " and " + tr.to_string(options_.int_width) +
                    " needs an explicit conversion",
                left.loc.valid() ? left.loc : right.loc);
  }
  if (tl.is_numeric() && tr.is_numeric()) return VerifierType::floating();
  if (tl == tr && (tl.is(VerifierType::Kind::Bool) || tl.is(VerifierType::Kind::Class))) return tl;
  if (tl.is(VerifierType::Kind::Class) && tr.is(VerifierType::Kind::Class)) {
    if (is_subclass(tl.class_name(), tr.class_name())) return tr;
    if (is_subclass(tr.class_name(), tl.class_name())) return tl;
  }
  throw Error(ErrorCode::TypeConflict,
              "incompatible operand types " + tl.to_string(options_.int_width) + " and " +
                  tr.to_string(options_.int_width),
              left.loc.valid() ? left.loc : right.loc);
}

VerifierType ProgramModel::type_of_binop(const AstNode& expr, FunctionInfo& scope) {
  const std::string op = op_of(expr);
  const AstNode& left = *expr.child("left");
  const AstNode& right = *expr.child("right");
  VerifierType tl = type_of(left, scope);
  VerifierType tr = type_of(right, scope);

  if (tl.is(VerifierType::Kind::List) || tr.is(VerifierType::Kind::List)) {
    if (op == "Add" && tl.is(VerifierType::Kind::List) && tr.is(VerifierType::Kind::List)) {
      if (tl.element() != tr.element()) throw Error(ErrorCode::TypeConflict, "concatenating different list types", expr.loc);
      return VerifierType::list_of(tl.element(), tl.length() + tr.length());
    }
    if (op == "Mult") {
      const AstNode& count = tl.is(VerifierType::Kind::List) ? right : left;
      const VerifierType& list = tl.is(VerifierType::Kind::List) ? tl : tr;
      auto n = plain_literal_value(count);
      if (!n || *n < 0 || *n > 1 << 16) throw untypeable("list repetition needs a small constant count", expr.loc);
      return VerifierType::list_of(list.element(), list.length() * n->convert_to<std::size_t>());
    }
    throw untypeable("unsupported list operation", expr.loc);
  }
  if (tl.is(VerifierType::Kind::Bool) && tr.is(VerifierType::Kind::Bool) &&
      (op == "BitAnd" || op == "BitOr" || op == "BitXor")) {
    return VerifierType::boolean();
  }
  if (tl.is(VerifierType::Kind::Bool) || tr.is(VerifierType::Kind::Bool)) {
    throw untypeable("bool operand in arithmetic '" + ast::unparse(expr) + "'", expr.loc);
  }
  if (!tl.is_numeric() || !tr.is_numeric()) {
    throw untypeable("operator does not apply to " + tl.to_string(options_.int_width) + " and " +
                         tr.to_string(options_.int_width),
                     expr.loc);
  }
  if (op == "Div") {
    if (tl.is(VerifierType::Kind::Int) && tr.is(VerifierType::Kind::Int)) {
      throw untypeable("'/' on integers is not supported; use '//'", expr.loc);
    }
    return VerifierType::floating();
  }
  VerifierType t = operand_type(left, right, scope);
  if (t.is(VerifierType::Kind::Float) && op != "Add" && op != "Sub" && op != "Mult") {
    throw untypeable("operator in '" + ast::unparse(expr) + "' is not supported on float", expr.loc);
  }
  return t;
}

VerifierType ProgramModel::type_of_attribute(const AstNode& expr, FunctionInfo& scope) {
  const AstNode& value = *expr.child("value");
  const std::string attr = expr.str("attr");
  if (value.is(NodeKind::Name)) {
    auto r = try_resolve_name(value.str("id"), scope);
    if (r && r->kind == Resolution::Kind::Module) {
      const ModuleInfo& other = modules_.at(r->qualified);
      if (other.global_names.count(attr)) {
        auto it = other.globals.find(attr);
        if (it == other.globals.end()) {
          throw Error(ErrorCode::UnknownName, "'" + ast::unparse(expr) + "' is used before it is assigned", expr.loc);
        }
        return it->second;
      }
      throw Error(ErrorCode::MemberNotFound, "module '" + other.name + "' has no variable '" + attr + "'", expr.loc);
    }
    if (r && r->kind == Resolution::Kind::Class) {
      auto a = find_attribute(r->qualified, attr);
      if (!a || !a->class_level) {
        throw Error(ErrorCode::MemberNotFound,
                    "class " + short_name(r->qualified) + " has no class attribute '" + attr + "'", expr.loc);
      }
      return a->type;
    }
  }
  VerifierType t = type_of(value, scope);
  if (!t.is(VerifierType::Kind::Class)) {
    throw untypeable("attribute access on " + t.to_string(options_.int_width), expr.loc);
  }
  ensure_attribute(t.class_name(), attr);
  auto a = find_attribute(t.class_name(), attr);
  if (!a) {
    throw Error(ErrorCode::MemberNotFound,
                "class " + short_name(t.class_name()) + " has no attribute '" + attr + "'", expr.loc);
  }
  return a->type;
}

void ProgramModel::ensure_attribute(const std::string& cls, const std::string& name) {
  if (find_attribute(cls, name)) return;
  // Attributes come into existence in method bodies; type the methods that
  // can already be typed, constructors first.
  auto order = mro(cls);
  for (int pass = 0; pass < 2; ++pass) {
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const ClassInfo& info = classes_.at(*it);
      for (const auto& m : info.methods) {
        if ((pass == 0) != (m == "__init__")) continue;
        FunctionInfo& fn = functions_.at(info.method_qualified.at(m));
        if (fn.state != FunctionInfo::State::Pending) continue;
        bool typed = std::all_of(fn.params.begin(), fn.params.end(), [](const ParamInfo& p) { return p.type.has_value(); });
        if (!typed) continue;
        annotate_function(fn.qualified);
        if (find_attribute(cls, name)) return;
      }
    }
  }
}

ProgramModel::CallTarget ProgramModel::call_target(const AstNode& call, FunctionInfo& scope) {
  const AstNode& func = *call.child("func");
  CallTarget target{CallTarget::Kind::Function, {}, {}, {}, nullptr, false};
  auto constructor = [&](const std::string& cls) {
    target.kind = CallTarget::Kind::Constructor;
    target.klass = cls;
    target.function = find_method(cls, "__init__").value_or("");
  };
  if (func.is(NodeKind::Name)) {
    Resolution r = resolve_name(func.str("id"), scope, func.loc.valid() ? func.loc : call.loc);
    switch (r.kind) {
      case Resolution::Kind::Builtin:
        target.kind = CallTarget::Kind::Builtin;
        target.builtin = r.qualified;
        return target;
      case Resolution::Kind::Function:
        target.function = r.qualified;
        return target;
      case Resolution::Kind::Class:
        constructor(r.qualified);
        return target;
      default:
        throw Error(ErrorCode::UnsupportedConstruct, "calling '" + func.str("id") + "', which is not a function",
                    call.loc);
    }
  }
  if (func.is(NodeKind::Attribute)) {
    const AstNode& value = *func.child("value");
    const std::string attr = func.str("attr");
    if (value.is(NodeKind::Name)) {
      auto r = try_resolve_name(value.str("id"), scope);
      if (r && r->kind == Resolution::Kind::Module) {
        const ModuleInfo& other = modules_.at(r->qualified);
        if (auto it = other.functions.find(attr); it != other.functions.end()) {
          target.function = it->second;
          return target;
        }
        if (auto it = other.classes.find(attr); it != other.classes.end()) {
          constructor(it->second);
          return target;
        }
        throw Error(ErrorCode::MemberNotFound, "module '" + other.name + "' has no function '" + attr + "'", call.loc);
      }
      if (r && r->kind == Resolution::Kind::Class) {
        auto m = find_method(r->qualified, attr);
        if (!m) {
          throw Error(ErrorCode::MemberNotFound, "class " + short_name(r->qualified) + " has no method '" + attr + "'",
                      call.loc);
        }
        target.kind = CallTarget::Kind::Method;
        target.function = *m;
        target.klass = r->qualified;
        target.explicit_self = true;
        return target;
      }
    }
    VerifierType t = type_of(value, scope);
    if (!t.is(VerifierType::Kind::Class)) {
      throw Error(ErrorCode::UnsupportedConstruct, "method call on " + t.to_string(options_.int_width), call.loc);
    }
    auto m = find_method(t.class_name(), attr);
    if (!m) {
      throw Error(ErrorCode::MemberNotFound, "class " + short_name(t.class_name()) + " has no method '" + attr + "'",
                  call.loc);
    }
    target.kind = CallTarget::Kind::Method;
    target.function = *m;
    target.klass = t.class_name();
    target.receiver = &value;
    return target;
  }
  throw Error(ErrorCode::UnsupportedConstruct, "unsupported call target '" + ast::unparse(func) + "'", call.loc);
}

std::vector<const AstNode*> ProgramModel::bind_arguments(const AstNode& call, const FunctionInfo& callee,
                                                         bool skip_self) {
  const std::size_t first = skip_self ? 1 : 0;
  std::vector<const AstNode*> bound(callee.params.size() > first ? callee.params.size() - first : 0, nullptr);
  const auto& args = items(call, "args");
  if (args.size() > bound.size()) {
    throw Error(ErrorCode::TypeConflict,
                "too many arguments in call to " + callee.name + " (" + std::to_string(args.size()) + " given, " +
                    std::to_string(bound.size()) + " expected)",
                call.loc);
  }
  for (std::size_t i = 0; i < args.size(); ++i) bound[i] = &args[i];
  for (const auto& kw : items(call, "keywords")) {
    const std::string name = kw.str("arg");
    std::size_t slot = bound.size();
    for (std::size_t i = first; i < callee.params.size(); ++i) {
      if (callee.params[i].name == name) slot = i - first;
    }
    if (slot == bound.size()) {
      throw Error(ErrorCode::TypeConflict, callee.name + "() has no parameter '" + name + "'", call.loc);
    }
    if (bound[slot]) throw Error(ErrorCode::TypeConflict, "argument '" + name + "' given twice", call.loc);
    bound[slot] = kw.child("value");
  }
  for (std::size_t i = 0; i < bound.size(); ++i) {
    if (!bound[i]) bound[i] = callee.params[i + first].default_value;
    if (!bound[i]) {
      throw Error(ErrorCode::TypeConflict,
                  "missing argument '" + callee.params[i + first].name + "' in call to " + callee.name, call.loc);
    }
  }
  return bound;
}

void ProgramModel::check_call_arguments(const AstNode& call, FunctionInfo& callee, bool skip_self,
                                        FunctionInfo& scope) {
  auto bound = bind_arguments(call, callee, skip_self);
  const std::size_t first = skip_self ? 1 : 0;
  for (std::size_t i = 0; i < bound.size(); ++i) {
    ParamInfo& p = callee.params[i + first];
    // Defaults are evaluated in the callee's defining module.
    FunctionInfo& arg_scope = bound[i] == p.default_value ? functions_.at(modules_.at(callee.module).top_function)
                                                         : scope;
    VerifierType at = type_of(*bound[i], arg_scope);
    if (!p.type) {
      if (callee.state != FunctionInfo::State::Pending) {
        throw untypeable("cannot infer the type of parameter '" + p.name + "'", p.loc);
      }
      if (at.is(VerifierType::Kind::None)) throw untypeable("None argument for '" + p.name + "'", call.loc);
      p.type = at;
      continue;
    }
    if (p.type->is(VerifierType::Kind::List) && p.type->length() == kUnknownLength &&
        at.is(VerifierType::Kind::List) && assignable(at.element(), p.type->element(), nullptr)) {
      p.type = VerifierType::list_of(p.type->element(), at.length());
      continue;
    }
    check_assignable(at, *p.type, *bound[i], bound[i]->loc.valid() ? bound[i]->loc : call.loc);
  }
  ensure_signature(callee.qualified);
}

const FunctionInfo& ProgramModel::ensure_signature(const std::string& qualified) {
  FunctionInfo& fn = functions_.at(qualified);
  if (fn.state == FunctionInfo::State::Pending) annotate_function(qualified);
  if (!fn.result && fn.state == FunctionInfo::State::InProgress) {
    throw untypeable("recursive call to " + fn.name + " before its return type is known; annotate the return type",
                     fn.loc);
  }
  return fn;
}

VerifierType ProgramModel::type_of_call(const AstNode& call, FunctionInfo& scope) {
  CallTarget target = call_target(call, scope);
  switch (target.kind) {
    case CallTarget::Kind::Builtin:
      return type_of_builtin(target.builtin, call, scope);
    case CallTarget::Kind::Function: {
      FunctionInfo& callee = functions_.at(target.function);
      if (callee.is_method()) {
        throw untypeable("method " + callee.name + " called without a receiver", call.loc);
      }
      check_call_arguments(call, callee, false, scope);
      return callee.result.value_or(VerifierType::none());
    }
    case CallTarget::Kind::Method: {
      FunctionInfo& callee = functions_.at(target.function);
      check_call_arguments(call, callee, !target.explicit_self, scope);
      if (!target.explicit_self) {
        // Overrides reachable by dynamic dispatch receive the same arguments.
        for (const auto& d : descendants(target.klass)) {
          auto m = find_method(d, callee.name);
          if (m && *m != callee.qualified) {
            FunctionInfo& override_fn = functions_.at(*m);
            check_call_arguments(call, override_fn, true, scope);
            VerifierType a = override_fn.result.value_or(VerifierType::none());
            VerifierType b = callee.result.value_or(VerifierType::none());
            if (a != b) {
              throw Error(ErrorCode::TypeConflict,
                          "override " + short_name(d) + "." + callee.name + " returns " +
                              a.to_string(options_.int_width) + " but the overridden method returns " +
                              b.to_string(options_.int_width),
                          override_fn.loc);
            }
          }
        }
      }
      return callee.result.value_or(VerifierType::none());
    }
    case CallTarget::Kind::Constructor: {
      if (target.function.empty()) {
        if (!items(call, "args").empty() || !items(call, "keywords").empty()) {
          throw Error(ErrorCode::TypeConflict, short_name(target.klass) + "() takes no arguments", call.loc);
        }
      } else {
        check_call_arguments(call, functions_.at(target.function), true, scope);
      }
      return VerifierType::class_ref(target.klass);
    }
  }
  throw Error(ErrorCode::Internal, "unhandled call kind", call.loc);
}

VerifierType ProgramModel::type_of_builtin(const std::string& name, const AstNode& call, FunctionInfo& scope) {
  const auto& args = items(call, "args");
  if (!items(call, "keywords").empty()) throw untypeable(name + "() takes no keyword arguments", call.loc);
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw Error(ErrorCode::TypeConflict, name + "() called with " + std::to_string(args.size()) + " arguments",
                  call.loc);
    }
  };
  const VerifierType default_int = VerifierType::integer(options_.int_width, true);
  if (name.rfind("nondet_", 0) == 0) {
    arity(0, 0);
    if (name == "nondet_int") return default_int;
    if (name == "nondet_bool") return VerifierType::boolean();
    if (name == "nondet_float") return VerifierType::floating();
    return *builtin_type_named(name.substr(7), options_.int_width);
  }
  if (name == "__ESBMC_assume" || name == "__VERIFIER_assume") {
    arity(1, 1);
    check_condition(args[0], scope);
    return VerifierType::none();
  }
  if (name == "abs") {
    arity(1, 1);
    VerifierType t = type_of(args[0], scope);
    if (!t.is_numeric()) throw untypeable("abs() of " + t.to_string(options_.int_width), call.loc);
    return t;
  }
  if (name == "min" || name == "max") {
    if (args.size() < 2) throw Error(ErrorCode::TypeConflict, name + "() needs at least two arguments", call.loc);
    VerifierType t = type_of(args[0], scope);
    const AstNode* representative = &args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
      t = operand_type(*representative, args[i], scope);
      if (!is_int_literal(args[i]) || type_of(args[i], scope) == t) representative = &args[i];
      if (!t.is_numeric()) throw untypeable(name + "() of " + t.to_string(options_.int_width), call.loc);
      if (t.is(VerifierType::Kind::Float)) {
        for (const auto& a : args) {
          if (!type_of(a, scope).is_numeric()) throw untypeable(name + "() of non-numeric values", call.loc);
        }
        return t;
      }
    }
    return t;
  }
  if (name == "int" || name == "float" || name == "bool") {
    arity(1, 1);
    VerifierType t = type_of(args[0], scope);
    if (!t.is_scalar()) throw untypeable(name + "() of " + t.to_string(options_.int_width), call.loc);
    return *builtin_type_named(name, options_.int_width);
  }
  if (name == "len") {
    arity(1, 1);
    VerifierType t = type_of(args[0], scope);
    if (!t.is(VerifierType::Kind::List)) throw untypeable("len() of " + t.to_string(options_.int_width), call.loc);
    return default_int;
  }
  if (name == "range") throw untypeable("range() is only supported as a for-loop iterable", call.loc);
  if (name == "$nondet") throw untypeable("nondeterministic value without a declared type", call.loc);
  if (auto t = builtin_type_named(name, options_.int_width)) {
    arity(1, 1);
    VerifierType a = type_of(args[0], scope);
    if (!a.is_scalar()) throw untypeable(name + "() of " + a.to_string(options_.int_width), call.loc);
    return *t;
  }
  throw Error(ErrorCode::UnknownName, "unknown builtin '" + name + "'", call.loc);
}

// ---------------------------------------------------------------------------
// Statements

bool ProgramModel::assignable(const VerifierType& from, const VerifierType& to, const AstNode* value) const {
  if (from == to) {
    if (value && to.is(VerifierType::Kind::Int)) {
      if (auto v = plain_literal_value(*value)) return literal_fits(*v, to);
    }
    return true;
  }
  if (to.is(VerifierType::Kind::Int) && from.is(VerifierType::Kind::Int) && value && is_int_literal(*value)) {
    if (auto v = plain_literal_value(*value)) return literal_fits(*v, to);
    return true;
  }
  if (to.is(VerifierType::Kind::Float) && from.is(VerifierType::Kind::Int)) return true;
  if (to.is(VerifierType::Kind::Class) && from.is(VerifierType::Kind::Class)) {
    return is_subclass(from.class_name(), to.class_name());
  }
  if (to.is(VerifierType::Kind::List) && from.is(VerifierType::Kind::List)) {
    if (to.length() != kUnknownLength && to.length() != from.length()) return false;
    if (value && value->is(NodeKind::List)) {
      const auto& elts = items(*value, "elts");
      for (const auto& e : elts) {
        // Element types were checked when the literal was typed; literals adapt.
        if (is_int_literal(e) && to.element().is(VerifierType::Kind::Int)) {
          if (auto v = plain_literal_value(e); v && !literal_fits(*v, to.element())) return false;
          continue;
        }
        if (!assignable(from.element(), to.element(), &e)) return false;
      }
      return true;
    }
    return from.element() == to.element();
  }
  return false;
}

void ProgramModel::check_assignable(const VerifierType& from, const VerifierType& to, const AstNode& value,
                                    const SourceLocation& loc) {
  if (!assignable(from, to, &value)) {
    if (auto v = plain_literal_value(value); v && from.is(VerifierType::Kind::Int) && to.is(VerifierType::Kind::Int)) {
      throw Error(ErrorCode::TypeConflict,
                  "literal " + v->str() + " does not fit in " + to.to_string(options_.int_width), loc);
    }
    throw Error(ErrorCode::TypeConflict,
                "cannot use " + from.to_string(options_.int_width) + " where " + to.to_string(options_.int_width) +
                    " is expected",
                loc);
  }
}

VerifierType ProgramModel::normalize_inferred(const VerifierType& type) const { return type; }

void ProgramModel::define_variable(const std::string& id, const VerifierType& type, FunctionInfo& fn,
                                   const SourceLocation& loc) {
  if (type.is(VerifierType::Kind::Function)) {
    throw untypeable("functions cannot be stored in variables", loc);
  }
  if (type.is(VerifierType::Kind::List) && type.length() == kUnknownLength) {
    throw untypeable("the length of list '" + id + "' is unknown", loc);
  }
  std::map<std::string, VerifierType>& table =
      fn.is_module_top ? modules_.at(fn.module).globals : fn.locals;
  auto it = table.find(id);
  if (it == table.end()) {
    table.emplace(id, type);
    return;
  }
  if (it->second != type) {
    throw Error(ErrorCode::TypeConflict,
                "'" + id + "' has type " + it->second.to_string(options_.int_width) + " and cannot be re-declared as " +
                    type.to_string(options_.int_width),
                loc);
  }
}

void ProgramModel::check_condition(const AstNode& test, FunctionInfo& fn) {
  VerifierType t = type_of(test, fn);
  if (!t.is_scalar()) {
    throw untypeable("condition must be bool or numeric, got " + t.to_string(options_.int_width),
                     test.loc.valid() ? test.loc : SourceLocation{});
  }
}

void ProgramModel::annotate_assignment(AstNode& stmt, FunctionInfo& fn) {
  const bool is_ann = stmt.is(NodeKind::AnnAssign);
  if (!is_ann && items(stmt, "targets").size() != 1) {
    throw Error(ErrorCode::UnsupportedConstruct, "assignment to several targets", stmt.loc);
  }
  AstNode target = is_ann ? *stmt.child("target") : items(stmt, "targets")[0];
  const AstNode* value = stmt.child("value");

  std::optional<VerifierType> declared;
  if (is_ann) declared = parse_annotation(*stmt.child("annotation"), fn.module);

  // The value is evaluated before the target is bound.
  std::optional<VerifierType> vt;
  if (value) {
    if (is_call_to(*value, "$nondet")) {
      if (!declared) throw untypeable("nondeterministic value without a declared type", stmt.loc);
      vt = declared;
    } else if (value->is(NodeKind::List) && items(*value, "elts").empty()) {
      if (!declared || !declared->is(VerifierType::Kind::List)) {
        throw untypeable("the empty list needs a declared type", stmt.loc);
      }
      vt = VerifierType::list_of(declared->element(), 0);
    } else {
      vt = type_of(*value, fn);
    }
    if (vt->is(VerifierType::Kind::None)) throw untypeable("assignment of None", stmt.loc);
  }

  // Type of an already-known target, if any.
  std::optional<VerifierType> existing;
  switch (target.kind) {
    case NodeKind::Name: {
      auto r = try_resolve_name(target.str("id"), fn);
      if (r && r->kind != Resolution::Kind::Variable) {
        throw Error(ErrorCode::DuplicateDefinition, "assignment to '" + target.str("id") + "', which is not a variable",
                    stmt.loc);
      }
      if (r) existing = r->type;
      break;
    }
    case NodeKind::Attribute: {
      const AstNode& obj = *target.child("value");
      const std::string attr = target.str("attr");
      VerifierType ot = type_of(obj, fn);
      if (!ot.is(VerifierType::Kind::Class)) throw untypeable("attribute assignment on a non-object", stmt.loc);
      if (auto a = find_attribute(ot.class_name(), attr); a && !a->class_level) existing = a->type;
      break;
    }
    case NodeKind::Subscript:
      existing = type_of(target, fn);
      break;
    default:
      throw Error(ErrorCode::UnsupportedConstruct, "assignment target '" + ast::unparse(target) + "'", stmt.loc);
  }

  VerifierType final_type = declared ? *declared : existing ? *existing : *vt;
  if (final_type.is(VerifierType::Kind::List) && final_type.length() == kUnknownLength) {
    if (existing && existing->is(VerifierType::Kind::List)) {
      final_type = VerifierType::list_of(final_type.element(), existing->length());
    } else if (vt && vt->is(VerifierType::Kind::List)) {
      final_type = VerifierType::list_of(final_type.element(), vt->length());
    }
  }
  if (vt) check_assignable(*vt, final_type, *value, stmt.loc);
  if (existing && *existing != final_type) {
    throw Error(ErrorCode::TypeConflict,
                "'" + ast::unparse(target) + "' has type " + existing->to_string(options_.int_width) +
                    " and cannot be re-declared as " + final_type.to_string(options_.int_width),
                stmt.loc);
  }

  switch (target.kind) {
    case NodeKind::Name:
      define_variable(target.str("id"), final_type, fn, stmt.loc);
      break;
    case NodeKind::Attribute:
      if (!existing) {
        const AstNode& obj = *target.child("value");
        const bool on_self = fn.is_method() && obj.is(NodeKind::Name) && obj.str("id") == fn.params[0].name;
        if (!on_self) {
          throw Error(ErrorCode::MemberNotFound,
                      "new attribute '" + target.str("attr") + "' must be created through the receiver", stmt.loc);
        }
        AttributeInfo a;
        a.name = target.str("attr");
        a.type = final_type;
        a.owner = fn.owner_class;
        a.loc = stmt.loc;
        if (final_type.is(VerifierType::Kind::Class) && is_subclass(final_type.class_name(), fn.owner_class)) {
          throw Error(ErrorCode::UnsupportedConstruct, "attribute '" + a.name + "' makes the object recursive", stmt.loc);
        }
        classes_.at(fn.owner_class).attributes.push_back(std::move(a));
      }
      break;
    default:
      break;
  }

  if (!is_ann) {
    stmt.kind = NodeKind::AnnAssign;
    stmt.type_name = "AnnAssign";
    stmt.erase("targets");
    stmt.erase("type_comment");
    stmt.set_child("target", target);
    stmt.set_child("annotation", annotation_node(final_type, fn.module, stmt.loc));
    stmt.set_scalar("simple", ast::Scalar::from_int(target.is(NodeKind::Name) ? "1" : "0"));
  }
}

void ProgramModel::annotate_for(AstNode& stmt, FunctionInfo& fn) {
  const AstNode& target = *stmt.child("target");
  if (!target.is(NodeKind::Name)) throw Error(ErrorCode::UnsupportedConstruct, "for-loop target", stmt.loc);
  const AstNode& iter = *stmt.child("iter");
  VerifierType var_type = VerifierType::none();
  if (is_call_to(iter, "range") && try_resolve_name("range", fn)->kind == Resolution::Kind::Builtin) {
    const auto& args = items(iter, "args");
    if (args.empty() || args.size() > 3 || !items(iter, "keywords").empty()) {
      throw Error(ErrorCode::TypeConflict, "range() takes one to three arguments", iter.loc);
    }
    const AstNode* representative = &args[0];
    var_type = type_of(args[0], fn);
    for (std::size_t i = 1; i < args.size(); ++i) {
      var_type = operand_type(*representative, args[i], fn);
      if (!is_int_literal(args[i])) representative = &args[i];
    }
    for (const auto& a : args) {
      if (!type_of(a, fn).is(VerifierType::Kind::Int)) throw untypeable("range() arguments must be integers", a.loc);
    }
    if (args.size() == 3) {
      auto step = plain_literal_value(args[2]);
      if (!step) throw untypeable("range() step must be an integer constant", args[2].loc);
      if (*step == 0) throw Error(ErrorCode::TypeConflict, "range() step must not be zero", args[2].loc);
    }
  } else {
    VerifierType it = type_of(iter, fn);
    if (!it.is(VerifierType::Kind::List)) {
      throw Error(ErrorCode::UnsupportedConstruct, "for loops iterate over range() or a list", iter.loc);
    }
    var_type = it.element();
  }
  auto r = try_resolve_name(target.str("id"), fn);
  if (r && r->type && *r->type != var_type) {
    throw Error(ErrorCode::TypeConflict,
                "loop variable '" + target.str("id") + "' has type " + r->type->to_string(options_.int_width) +
                    " but iterates over " + var_type.to_string(options_.int_width),
                stmt.loc);
  }
  define_variable(target.str("id"), var_type, fn, stmt.loc);
  std::vector<AstNode*> body;
  for (auto& s : stmt.list("body")) body.push_back(&s);
  annotate_block(body, fn);
}

void ProgramModel::annotate_statement(AstNode& stmt, FunctionInfo& fn) {
  auto block = [&](const std::string& field) {
    std::vector<AstNode*> stmts;
    auto it = stmt.children.find(field);
    if (it != stmt.children.end()) {
      for (auto& s : it->second.nodes) stmts.push_back(&s);
    }
    annotate_block(stmts, fn);
  };
  switch (stmt.kind) {
    case NodeKind::AnnAssign:
    case NodeKind::Assign:
      annotate_assignment(stmt, fn);
      break;
    case NodeKind::AugAssign: {
      VerifierType t = type_of(*stmt.child("target"), fn);
      AstNode op = ast::make_node(NodeKind::BinOp, "BinOp", stmt.loc);
      op.set_child("left", *stmt.child("target"));
      op.set_child("op", *stmt.child("op"));
      op.set_child("right", *stmt.child("value"));
      VerifierType r = type_of_binop(op, fn);
      if (r != t) {
        throw Error(ErrorCode::TypeConflict,
                    "'" + ast::unparse(*stmt.child("target")) + "' has type " + t.to_string(options_.int_width) +
                        " but the update produces " + r.to_string(options_.int_width),
                    stmt.loc);
      }
      break;
    }
    case NodeKind::If:
      check_condition(*stmt.child("test"), fn);
      block("body");
      block("orelse");
      break;
    case NodeKind::While:
      check_condition(*stmt.child("test"), fn);
      block("body");
      break;
    case NodeKind::For:
      annotate_for(stmt, fn);
      break;
    case NodeKind::Return: {
      if (fn.is_module_top) throw Error(ErrorCode::UnsupportedConstruct, "return outside a function", stmt.loc);
      const AstNode* value = stmt.child("value");
      VerifierType vt = value ? type_of(*value, fn) : VerifierType::none();
      if (!fn.result) {
        fn.result = vt;
      } else if (fn.result->is(VerifierType::Kind::List) && fn.result->length() == kUnknownLength &&
                 vt.is(VerifierType::Kind::List)) {
        if (!assignable(vt.element(), fn.result->element(), nullptr)) {
          throw Error(ErrorCode::TypeConflict, "returned list has the wrong element type", stmt.loc);
        }
        fn.result = VerifierType::list_of(fn.result->element(), vt.length());
      } else if (value) {
        check_assignable(vt, *fn.result, *value, stmt.loc);
      } else if (!fn.result->is(VerifierType::Kind::None)) {
        throw Error(ErrorCode::TypeConflict, fn.name + " must return " + fn.result->to_string(options_.int_width),
                    stmt.loc);
      }
      break;
    }
    case NodeKind::Expr: {
      const AstNode& value = *stmt.child("value");
      const ast::Scalar* s = value.is(NodeKind::Constant) ? value.scalar("value") : nullptr;
      if (s && s->kind == ast::Scalar::Kind::String) break;  // docstring
      type_of(value, fn);
      break;
    }
    case NodeKind::Assert:
      check_condition(*stmt.child("test"), fn);
      break;
    case NodeKind::ClassDef: {
      ClassInfo& cls = classes_.at(modules_.at(fn.module).classes.at(stmt.str("name")));
      for (auto& member : stmt.list("body")) {
        if (!member.is(NodeKind::AnnAssign) && !member.is(NodeKind::Assign)) continue;
        const AstNode* target = member.is(NodeKind::AnnAssign) ? member.child("target") : &items(member, "targets")[0];
        if (!target->is(NodeKind::Name)) {
          throw Error(ErrorCode::UnsupportedConstruct, "class attribute target", member.loc);
        }
        const std::string name = target->str("id");
        const AstNode* value = member.child("value");
        if (!value) throw untypeable("class attribute '" + name + "' needs a value", member.loc);
        VerifierType vt = type_of(*value, fn);
        VerifierType t = vt;
        if (member.is(NodeKind::AnnAssign)) {
          t = parse_annotation(*member.child("annotation"), fn.module);
          if (t.is(VerifierType::Kind::List) && t.length() == kUnknownLength && vt.is(VerifierType::Kind::List)) {
            t = VerifierType::list_of(t.element(), vt.length());
          }
        }
        check_assignable(vt, t, *value, member.loc);
        if (t.is(VerifierType::Kind::List) && t.length() == kUnknownLength) {
          throw untypeable("the length of list '" + name + "' is unknown", member.loc);
        }
        if (cls.own_attribute(name)) {
          throw Error(ErrorCode::DuplicateDefinition, "class attribute '" + name + "' is defined twice", member.loc);
        }
        AttributeInfo a;
        a.name = name;
        a.type = t;
        a.owner = cls.qualified;
        a.class_level = true;
        a.value = value;
        a.loc = member.loc;
        cls.attributes.push_back(std::move(a));
        if (member.is(NodeKind::Assign)) {
          AstNode tgt = *target;
          member.kind = NodeKind::AnnAssign;
          member.type_name = "AnnAssign";
          member.erase("targets");
          member.erase("type_comment");
          member.set_child("target", tgt);
          member.set_child("annotation", annotation_node(t, fn.module, member.loc));
          member.set_scalar("simple", ast::Scalar::from_int("1"));
        }
      }
      break;
    }
    case NodeKind::Pass:
    case NodeKind::Break:
    case NodeKind::Continue:
    case NodeKind::Import:
    case NodeKind::ImportFrom:
      break;
    default:
      throw Error(ErrorCode::UnsupportedConstruct,
                  std::string(ast::node_kind_name(stmt.kind)) + " statement", stmt.loc);
  }
}

void ProgramModel::annotate_block(std::vector<AstNode*> stmts, FunctionInfo& fn) {
  for (AstNode* stmt : stmts) {
    if (!collect_) {
      annotate_statement(*stmt, fn);
      continue;
    }
    try {
      annotate_statement(*stmt, fn);
    } catch (const Error& e) {
      diagnostics_.push_back({e.code(), e.detail(), e.location().valid() ? e.location() : stmt->loc});
    }
  }
}

void ProgramModel::annotate_function(const std::string& qualified) {
  FunctionInfo& fn = functions_.at(qualified);
  if (fn.state != FunctionInfo::State::Pending) return;
  for (auto& p : fn.params) {
    if (p.type) continue;
    if (p.default_value) {
      p.type = type_of(*p.default_value, functions_.at(modules_.at(fn.module).top_function));
      continue;
    }
    throw untypeable("cannot infer the type of parameter '" + p.name + "' of " + fn.name +
                         "; annotate it or call the function",
                     p.loc);
  }
  for (const auto& p : fn.params) {
    if (p.type->is(VerifierType::Kind::List) && p.type->length() == kUnknownLength) {
      throw untypeable("the length of list parameter '" + p.name + "' is unknown", p.loc);
    }
  }
  fn.state = FunctionInfo::State::InProgress;
  for (const auto& p : fn.params) fn.locals[p.name] = *p.type;
  annotate_block(fn.body, fn);
  if (!fn.result) fn.result = VerifierType::none();
  if (fn.result->is(VerifierType::Kind::List) && fn.result->length() == kUnknownLength) {
    throw untypeable(fn.name + " returns a list of unknown length", fn.loc);
  }
  fn.state = FunctionInfo::State::Done;

  if (fn.def) {
    AstNode* args = fn.def->child("args");
    auto it = args->children.find("args");
    if (it != args->children.end()) {
      for (std::size_t i = 0; i < it->second.nodes.size(); ++i) {
        AstNode& arg = it->second.nodes[i];
        if (!arg.child("annotation")) arg.set_child("annotation", annotation_node(*fn.params[i].type, fn.module, arg.loc));
      }
    }
    if (!fn.def->child("returns")) fn.def->set_child("returns", annotation_node(*fn.result, fn.module, fn.def->loc));
  }
}

std::optional<std::string> ProgramModel::isolated_target() const {
  if (!unit_.isolated_function) return std::nullopt;
  const std::string& name = *unit_.isolated_function;
  const ModuleInfo& main = modules_.at(unit_.main_module.name);
  auto dot = name.find('.');
  if (dot == std::string::npos) {
    if (auto it = main.functions.find(name); it != main.functions.end()) return it->second;
  } else if (auto it = main.classes.find(name.substr(0, dot)); it != main.classes.end()) {
    if (auto m = find_method(it->second, name.substr(dot + 1))) return *m;
  }
  throw Error(ErrorCode::FunctionNotFound, "function '" + name + "' not found");
}

std::vector<AstNode*> ProgramModel::initializer_statements() const {
  std::vector<AstNode*> out;
  const FunctionInfo& top = functions_.at(modules_.at(unit_.main_module.name).top_function);
  for (AstNode* stmt : top.body) {
    if (lazy_statements_.count(stmt)) out.push_back(stmt);
  }
  return out;
}

void ProgramModel::type_global_lazily(const std::string& id) {
  FunctionInfo& top = functions_.at(modules_.at(unit_.main_module.name).top_function);
  for (AstNode* stmt : top.body) {
    if (lazy_statements_.count(stmt)) continue;
    const AstNode* target = nullptr;
    if (stmt->is(NodeKind::AnnAssign)) target = stmt->child("target");
    if (stmt->is(NodeKind::Assign) && items(*stmt, "targets").size() == 1) target = &items(*stmt, "targets")[0];
    if (!target || !target->is(NodeKind::Name) || target->str("id") != id) continue;
    lazy_statements_.insert(stmt);
    annotate_statement(*stmt, top);
  }
}

void ProgramModel::annotate(bool collect_diagnostics) {
  collect_ = collect_diagnostics;
  auto guarded = [&](const std::string& q) {
    if (!collect_) {
      annotate_function(q);
      return;
    }
    try {
      annotate_function(q);
    } catch (const Error& e) {
      diagnostics_.push_back({e.code(), e.detail(), e.location()});
      FunctionInfo& fn = functions_.at(q);
      fn.state = FunctionInfo::State::Done;
      for (auto& p : fn.params) {
        if (!p.type) p.type = VerifierType::none();
      }
      if (!fn.result) fn.result = VerifierType::none();
    }
  };
  if (unit_.isolated_function) {
    // Only the isolated function, its callees and the declarations they use
    // are typed; the rest of the main module may lie outside the subset.
    for (const auto& m : unit_.imported_modules) guarded(modules_.at(m.name).top_function);
    FunctionInfo& top = functions_.at(modules_.at(unit_.main_module.name).top_function);
    top.state = FunctionInfo::State::InProgress;
    annotate_block([&] {
      std::vector<AstNode*> classes;
      for (AstNode* stmt : top.body) {
        if (stmt->is(NodeKind::ClassDef)) classes.push_back(stmt);
      }
      return classes;
    }(), top);
    lazy_globals_ = true;
    guarded(*isolated_target());
    return;
  }
  for (const auto& m : module_order_) guarded(modules_.at(m).top_function);
  for (std::size_t i = 0; i < function_order_.size(); ++i) guarded(function_order_[i]);
}

}  // namespace pybmc
