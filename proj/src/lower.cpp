// Lowering of the annotated program to GOTO instructions. Every value is a
// vector of scalar leaf expressions in the order of ProgramModel::leaves, so
// objects and lists need no memory model.

#include <algorithm>
#include <functional>

#include "pybmc/goto.hpp"

namespace pybmc {

using ast::AstNode;
using ast::NodeKind;

namespace {

using Val = std::vector<Expr>;

const std::vector<AstNode>& items(const AstNode& node, std::string_view field) { return node.list(field); }

std::string op_of(const AstNode& node) {
  const AstNode* op = node.child("op");
  return op ? op->type_name : std::string();
}

std::optional<cpp_int> plain_literal(const AstNode& expr) {
  if (expr.is(NodeKind::Constant)) {
    const ast::Scalar* v = expr.scalar("value");
    if (v && v->kind == ast::Scalar::Kind::Int) return cpp_int(v->text);
    return std::nullopt;
  }
  if (expr.is(NodeKind::UnaryOp) && (op_of(expr) == "USub" || op_of(expr) == "UAdd")) {
    auto inner = plain_literal(*expr.child("operand"));
    if (inner && op_of(expr) == "USub") return -*inner;
    return inner;
  }
  return std::nullopt;
}

bool is_pure_builtin(const std::string& name) {
  return name != "__ESBMC_assume" && name != "__VERIFIER_assume";
}

// Whether evaluating `e` may emit instructions or safety checks; such
// operands of `and`, `or` and conditional expressions need real branches.
bool effectful(const AstNode& e, ProgramModel& m, FunctionInfo& scope) {
  switch (e.kind) {
    case NodeKind::Call: {
      auto target = m.call_target(e, scope);
      if (target.kind != ProgramModel::CallTarget::Kind::Builtin || !is_pure_builtin(target.builtin)) return true;
      break;
    }
    case NodeKind::Subscript:
      return true;
    case NodeKind::BinOp: {
      const std::string op = op_of(e);
      if (op == "FloorDiv" || op == "Mod" || op == "Add" || op == "Sub" || op == "Mult") return true;
      break;
    }
    case NodeKind::UnaryOp:
      if (op_of(e) == "USub" && !plain_literal(e)) return true;
      break;
    default:
      break;
  }
  for (const auto& [field, child] : e.children) {
    if (field == "func") continue;
    for (const auto& c : child.nodes) {
      if (effectful(c, m, scope)) return true;
    }
  }
  return false;
}

bool path_within(const std::string& path, const std::string& prefix) {
  if (path.size() < prefix.size() || path.compare(0, prefix.size(), prefix) != 0) return false;
  return path.size() == prefix.size() || path[prefix.size()] == '.' || path[prefix.size()] == '[';
}

}  // namespace

Sort sort_of(const VerifierType& type) {
  switch (type.kind()) {
    case VerifierType::Kind::Bool: return Sort::boolean();
    case VerifierType::Kind::Int: return Sort::bitvec(type.width());
    case VerifierType::Kind::Float: return Sort::fp64();
    default: throw Error(ErrorCode::UnsupportedSort, "no scalar sort for " + type.to_string());
  }
}

Value zero_value(const Sort& sort) {
  switch (sort.kind) {
    case Sort::Kind::Bool: return Value::boolean(false);
    case Sort::Kind::BitVec: return Value::bitvec(sort.width, 0);
    case Sort::Kind::Float: return Value::fp(0.0);
  }
  return Value::boolean(false);
}

namespace {

class Lowerer {
 public:
  Lowerer(SymbolTable& st, GotoProgram& gp) : st_(st), m_(st.model()), gp_(gp) {}

  GotoFunction lower_function(const std::string& qualified) {
    fn_ = m_.function(qualified);
    scope_ = fn_;
    GotoFunction out;
    out.name = qualified;
    code_ = &out.body;
    temps_ = 0;
    returns_.clear();
    loops_.clear();
    pending_.clear();

    if (!fn_->is_module_top) {
      for (const auto& p : fn_->params) {
        Val leaves = symbols(fn_->qualified + "@" + p.name, *p.type);
        out.params.insert(out.params.end(), leaves.begin(), leaves.end());
      }
      // Locals start from a fixed value so stale frames never leak in.
      for (const auto& [name, type] : fn_->locals) {
        bool is_param = std::any_of(fn_->params.begin(), fn_->params.end(),
                                    [&](const ParamInfo& p) { return p.name == name; });
        if (is_param) continue;
        for (const auto& leaf : symbols(fn_->qualified + "@" + name, type)) {
          Instruction ins;
          ins.kind = InstrKind::Decl;
          ins.lhs = leaf;
          emit(std::move(ins), fn_->loc);
        }
      }
    }
    if (fn_->result && !fn_->result->is(VerifierType::Kind::None)) {
      out.returns = symbols(fn_->qualified + "@$return", *fn_->result);
    }
    returns_symbols_ = out.returns;
    for (const auto& pre : fn_->prelude) {
      auto site = std::make_shared<CallSite>();
      site->callee = pre;
      Instruction ins;
      ins.kind = InstrKind::FunctionCall;
      ins.call = site;
      emit(std::move(ins), fn_->loc);
    }
    lower_block(fn_->body);
    std::size_t end = code_->size();
    for (std::size_t r : returns_) (*code_)[r].target = end;
    Instruction fin;
    fin.kind = InstrKind::End;
    emit(std::move(fin), fn_->loc);
    return out;
  }

 private:
  // -------------------------------------------------------------------------
  // Emission helpers

  std::size_t emit(Instruction ins, const SourceLocation& loc) {
    ins.loc = loc;
    ins.function = fn_->qualified;
    if (!pending_.empty()) {
      ins.checks = std::move(pending_);
      pending_.clear();
    }
    code_->push_back(std::move(ins));
    return code_->size() - 1;
  }

  void assign(const Expr& lhs, const Expr& rhs, const SourceLocation& loc) {
    Instruction ins;
    ins.kind = InstrKind::Assign;
    ins.lhs = lhs;
    ins.expr = rhs;
    emit(std::move(ins), loc);
  }

  void assign_all(const Val& lhs, const Val& rhs, const SourceLocation& loc) {
    for (std::size_t i = 0; i < lhs.size(); ++i) assign(lhs[i], rhs[i], loc);
    if (lhs.empty() && !pending_.empty()) skip(loc);
  }

  void skip(const SourceLocation& loc) {
    Instruction ins;
    ins.kind = InstrKind::Skip;
    emit(std::move(ins), loc);
  }

  // Jump taken when `guard` holds; target patched by the caller.
  std::size_t jump(const Expr& guard, const SourceLocation& loc) {
    Instruction ins;
    ins.kind = InstrKind::Goto;
    if (guard && !guard.is_true()) ins.expr = guard;
    return emit(std::move(ins), loc);
  }

  void patch(std::size_t at, std::size_t target) { (*code_)[at].target = target; }
  std::size_t here() const { return code_->size(); }

  void check(PropertyClass cls, const Expr& condition, std::string text, const SourceLocation& loc) {
    pending_.push_back({cls, condition, std::move(text), loc});
  }

  // -------------------------------------------------------------------------
  // Types and symbols

  VerifierType type(const AstNode& e) { return m_.type_of(e, *scope_); }
  unsigned int_width() const { return m_.options().int_width; }

  Val symbols(const std::string& base, const VerifierType& t) {
    Val out;
    for (const auto& leaf : m_.leaves(t)) {
      std::string name = base + leaf.path;
      gp_.leaf_types.emplace(name, leaf.type);
      out.push_back(Expr::symbol(name, sort_of(leaf.type)));
    }
    return out;
  }

  Val temp(const VerifierType& t) { return symbols(fn_->qualified + "@$t" + std::to_string(++temps_), t); }

  Val zero(const VerifierType& t) {
    Val out;
    for (const auto& leaf : m_.leaves(t)) out.push_back(Expr::constant(zero_value(sort_of(leaf.type))));
    return out;
  }

  Expr constant_int(const VerifierType& t, const cpp_int& v) { return Expr::integer(t.width(), v); }

  // Fresh object of class `cls`: zero fields and the class tag.
  Val fresh_object(const std::string& cls, const SourceLocation& loc) {
    VerifierType t = VerifierType::class_ref(cls);
    Val obj = temp(t);
    Val init = zero(t);
    init[0] = Expr::integer(32, m_.klass(cls)->tag);
    assign_all(obj, init, loc);
    return obj;
  }

  Val nondet_value(const VerifierType& t) {
    Val out;
    const auto leaves = m_.leaves(t);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (leaves[i].path.size() >= 7 && leaves[i].path.compare(leaves[i].path.size() - 7, 7, ".$class") == 0) {
        // Class tags are fixed by the declared type.
        const std::string& path = leaves[i].path;
        std::string owner_path = path.substr(0, path.size() - 7);
        VerifierType owner = t;
        std::string rest = owner_path;
        while (!rest.empty()) {
          if (rest[0] == '[') {
            owner = owner.element();
            rest = rest.substr(rest.find(']') + 1);
          } else {
            std::size_t end = rest.find_first_of(".[", 1);
            std::string field = rest.substr(1, end == std::string::npos ? std::string::npos : end - 1);
            for (const auto& f : m_.record_layout(owner.class_name())) {
              if (f.name == field) owner = f.type;
            }
            rest = end == std::string::npos ? std::string() : rest.substr(end);
          }
        }
        out.push_back(Expr::integer(32, m_.klass(owner.class_name())->tag));
      } else {
        out.push_back(Expr::nondet(sort_of(leaves[i].type)));
      }
    }
    return out;
  }

  // -------------------------------------------------------------------------
  // Conversions

  Val coerce(const Val& v, const VerifierType& from, const VerifierType& to) {
    if (from == to) return v;
    switch (to.kind()) {
      case VerifierType::Kind::Int:
        if (from.is(VerifierType::Kind::Int)) return {mk_resize(v[0], to.width(), from.is_signed())};
        if (from.is(VerifierType::Kind::Float)) {
          return {Expr::make(to.is_signed() ? Op::FpToSInt : Op::FpToUInt, Sort::bitvec(to.width()), {v[0]})};
        }
        if (from.is(VerifierType::Kind::Bool)) {
          return {mk_ite(v[0], Expr::integer(to.width(), 1), Expr::integer(to.width(), 0))};
        }
        break;
      case VerifierType::Kind::Float:
        if (from.is(VerifierType::Kind::Int)) {
          return {Expr::make(from.is_signed() ? Op::SIntToFp : Op::UIntToFp, Sort::fp64(), {v[0]})};
        }
        if (from.is(VerifierType::Kind::Bool)) return {mk_ite(v[0], Expr::fp(1.0), Expr::fp(0.0))};
        break;
      case VerifierType::Kind::Bool:
        return {truth(v, from)};
      case VerifierType::Kind::Class:
        if (from.is(VerifierType::Kind::Class)) return map_fields(v, from, to);
        break;
      case VerifierType::Kind::List:
        if (from.is(VerifierType::Kind::List) && from.length() == to.length()) {
          const std::size_t fw = m_.leaves(from.element()).size();
          Val out;
          for (std::size_t i = 0; i < from.length(); ++i) {
            Val part(v.begin() + static_cast<std::ptrdiff_t>(i * fw), v.begin() + static_cast<std::ptrdiff_t>((i + 1) * fw));
            Val c = coerce(part, from.element(), to.element());
            out.insert(out.end(), c.begin(), c.end());
          }
          return out;
        }
        break;
      default:
        break;
    }
    throw Error(ErrorCode::Internal, "cannot convert " + from.to_string() + " to " + to.to_string());
  }

  // Same-named fields are carried over; fields the source lacks start at zero.
  Val map_fields(const Val& v, const VerifierType& from, const VerifierType& to) {
    const auto src = m_.leaves(from);
    const auto dst = m_.leaves(to);
    Val out;
    for (const auto& leaf : dst) {
      auto it = std::find_if(src.begin(), src.end(), [&](const Leaf& l) { return l.path == leaf.path; });
      if (it != src.end()) {
        out.push_back(v[static_cast<std::size_t>(it - src.begin())]);
      } else {
        out.push_back(Expr::constant(zero_value(sort_of(leaf.type))));
      }
    }
    return out;
  }

  Expr truth(const Val& v, const VerifierType& t) {
    switch (t.kind()) {
      case VerifierType::Kind::Bool: return v[0];
      case VerifierType::Kind::Int: return mk_not(mk_eq(v[0], Expr::integer(t.width(), 0)));
      case VerifierType::Kind::Float: return mk_not(mk_eq(v[0], Expr::fp(0.0)));
      case VerifierType::Kind::List: return Expr::boolean(t.length() != 0);
      case VerifierType::Kind::Class: return Expr::boolean(true);
      default: return Expr::boolean(false);
    }
  }

  Expr condition(const AstNode& test) { return truth(lower(test), type(test)); }

  // -------------------------------------------------------------------------
  // Expressions

  Val lower(const AstNode& e, const VerifierType* expected = nullptr) {
    Val v;
    VerifierType t = VerifierType::none();
    if (auto lit = plain_literal(e)) {
      t = expected && expected->is_numeric() ? *expected : VerifierType::integer(int_width(), true);
      if (t.is(VerifierType::Kind::Float)) return {Expr::fp(lit->convert_to<double>())};
      return {constant_int(t, *lit)};
    }
    switch (e.kind) {
      case NodeKind::Constant: {
        const ast::Scalar* s = e.scalar("value");
        if (!s || s->kind == ast::Scalar::Kind::Null) return {};
        if (s->kind == ast::Scalar::Kind::Bool) {
          v = {Expr::boolean(s->boolean)};
          t = VerifierType::boolean();
        } else if (s->kind == ast::Scalar::Kind::Float) {
          v = {Expr::fp(s->real)};
          t = VerifierType::floating();
        } else {
          throw Error(ErrorCode::UnsupportedConstruct, "constant outside the supported subset", e.loc);
        }
        break;
      }
      case NodeKind::Name: {
        t = type(e);
        auto sym = m_.variable_symbol(e.str("id"), *scope_);
        if (!sym) throw Error(ErrorCode::UnsupportedConstruct, "'" + e.str("id") + "' is not a value", e.loc);
        v = symbols(*sym, t);
        break;
      }
      case NodeKind::Attribute:
        t = type(e);
        v = lower_attribute(e);
        break;
      case NodeKind::Subscript:
        t = type(e);
        v = lower_subscript(e);
        break;
      case NodeKind::List: {
        t = type(e);
        VerifierType elem = expected && expected->is(VerifierType::Kind::List) ? expected->element() : t.element();
        for (const auto& el : items(e, "elts")) {
          Val part = lower(el, &elem);
          v.insert(v.end(), part.begin(), part.end());
        }
        t = VerifierType::list_of(elem, items(e, "elts").size());
        break;
      }
      case NodeKind::BinOp:
        t = type(e);
        v = lower_binop(e, expected);
        if (expected && t.is(VerifierType::Kind::Int) && expected->is(VerifierType::Kind::Int) &&
            ProgramModel::is_int_literal(e)) {
          t = *expected;  // computed at the expected width
        }
        break;
      case NodeKind::UnaryOp:
        t = type(e);
        v = lower_unary(e, expected);
        if (expected && t.is(VerifierType::Kind::Int) && expected->is(VerifierType::Kind::Int) &&
            ProgramModel::is_int_literal(e)) {
          t = *expected;
        }
        break;
      case NodeKind::BoolOp:
        t = VerifierType::boolean();
        v = {lower_boolop(e)};
        break;
      case NodeKind::Compare:
        t = VerifierType::boolean();
        v = {lower_compare(e)};
        break;
      case NodeKind::IfExp:
        t = expected ? *expected : type(e);
        v = lower_ifexp(e, t);
        break;
      case NodeKind::Call:
        return lower_call(e, expected);
      default:
        throw Error(ErrorCode::UnsupportedConstruct,
                    std::string(ast::node_kind_name(e.kind)) + " is not supported in expressions", e.loc);
    }
    if (expected && !expected->is(VerifierType::Kind::None) && t != *expected) return coerce(v, t, *expected);
    return v;
  }

  Val select_field(const Val& whole, const VerifierType& t, const std::string& field) {
    const auto leaves = m_.leaves(t);
    Val out;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (path_within(leaves[i].path, "." + field)) out.push_back(whole[i]);
    }
    return out;
  }

  bool has_instance_field(const std::string& cls, const std::string& field) {
    for (const auto& f : m_.record_layout(cls)) {
      if (f.name == field) return true;
    }
    return false;
  }

  Val lower_attribute(const AstNode& e) {
    const AstNode& value = *e.child("value");
    const std::string attr = e.str("attr");
    const VerifierType t = type(e);
    if (value.is(NodeKind::Name)) {
      auto r = m_.try_resolve_name(value.str("id"), *scope_);
      if (r && r->kind == Resolution::Kind::Module) return symbols(r->qualified + "@" + attr, t);
      if (r && r->kind == Resolution::Kind::Class) {
        auto a = m_.find_attribute(r->qualified, attr);
        return symbols(a->owner + "@" + attr, t);
      }
    }
    const VerifierType vt = type(value);
    if (!has_instance_field(vt.class_name(), attr)) {
      auto a = m_.find_attribute(vt.class_name(), attr);
      return symbols(a->owner + "@" + attr, t);
    }
    return select_field(lower(value), vt, attr);
  }

  struct Index {
    std::optional<std::size_t> constant;  // in range, normalized
    bool out_of_range = false;
    Expr dynamic;
    VerifierType type;
  };

  Index lower_index(const AstNode& subscript, std::size_t length) {
    const AstNode& slice = *subscript.child("slice");
    Index idx;
    idx.type = type(slice);
    const std::string text = ast::unparse(slice);
    if (auto lit = plain_literal(slice)) {
      cpp_int k = *lit;
      if (k < 0) k += length;
      idx.out_of_range = k < 0 || k >= length;
      if (!idx.out_of_range) idx.constant = k.convert_to<std::size_t>();
      check(PropertyClass::Bounds, Expr::boolean(!idx.out_of_range), bounds_text(text, length), subscript.loc);
      return idx;
    }
    idx.dynamic = lower(slice)[0];
    const unsigned w = idx.type.width();
    Expr n = Expr::integer(w + 1, length);
    Expr wide = mk_resize(idx.dynamic, w + 1, idx.type.is_signed());
    Expr in_range = idx.type.is_signed()
                        ? mk_and(mk_bin(Op::Sle, Expr::integer(w + 1, 0), wide), mk_bin(Op::Slt, wide, n))
                        : mk_bin(Op::Ult, wide, n);
    check(PropertyClass::Bounds, in_range, bounds_text(text, length), subscript.loc);
    return idx;
  }

  static std::string bounds_text(const std::string& index, std::size_t length) {
    return "0 <= " + index + " < " + std::to_string(length);
  }

  Expr index_is(const Index& idx, std::size_t k) {
    return mk_eq(idx.dynamic, Expr::integer(idx.type.width(), k));
  }

  Val lower_subscript(const AstNode& e) {
    const AstNode& value = *e.child("value");
    const VerifierType lt = type(value);
    const std::size_t n = lt.length();
    const VerifierType elem = lt.element();
    const std::size_t width = m_.leaves(elem).size();
    Val whole = lower(value);
    Index idx = lower_index(e, n);
    if (idx.out_of_range) return zero(elem);
    if (idx.constant) {
      return Val(whole.begin() + static_cast<std::ptrdiff_t>(*idx.constant * width),
                 whole.begin() + static_cast<std::ptrdiff_t>((*idx.constant + 1) * width));
    }
    if (n == 0) return zero(elem);
    Val out;
    for (std::size_t j = 0; j < width; ++j) {
      Expr acc = whole[(n - 1) * width + j];
      for (std::size_t k = n - 1; k-- > 0;) acc = mk_ite(index_is(idx, k), whole[k * width + j], acc);
      out.push_back(acc);
    }
    return out;
  }

  Val lower_binop(const AstNode& e, const VerifierType* expected) {
    const std::string op = op_of(e);
    const AstNode& left = *e.child("left");
    const AstNode& right = *e.child("right");
    const VerifierType tl = type(left);
    const VerifierType tr = type(right);
    if (tl.is(VerifierType::Kind::List) || tr.is(VerifierType::Kind::List)) {
      const VerifierType rt = type(e);
      if (op == "Add") {
        const VerifierType* el = expected && expected->is(VerifierType::Kind::List) ? expected : nullptr;
        VerifierType lt2 = el ? VerifierType::list_of(el->element(), tl.length()) : tl;
        VerifierType rt2 = el ? VerifierType::list_of(el->element(), tr.length()) : tr;
        Val a = lower(left, &lt2);
        Val b = lower(right, &rt2);
        a.insert(a.end(), b.begin(), b.end());
        return a;
      }
      const bool list_left = tl.is(VerifierType::Kind::List);
      const AstNode& list = list_left ? left : right;
      const AstNode& count = list_left ? right : left;
      const std::size_t times = plain_literal(count)->convert_to<std::size_t>();
      Val once = lower(list);
      Val out;
      for (std::size_t i = 0; i < times; ++i) out.insert(out.end(), once.begin(), once.end());
      (void)rt;
      return out;
    }
    VerifierType t = VerifierType::none();
    if (op == "Div") {
      t = VerifierType::floating();
    } else if (expected && expected->is(VerifierType::Kind::Int) && ProgramModel::is_int_literal(e)) {
      t = *expected;
    } else {
      t = m_.operand_type(left, right, *scope_);
    }
    Expr a = lower(left, &t)[0];
    Expr b = lower(right, &t)[0];
    return {arith(op, a, b, t, e)};
  }

  Expr arith(const std::string& op, const Expr& a, const Expr& b, const VerifierType& t, const AstNode& e) {
    const SourceLocation& loc = e.loc;
    const std::string text = ast::unparse(e);
    if (t.is(VerifierType::Kind::Bool)) {
      if (op == "BitAnd") return mk_and(a, b);
      if (op == "BitOr") return mk_or(a, b);
      if (op == "BitXor") return mk_not(mk_eq(a, b));
    }
    if (t.is(VerifierType::Kind::Float)) {
      if (op == "Add") return mk_bin(Op::FAdd, a, b);
      if (op == "Sub") return mk_bin(Op::FSub, a, b);
      if (op == "Mult") return mk_bin(Op::FMul, a, b);
      if (op == "Div") return mk_bin(Op::FDiv, a, b);
    }
    if (t.is(VerifierType::Kind::Int)) {
      const bool s = t.is_signed();
      const Expr zero_b = Expr::integer(t.width(), 0);
      auto overflow = [&](Op pred) {
        if (s) check(PropertyClass::Overflow, mk_not(mk_bin(pred, a, b)), text, loc);
      };
      if (op == "Add") {
        overflow(Op::AddOverflow);
        return mk_bin(Op::Add, a, b);
      }
      if (op == "Sub") {
        overflow(Op::SubOverflow);
        return mk_bin(Op::Sub, a, b);
      }
      if (op == "Mult") {
        overflow(Op::MulOverflow);
        return mk_bin(Op::Mul, a, b);
      }
      if (op == "FloorDiv" || op == "Mod") {
        check(PropertyClass::DivisionByZero, mk_not(mk_eq(b, zero_b)),
              ast::unparse(*e.child("right")) + " != 0", loc);
        if (op == "FloorDiv") {
          overflow(Op::DivOverflow);
          return mk_bin(s ? Op::FloorDiv : Op::UDiv, a, b);
        }
        return mk_bin(s ? Op::FloorMod : Op::URem, a, b);
      }
      if (op == "BitAnd") return mk_bin(Op::BvAnd, a, b);
      if (op == "BitOr") return mk_bin(Op::BvOr, a, b);
      if (op == "BitXor") return mk_bin(Op::BvXor, a, b);
      if (op == "LShift") return mk_bin(Op::Shl, a, b);
      if (op == "RShift") return mk_bin(s ? Op::AShr : Op::LShr, a, b);
    }
    throw Error(ErrorCode::UnsupportedConstruct, "operator " + op + " on " + t.to_string(int_width()), loc);
  }

  Val lower_unary(const AstNode& e, const VerifierType* expected) {
    const std::string op = op_of(e);
    const AstNode& operand = *e.child("operand");
    if (op == "Not") return {mk_not(condition(operand))};
    VerifierType t = type(operand);
    if (expected && expected->is_numeric() && ProgramModel::is_int_literal(operand)) t = *expected;
    Expr v = lower(operand, &t)[0];
    if (op == "UAdd") return {v};
    if (op == "USub") {
      if (t.is(VerifierType::Kind::Float)) return {mk_un(Op::FNeg, v)};
      if (t.is_signed()) {
        check(PropertyClass::Overflow, mk_not(mk_un(Op::NegOverflow, v)), ast::unparse(e), e.loc);
      }
      return {mk_un(Op::Neg, v)};
    }
    if (op == "Invert" && t.is(VerifierType::Kind::Int)) return {mk_un(Op::BvNot, v)};
    throw Error(ErrorCode::UnsupportedConstruct, "unary operator " + op, e.loc);
  }

  Expr compare(const std::string& op, const Expr& a, const Expr& b, const VerifierType& t, const SourceLocation& loc) {
    if (op == "Eq") return mk_eq(a, b);
    if (op == "NotEq") return mk_not(mk_eq(a, b));
    Op lt, le;
    if (t.is(VerifierType::Kind::Float)) {
      lt = Op::FLt;
      le = Op::FLe;
    } else if (t.is(VerifierType::Kind::Int)) {
      lt = t.is_signed() ? Op::Slt : Op::Ult;
      le = t.is_signed() ? Op::Sle : Op::Ule;
    } else {
      throw Error(ErrorCode::UnsupportedConstruct, "ordering comparison on " + t.to_string(int_width()), loc);
    }
    if (op == "Lt") return mk_bin(lt, a, b);
    if (op == "LtE") return mk_bin(le, a, b);
    if (op == "Gt") return mk_bin(lt, b, a);
    if (op == "GtE") return mk_bin(le, b, a);
    throw Error(ErrorCode::UnsupportedConstruct, "comparison operator " + op, loc);
  }

  Expr lower_compare(const AstNode& e) {
    const AstNode* left = e.child("left");
    const auto& ops = items(e, "ops");
    const auto& rights = items(e, "comparators");
    std::vector<Expr> parts;
    std::optional<Expr> left_value;
    VerifierType left_type = VerifierType::none();
    for (std::size_t i = 0; i < ops.size(); ++i) {
      VerifierType t = m_.operand_type(*left, rights[i], *scope_);
      // A middle operand is evaluated once and reused.
      Expr a = left_value && left_type == t ? *left_value : lower(*left, &t)[0];
      Expr b = lower(rights[i], &t)[0];
      parts.push_back(compare(ops[i].type_name, a, b, t, e.loc));
      left = &rights[i];
      left_value = b;
      left_type = t;
    }
    return mk_and(parts);
  }

  Expr lower_boolop(const AstNode& e) {
    const bool is_and = op_of(e) == "And";
    const auto& values = items(e, "values");
    bool branches = false;
    for (std::size_t i = 1; i < values.size(); ++i) branches = branches || effectful(values[i], m_, *scope_);
    if (!branches) {
      std::vector<Expr> parts;
      for (const auto& v : values) parts.push_back(condition(v));
      return is_and ? mk_and(parts) : mk_or(parts);
    }
    Val t = temp(VerifierType::boolean());
    assign(t[0], condition(values[0]), e.loc);
    std::vector<std::size_t> exits;
    for (std::size_t i = 1; i < values.size(); ++i) {
      exits.push_back(jump(is_and ? mk_not(t[0]) : t[0], e.loc));
      assign(t[0], condition(values[i]), values[i].loc.valid() ? values[i].loc : e.loc);
    }
    for (std::size_t x : exits) patch(x, here());
    return t[0];
  }

  Val lower_ifexp(const AstNode& e, const VerifierType& t) {
    const AstNode& body = *e.child("body");
    const AstNode& orelse = *e.child("orelse");
    if (!effectful(body, m_, *scope_) && !effectful(orelse, m_, *scope_)) {
      Expr c = condition(*e.child("test"));
      Val a = lower(body, &t);
      Val b = lower(orelse, &t);
      Val out;
      for (std::size_t i = 0; i < a.size(); ++i) out.push_back(mk_ite(c, a[i], b[i]));
      return out;
    }
    Val result = temp(t);
    std::size_t to_else = jump(mk_not(condition(*e.child("test"))), e.loc);
    assign_all(result, lower(body, &t), e.loc);
    std::size_t to_end = jump(Expr(), e.loc);
    patch(to_else, here());
    assign_all(result, lower(orelse, &t), e.loc);
    patch(to_end, here());
    return result;
  }

  // -------------------------------------------------------------------------
  // Calls

  struct Arg {
    Val value;
    VerifierType type;
    const AstNode* node = nullptr;  // source expression, for write-back
  };

  Arg argument(const AstNode& node, const VerifierType& param) {
    Arg a;
    a.node = &node;
    a.type = type(node);
    if (ProgramModel::is_int_literal(node) || node.is(NodeKind::List)) {
      a.value = lower(node, &param);
      a.type = param;
    } else {
      a.value = lower(node);
    }
    return a;
  }

  std::vector<Arg> arguments(const AstNode& call, const FunctionInfo& callee, std::size_t first) {
    std::vector<const AstNode*> bound = m_.bind_arguments(call, callee, first == 1);
    std::vector<Arg> out;
    for (std::size_t i = 0; i < bound.size(); ++i) {
      const ParamInfo& p = callee.params[i + first];
      if (bound[i]) {
        out.push_back(argument(*bound[i], *p.type));
      } else {
        // Defaults are evaluated in the scope of the callee's module.
        FunctionInfo* saved = scope_;
        scope_ = m_.function(m_.module(callee.module)->top_function);
        Arg a;
        a.value = lower(*p.default_value, &*p.type);
        a.type = *p.type;
        scope_ = saved;
        out.push_back(std::move(a));
      }
    }
    return out;
  }

  static bool all_symbols(const Val& v) {
    return std::all_of(v.begin(), v.end(), [](const Expr& e) { return e.is_symbol(); });
  }

  // Emits one call; aggregate arguments are written back after it.
  void call_function(const FunctionInfo& callee, const std::vector<Arg>& args, const Val& results,
                     const SourceLocation& loc) {
    auto site = std::make_shared<CallSite>();
    site->callee = callee.qualified;
    site->results = results;
    struct WriteBack {
      const AstNode* node;
      Val temps;
      VerifierType param;
      VerifierType arg;
    };
    std::vector<WriteBack> write_backs;
    for (std::size_t i = 0; i < callee.params.size(); ++i) {
      const VerifierType& pt = *callee.params[i].type;
      const Arg& a = args[i];
      Val v = coerce(a.value, a.type, pt);
      site->args.insert(site->args.end(), v.begin(), v.end());
      const auto leaves = m_.leaves(pt);
      if (!pt.is_aggregate()) {
        site->outs.push_back(Expr());
        continue;
      }
      // Objects and lists are shared with the caller: copy the callee's final
      // parameter value back into the argument.
      Val targets;
      if (all_symbols(a.value)) {
        targets = map_targets(a.value, a.type, pt);
      } else if (a.node && is_place(*a.node)) {
        Val temps = temp(pt);
        write_backs.push_back({a.node, temps, pt, a.type});
        targets = temps;
      } else {
        targets = Val(leaves.size());
      }
      site->outs.insert(site->outs.end(), targets.begin(), targets.end());
    }
    Instruction ins;
    ins.kind = InstrKind::FunctionCall;
    ins.call = site;
    emit(std::move(ins), loc);
    for (const auto& wb : write_backs) {
      Val back = map_fields_or_same(wb.temps, wb.param, wb.arg);
      write_place(*wb.node, back, wb.arg, loc);
    }
  }

  Val map_fields_or_same(const Val& v, const VerifierType& from, const VerifierType& to) {
    if (from == to) return v;
    if (from.is(VerifierType::Kind::Class)) {
      // Keep fields the callee cannot see as they were.
      return map_fields(v, from, to);
    }
    return coerce(v, from, to);
  }

  // For each parameter leaf, the argument symbol with the same path (or null).
  Val map_targets(const Val& arg, const VerifierType& arg_type, const VerifierType& param) {
    const auto src = m_.leaves(arg_type);
    const auto dst = m_.leaves(param);
    Val out;
    for (const auto& leaf : dst) {
      auto it = std::find_if(src.begin(), src.end(), [&](const Leaf& l) { return l.path == leaf.path; });
      out.push_back(it != src.end() ? arg[static_cast<std::size_t>(it - src.begin())] : Expr());
    }
    return out;
  }

  Val call_results(const FunctionInfo& callee) {
    if (!callee.result || callee.result->is(VerifierType::Kind::None)) return {};
    return temp(*callee.result);
  }

  Val lower_call(const AstNode& call, const VerifierType* expected) {
    auto target = m_.call_target(call, *scope_);
    using Kind = ProgramModel::CallTarget::Kind;
    switch (target.kind) {
      case Kind::Builtin:
        return lower_builtin(target.builtin, call, expected);
      case Kind::Function: {
        const FunctionInfo& callee = *m_.function(target.function);
        std::vector<Arg> args = arguments(call, callee, 0);
        Val results = call_results(callee);
        call_function(callee, args, results, call.loc);
        return finish_call(results, callee, call, expected);
      }
      case Kind::Constructor: {
        Val obj = fresh_object(target.klass, call.loc);
        if (!target.function.empty()) {
          const FunctionInfo& init = *m_.function(target.function);
          std::vector<Arg> args;
          args.push_back({obj, VerifierType::class_ref(target.klass), nullptr});
          for (auto& a : arguments(call, init, 1)) args.push_back(std::move(a));
          call_function(init, args, {}, call.loc);
        }
        VerifierType t = VerifierType::class_ref(target.klass);
        if (expected && expected->is(VerifierType::Kind::Class) && *expected != t) return coerce(obj, t, *expected);
        return obj;
      }
      case Kind::Method: {
        const FunctionInfo& callee = *m_.function(target.function);
        if (target.explicit_self) {
          std::vector<Arg> args = arguments(call, callee, 0);
          Val results = call_results(callee);
          call_function(callee, args, results, call.loc);
          return finish_call(results, callee, call, expected);
        }
        return dispatch(call, target, expected);
      }
    }
    return {};
  }

  Val finish_call(const Val& results, const FunctionInfo& callee, const AstNode& call, const VerifierType* expected) {
    if (expected && callee.result && !expected->is(VerifierType::Kind::None) && *expected != *callee.result &&
        !results.empty()) {
      return coerce(results, *callee.result, *expected);
    }
    (void)call;
    return results;
  }

  Val dispatch(const AstNode& call, const ProgramModel::CallTarget& target, const VerifierType* expected) {
    const AstNode& receiver = *target.receiver;
    const std::string attr = call.child("func")->str("attr");
    const std::string cls = target.klass;
    // Runtime classes grouped by the method they resolve to.
    std::vector<std::pair<std::string, std::vector<int>>> groups;
    std::vector<std::string> candidates = {cls};
    for (const auto& d : m_.descendants(cls)) candidates.push_back(d);
    for (const auto& c : candidates) {
      std::string f = *m_.find_method(c, attr);
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == f; });
      if (it == groups.end()) {
        groups.push_back({f, {}});
        it = groups.end() - 1;
      }
      it->second.push_back(m_.klass(c)->tag);
    }
    Arg self{lower(receiver), type(receiver), &receiver};
    const FunctionInfo& first = *m_.function(groups.front().first);
    std::vector<Arg> rest = arguments(call, first, 1);
    Val results = call_results(first);
    if (groups.size() == 1) {
      std::vector<Arg> args = {self};
      args.insert(args.end(), rest.begin(), rest.end());
      call_function(first, args, results, call.loc);
      return finish_call(results, first, call, expected);
    }
    // Arguments are evaluated once, before the tag test.
    for (auto& a : rest) {
      if (!all_symbols(a.value)) {
        Val t = temp(a.type);
        assign_all(t, a.value, call.loc);
        a.value = t;
      }
    }
    if (!all_symbols(self.value)) {
      Val t = temp(self.type);
      assign_all(t, self.value, call.loc);
      self.value = t;
    }
    const Expr tag = self.value[0];
    std::vector<std::size_t> to_end;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::optional<std::size_t> skip_group;
      if (g + 1 < groups.size()) {
        std::vector<Expr> tests;
        for (int t : groups[g].second) tests.push_back(mk_eq(tag, Expr::integer(32, t)));
        skip_group = jump(mk_not(mk_or(tests)), call.loc);
      }
      const FunctionInfo& callee = *m_.function(groups[g].first);
      std::vector<Arg> args = {self};
      args.insert(args.end(), rest.begin(), rest.end());
      call_function(callee, args, results, call.loc);
      if (g + 1 < groups.size()) to_end.push_back(jump(Expr(), call.loc));
      if (skip_group) patch(*skip_group, here());
    }
    for (std::size_t x : to_end) patch(x, here());
    return finish_call(results, first, call, expected);
  }

  Val lower_builtin(const std::string& name, const AstNode& call, const VerifierType* expected) {
    const auto& args = items(call, "args");
    const VerifierType rt = name == "$nondet" ? VerifierType::none() : type(call);
    if (name == "__ESBMC_assume" || name == "__VERIFIER_assume") {
      Instruction ins;
      ins.kind = InstrKind::Assume;
      ins.expr = condition(args[0]);
      ins.text = ast::unparse(args[0]);
      emit(std::move(ins), call.loc);
      return {};
    }
    if (name == "$nondet") {
      if (!expected) throw Error(ErrorCode::UntypeableExpression, "nondeterministic value without a type", call.loc);
      return nondet_value(*expected);
    }
    Val out;
    if (name.rfind("nondet_", 0) == 0) {
      out = {Expr::nondet(sort_of(rt))};
    } else if (name == "abs") {
      Expr v = lower(args[0], &rt)[0];
      if (rt.is(VerifierType::Kind::Float)) {
        out = {mk_ite(mk_bin(Op::FLt, v, Expr::fp(0.0)), mk_un(Op::FNeg, v), v)};
      } else if (rt.is_signed()) {
        out = {mk_ite(mk_bin(Op::Slt, v, Expr::integer(rt.width(), 0)), mk_un(Op::Neg, v), v)};
      } else {
        out = {v};
      }
    } else if (name == "min" || name == "max") {
      std::vector<Expr> vals;
      for (const auto& a : args) vals.push_back(lower(a, &rt)[0]);
      Expr acc = vals[0];
      for (std::size_t i = 1; i < vals.size(); ++i) {
        // Ties keep the earlier argument.
        Expr better = name == "min" ? compare("Lt", vals[i], acc, rt, call.loc) : compare("Gt", vals[i], acc, rt, call.loc);
        acc = mk_ite(better, vals[i], acc);
      }
      out = {acc};
    } else if (name == "len") {
      out = {Expr::integer(rt.width(), type(args[0]).length())};
    } else if (name == "bool") {
      out = {condition(args[0])};
    } else if (name == "range") {
      throw Error(ErrorCode::UnsupportedConstruct, "range() outside a for loop", call.loc);
    } else {
      // int, float and the fixed-width conversions.
      VerifierType at = type(args[0]);
      if (ProgramModel::is_int_literal(args[0]) && rt.is_numeric()) {
        out = lower(args[0], &rt);
      } else {
        out = coerce(lower(args[0]), at, rt);
      }
    }
    if (expected && !expected->is(VerifierType::Kind::None) && *expected != rt) return coerce(out, rt, *expected);
    return out;
  }

  // -------------------------------------------------------------------------
  // Assignment targets

  static bool is_place(const AstNode& e) {
    switch (e.kind) {
      case NodeKind::Name: return true;
      case NodeKind::Attribute: return true;
      case NodeKind::Subscript: return is_place(*e.child("value"));
      default: return false;
    }
  }

  struct Selector {
    std::optional<std::string> field;
    Index index;
    std::size_t length = 0;
  };
  struct Place {
    std::string base;
    VerifierType base_type;
    std::vector<Selector> selectors;
  };

  Place resolve_place(const AstNode& e) {
    switch (e.kind) {
      case NodeKind::Name: {
        auto sym = m_.variable_symbol(e.str("id"), *scope_);
        if (!sym) throw Error(ErrorCode::UnsupportedConstruct, "cannot assign to '" + e.str("id") + "'", e.loc);
        return {*sym, type(e), {}};
      }
      case NodeKind::Attribute: {
        const AstNode& value = *e.child("value");
        const std::string attr = e.str("attr");
        if (value.is(NodeKind::Name)) {
          auto r = m_.try_resolve_name(value.str("id"), *scope_);
          if (r && r->kind == Resolution::Kind::Module) return {r->qualified + "@" + attr, type(e), {}};
          if (r && r->kind == Resolution::Kind::Class) {
            auto a = m_.find_attribute(r->qualified, attr);
            return {a->owner + "@" + attr, a->type, {}};
          }
        }
        const VerifierType vt = type(value);
        if (!has_instance_field(vt.class_name(), attr)) {
          auto a = m_.find_attribute(vt.class_name(), attr);
          return {a->owner + "@" + attr, a->type, {}};
        }
        Place p = resolve_place(value);
        Selector s;
        s.field = attr;
        p.selectors.push_back(s);
        return p;
      }
      case NodeKind::Subscript: {
        const AstNode& value = *e.child("value");
        Place p = resolve_place(value);
        const VerifierType lt = type(value);
        Selector s;
        s.length = lt.length();
        s.index = lower_index(e, s.length);
        if (s.index.dynamic && !s.index.dynamic.is_symbol()) {
          // Later element writes must not change which element is selected.
          Val t = temp(s.index.type);
          assign(t[0], s.index.dynamic, e.loc);
          s.index.dynamic = t[0];
        }
        p.selectors.push_back(s);
        return p;
      }
      default:
        throw Error(ErrorCode::UnsupportedConstruct, "assignment target " + ast::unparse(e), e.loc);
    }
  }

  void write_place(const AstNode& target, Val value, const VerifierType& value_type, const SourceLocation& loc) {
    Place p = resolve_place(target);
    // Expand the selectors into concrete leaf prefixes with their conditions.
    std::vector<std::pair<std::string, Expr>> prefixes = {{"", Expr::boolean(true)}};
    bool possible = true;
    for (const auto& s : p.selectors) {
      std::vector<std::pair<std::string, Expr>> next;
      for (const auto& [prefix, cond] : prefixes) {
        if (s.field) {
          next.push_back({prefix + "." + *s.field, cond});
        } else if (s.index.constant) {
          next.push_back({prefix + "[" + std::to_string(*s.index.constant) + "]", cond});
        } else if (s.index.dynamic) {
          for (std::size_t k = 0; k < s.length; ++k) {
            next.push_back({prefix + "[" + std::to_string(k) + "]", mk_and(cond, index_is(s.index, k))});
          }
        }
      }
      if (s.index.out_of_range) possible = false;
      prefixes = std::move(next);
    }
    if (!possible || prefixes.empty()) {
      if (!pending_.empty()) skip(loc);
      return;
    }
    const auto value_leaves = m_.leaves(value_type);
    // Snapshot values that read the target they are written to.
    bool reads_target = false;
    if (value.size() > 1) {
      for (const auto& v : value) {
        for (const auto& s : collect_symbols(v)) {
          if (s.name().compare(0, p.base.size(), p.base) == 0) reads_target = true;
        }
      }
    }
    if (reads_target) {
      Val t = temp(value_type);
      assign_all(t, value, loc);
      value = t;
    }
    const auto base_leaves = m_.leaves(p.base_type);
    std::size_t writes = 0;
    for (const auto& [prefix, cond] : prefixes) {
      for (std::size_t j = 0; j < value_leaves.size(); ++j) {
        const std::string path = prefix + value_leaves[j].path;
        auto it = std::find_if(base_leaves.begin(), base_leaves.end(), [&](const Leaf& l) { return l.path == path; });
        if (it == base_leaves.end()) continue;
        std::string name = p.base + path;
        gp_.leaf_types.emplace(name, it->type);
        Expr sym = Expr::symbol(name, sort_of(it->type));
        assign(sym, cond.is_true() ? value[j] : mk_ite(cond, value[j], sym), loc);
        ++writes;
      }
    }
    if (writes == 0 && !pending_.empty()) skip(loc);
  }

  VerifierType place_type(const AstNode& target) {
    if (target.is(NodeKind::Name) || target.is(NodeKind::Subscript)) return type(target);
    return type(target);
  }

  // -------------------------------------------------------------------------
  // Statements

  void lower_block(const std::vector<AstNode*>& stmts) {
    for (AstNode* s : stmts) lower_statement(*s);
  }

  void lower_block(const std::vector<AstNode>& stmts) {
    for (const AstNode& s : stmts) lower_statement(s);
  }

  void lower_statement(const AstNode& s) {
    switch (s.kind) {
      case NodeKind::AnnAssign:
      case NodeKind::Assign: {
        const AstNode* value = s.child("value");
        if (!value) return;
        const AstNode& target = s.is(NodeKind::AnnAssign) ? *s.child("target") : items(s, "targets")[0];
        VerifierType t = place_type(target);
        if (t.is(VerifierType::Kind::List) && value->is(NodeKind::List) && items(*value, "elts").empty()) {
          t = VerifierType::list_of(t.element(), 0);
        }
        Val v = lower(*value, &t);
        write_place(target, v, t, s.loc);
        return;
      }
      case NodeKind::AugAssign: {
        const AstNode& target = *s.child("target");
        const AstNode& value = *s.child("value");
        const VerifierType t = type(target);
        const std::string op = s.child("op")->type_name;
        Val result;
        if (t.is(VerifierType::Kind::List)) {
          throw Error(ErrorCode::UnsupportedConstruct, "augmented assignment to a list", s.loc);
        }
        VerifierType ot = op == "Div" ? VerifierType::floating() : m_.operand_type(target, value, *scope_);
        Expr a = lower(target, &ot)[0];
        Expr b = lower(value, &ot)[0];
        AstNode as_binop = ast::make_node(NodeKind::BinOp, "BinOp", s.loc);
        as_binop.set_child("left", target);
        as_binop.set_child("op", *s.child("op"));
        as_binop.set_child("right", value);
        result = {arith(op, a, b, ot, as_binop)};
        if (ot != t) result = coerce(result, ot, t);
        write_place(target, result, t, s.loc);
        return;
      }
      case NodeKind::Expr: {
        const AstNode& value = *s.child("value");
        if (value.is(NodeKind::Constant)) return;  // docstrings
        lower(value);
        if (!pending_.empty()) skip(s.loc);
        return;
      }
      case NodeKind::If: {
        Expr c = condition(*s.child("test"));
        std::size_t to_else = jump(mk_not(c), s.loc);
        lower_block(items(s, "body"));
        const auto& orelse = items(s, "orelse");
        if (orelse.empty()) {
          patch(to_else, here());
          return;
        }
        std::size_t to_end = jump(Expr(), s.loc);
        patch(to_else, here());
        lower_block(orelse);
        patch(to_end, here());
        return;
      }
      case NodeKind::While: {
        if (!items(s, "orelse").empty()) throw Error(ErrorCode::UnsupportedConstruct, "while-else", s.loc);
        std::size_t head = here();
        Expr c = condition(*s.child("test"));
        std::size_t exit = jump(mk_not(c), s.loc);
        (*code_)[exit].loop_exit = true;
        loops_.push_back({});
        lower_block(items(s, "body"));
        close_loop(head, exit, s.loc);
        return;
      }
      case NodeKind::For:
        lower_for(s);
        return;
      case NodeKind::Break:
      case NodeKind::Continue: {
        if (loops_.empty()) throw Error(ErrorCode::UnsupportedConstruct, "break/continue outside a loop", s.loc);
        std::size_t j = jump(Expr(), s.loc);
        (s.is(NodeKind::Break) ? loops_.back().breaks : loops_.back().continues).push_back(j);
        return;
      }
      case NodeKind::Return: {
        if (const AstNode* value = s.child("value")) {
          if (fn_->result && !fn_->result->is(VerifierType::Kind::None)) {
            Val v = lower(*value, &*fn_->result);
            assign_all(returns_symbols_, v, s.loc);
          } else {
            lower(*value);
          }
        }
        returns_.push_back(jump(Expr(), s.loc));
        return;
      }
      case NodeKind::Assert: {
        const AstNode& test = *s.child("test");
        Instruction ins;
        ins.kind = InstrKind::Assert;
        ins.expr = condition(test);
        ins.property = PropertyClass::UserAssertion;
        ins.text = ast::unparse(test);
        emit(std::move(ins), s.loc);
        return;
      }
      case NodeKind::ClassDef: {
        // Class bodies run once: their attribute initializers.
        const std::string cls = m_.module(fn_->module)->classes.at(s.str("name"));
        for (const auto& member : items(s, "body")) {
          if (!member.is(NodeKind::AnnAssign) && !member.is(NodeKind::Assign)) continue;
          const AstNode* value = member.child("value");
          if (!value) continue;
          const AstNode& target = member.is(NodeKind::AnnAssign) ? *member.child("target") : items(member, "targets")[0];
          auto a = m_.find_attribute(cls, target.str("id"));
          if (!a) continue;
          Val v = lower(*value, &a->type);
          assign_all(symbols(cls + "@" + a->name, a->type), v, member.loc);
        }
        return;
      }
      case NodeKind::Pass:
      case NodeKind::FunctionDef:
      case NodeKind::Import:
      case NodeKind::ImportFrom:
        return;
      default:
        throw Error(ErrorCode::UnsupportedConstruct,
                    std::string(ast::node_kind_name(s.kind)) + " statements are not supported", s.loc);
    }
  }

  // Back edge to `head`; `continue` jumps to the back edge, `break` past it.
  void close_loop(std::size_t head, std::size_t exit, const SourceLocation& loc) {
    Loop loop = std::move(loops_.back());
    loops_.pop_back();
    std::size_t latch = jump(Expr(), loc);
    patch(latch, head);
    for (std::size_t c : loop.continues) patch(c, latch);
    patch(exit, here());
    for (std::size_t b : loop.breaks) patch(b, here());
  }

  void lower_for(const AstNode& s) {
    if (!items(s, "orelse").empty()) throw Error(ErrorCode::UnsupportedConstruct, "for-else", s.loc);
    const AstNode& target = *s.child("target");
    const AstNode& iter = *s.child("iter");
    const VerifierType var_type = type(target);
    auto target_r = m_.try_resolve_name("range", *scope_);
    const bool is_range = iter.is(NodeKind::Call) && iter.child("func")->is(NodeKind::Name) &&
                          iter.child("func")->str("id") == "range" && target_r &&
                          target_r->kind == Resolution::Kind::Builtin;
    if (is_range) {
      const auto& args = items(iter, "args");
      Val start = args.size() >= 2 ? lower(args[0], &var_type) : Val{Expr::integer(var_type.width(), 0)};
      Val stop_v = lower(args.size() >= 2 ? args[1] : args[0], &var_type);
      cpp_int step = args.size() == 3 ? *plain_literal(args[2]) : cpp_int(1);
      // Bounds are evaluated once, before the first iteration.
      Val counter = temp(var_type);
      Val stop = temp(var_type);
      assign(counter[0], start[0], s.loc);
      assign(stop[0], stop_v[0], s.loc);
      std::size_t head = here();
      Expr more = step > 0 ? compare("Lt", counter[0], stop[0], var_type, s.loc)
                           : compare("Gt", counter[0], stop[0], var_type, s.loc);
      std::size_t exit = jump(mk_not(more), s.loc);
      (*code_)[exit].loop_exit = true;
      write_place(target, counter, var_type, s.loc);
      loops_.push_back({});
      lower_block(items(s, "body"));
      // `continue` lands on the increment.
      std::size_t increment = here();
      for (std::size_t c : loops_.back().continues) patch(c, increment);
      loops_.back().continues.clear();
      assign(counter[0], mk_bin(Op::Add, counter[0], constant_int(var_type, step)), s.loc);
      close_loop(head, exit, s.loc);
      return;
    }
    const VerifierType lt = type(iter);
    Val list = lower(iter);
    if (!all_symbols(list)) {
      Val t = temp(lt);
      assign_all(t, list, s.loc);
      list = t;
    }
    const VerifierType index_type = VerifierType::integer(32, true);
    Val counter = temp(index_type);
    assign(counter[0], Expr::integer(32, 0), s.loc);
    std::size_t head = here();
    std::size_t exit = jump(mk_not(mk_bin(Op::Slt, counter[0], Expr::integer(32, lt.length()))), s.loc);
    (*code_)[exit].loop_exit = true;
    const std::size_t width = m_.leaves(lt.element()).size();
    Val element;
    for (std::size_t j = 0; j < width && lt.length() > 0; ++j) {
      Expr acc = list[(lt.length() - 1) * width + j];
      for (std::size_t k = lt.length() - 1; k-- > 0;) {
        acc = mk_ite(mk_eq(counter[0], Expr::integer(32, k)), list[k * width + j], acc);
      }
      element.push_back(acc);
    }
    write_place(target, element, lt.element(), s.loc);
    loops_.push_back({});
    lower_block(items(s, "body"));
    std::size_t increment = here();
    for (std::size_t c : loops_.back().continues) patch(c, increment);
    loops_.back().continues.clear();
    assign(counter[0], mk_bin(Op::Add, counter[0], Expr::integer(32, 1)), s.loc);
    close_loop(head, exit, s.loc);
  }

  struct Loop {
    std::vector<std::size_t> breaks;
    std::vector<std::size_t> continues;
  };

  SymbolTable& st_;
  ProgramModel& m_;
  GotoProgram& gp_;
  FunctionInfo* fn_ = nullptr;
  FunctionInfo* scope_ = nullptr;
  std::vector<Instruction>* code_ = nullptr;
  std::vector<Check> pending_;
  std::vector<Loop> loops_;
  std::vector<std::size_t> returns_;
  Val returns_symbols_;
  int temps_ = 0;
};

}  // namespace

GotoProgram lower_to_goto(SymbolTable& st) {
  if (st.entry().empty()) throw Error(ErrorCode::Internal, "lowering needs an entry point");
  GotoProgram gp;
  gp.entry = st.entry();
  Lowerer lowerer(st, gp);
  for (const auto& q : st.retained_functions()) {
    gp.functions[q] = lowerer.lower_function(q);
    gp.order.push_back(q);
  }
  return gp;
}

}  // namespace pybmc
