#include "pybmc/expr.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "pybmc/error.hpp"

namespace pybmc {

struct Expr::Node {
  Op op;
  Sort sort;
  std::vector<Expr> args;
  Value value;
  std::string name;
  int version = -1;
  std::size_t hash = 0;
};

namespace {

std::size_t combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t value_hash(const Value& v) {
  switch (v.sort.kind) {
    case Sort::Kind::Bool: return v.b ? 1 : 2;
    case Sort::Kind::BitVec: return std::hash<std::string>()(v.bits.str()) ^ v.sort.width;
    case Sort::Kind::Float: return std::hash<double>()(v.f);
  }
  return 0;
}

bool is_comparison(Op op) {
  switch (op) {
    case Op::Eq:
    case Op::Slt:
    case Op::Sle:
    case Op::Ult:
    case Op::Ule:
    case Op::FLt:
    case Op::FLe:
    case Op::FEq:
    case Op::AddOverflow:
    case Op::SubOverflow:
    case Op::MulOverflow:
    case Op::NegOverflow:
    case Op::DivOverflow:
    case Op::Not:
    case Op::And:
    case Op::Or:
    case Op::Implies:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Symbol: return "symbol";
    case Op::Nondet: return "nondet";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Ite: return "ite";
    case Op::Eq: return "==";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Neg: return "-";
    case Op::UDiv: return "/u";
    case Op::URem: return "%u";
    case Op::SDiv: return "/s";
    case Op::SRem: return "%s";
    case Op::FloorDiv: return "//";
    case Op::FloorMod: return "%";
    case Op::BvAnd: return "&";
    case Op::BvOr: return "|";
    case Op::BvXor: return "^";
    case Op::BvNot: return "~";
    case Op::Shl: return "<<";
    case Op::LShr: return ">>u";
    case Op::AShr: return ">>";
    case Op::Slt: return "<";
    case Op::Sle: return "<=";
    case Op::Ult: return "<u";
    case Op::Ule: return "<=u";
    case Op::ZeroExt: return "zext";
    case Op::SignExt: return "sext";
    case Op::Extract: return "trunc";
    case Op::FAdd: return "+.";
    case Op::FSub: return "-.";
    case Op::FMul: return "*.";
    case Op::FDiv: return "/.";
    case Op::FNeg: return "-.";
    case Op::FLt: return "<.";
    case Op::FLe: return "<=.";
    case Op::FEq: return "==.";
    case Op::SIntToFp: return "float";
    case Op::UIntToFp: return "float_u";
    case Op::FpToSInt: return "int";
    case Op::FpToUInt: return "int_u";
    case Op::AddOverflow: return "overflow_add";
    case Op::SubOverflow: return "overflow_sub";
    case Op::MulOverflow: return "overflow_mul";
    case Op::NegOverflow: return "overflow_neg";
    case Op::DivOverflow: return "overflow_div";
  }
  return "?";
}

Expr Expr::constant(const Value& v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->sort = v.sort;
  n->value = v;
  n->hash = combine(static_cast<std::size_t>(Op::Const), value_hash(v));
  Expr e;
  e.node_ = std::move(n);
  return e;
}

Expr Expr::symbol(std::string name, Sort sort, int version) {
  auto n = std::make_shared<Node>();
  n->op = Op::Symbol;
  n->sort = sort;
  n->hash = combine(std::hash<std::string>()(name), static_cast<std::size_t>(version + 7));
  n->name = std::move(name);
  n->version = version;
  Expr e;
  e.node_ = std::move(n);
  return e;
}

Expr Expr::nondet(Sort sort) {
  static std::size_t counter = 0;
  auto n = std::make_shared<Node>();
  n->op = Op::Nondet;
  n->sort = sort;
  // Each nondet node is distinct; identity is its address.
  n->hash = combine(static_cast<std::size_t>(Op::Nondet), ++counter);
  Expr e;
  e.node_ = std::move(n);
  return e;
}

Expr Expr::make(Op op, Sort sort, std::vector<Expr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->sort = sort;
  std::size_t h = combine(static_cast<std::size_t>(op) * 131, static_cast<std::size_t>(sort.kind) * 17 + sort.width);
  for (const auto& a : args) h = combine(h, a.hash());
  n->hash = h;
  n->args = std::move(args);
  Expr e;
  e.node_ = std::move(n);
  return e;
}

Op Expr::op() const { return node_->op; }
const Sort& Expr::sort() const { return node_->sort; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const Value& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
int Expr::version() const { return node_->version; }
std::size_t Expr::hash() const { return node_ ? node_->hash : 0; }

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.hash != b.hash || a.op != b.op || !(a.sort == b.sort)) return false;
  switch (a.op) {
    case Op::Const: return a.value == b.value;
    case Op::Symbol: return a.name == b.name && a.version == b.version;
    case Op::Nondet: return false;
    default: break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i] != b.args[i]) return false;
  }
  return true;
}

std::string Expr::to_string() const {
  if (!node_) return "<null>";
  const Node& n = *node_;
  auto paren = [](const Expr& e) {
    if (e.is_const() || e.is_symbol() || e.op() == Op::Nondet) return e.to_string();
    return "(" + e.to_string() + ")";
  };
  switch (n.op) {
    case Op::Const:
      switch (n.sort.kind) {
        case Sort::Kind::Bool: return n.value.b ? "true" : "false";
        case Sort::Kind::BitVec: return n.value.as_signed().str();
        case Sort::Kind::Float: return format_float(n.value.f);
      }
      break;
    case Op::Symbol:
      return n.version >= 0 ? n.name + "!" + std::to_string(n.version) : n.name;
    case Op::Nondet:
      return "nondet()";
    case Op::Not:
      return "!" + paren(n.args[0]);
    case Op::Neg:
    case Op::FNeg:
      return "-" + paren(n.args[0]);
    case Op::BvNot:
      return "~" + paren(n.args[0]);
    case Op::And:
    case Op::Or: {
      std::string out;
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += n.op == Op::And ? " && " : " || ";
        out += paren(n.args[i]);
      }
      return out;
    }
    case Op::Ite:
      return paren(n.args[0]) + " ? " + paren(n.args[1]) + " : " + paren(n.args[2]);
    case Op::ZeroExt:
    case Op::SignExt:
    case Op::Extract:
      return std::string(op_name(n.op)) + std::to_string(n.sort.width) + "(" + n.args[0].to_string() + ")";
    case Op::SIntToFp:
    case Op::UIntToFp:
    case Op::FpToSInt:
    case Op::FpToUInt:
    case Op::AddOverflow:
    case Op::SubOverflow:
    case Op::MulOverflow:
    case Op::NegOverflow:
    case Op::DivOverflow: {
      std::string out = std::string(op_name(n.op)) + "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        out += n.args[i].to_string();
      }
      return out + ")";
    }
    default:
      if (n.args.size() == 2) return paren(n.args[0]) + " " + std::string(op_name(n.op)) + " " + paren(n.args[1]);
      break;
  }
  return std::string(op_name(n.op));
}

// ---------------------------------------------------------------------------
// Builders

Expr mk_not(const Expr& e) {
  if (e.is_const()) return Expr::boolean(!e.value().b);
  if (e.op() == Op::Not) return e.arg(0);
  return Expr::make(Op::Not, Sort::boolean(), {e});
}

Expr mk_and(std::vector<Expr> conjuncts) {
  std::vector<Expr> kept;
  for (auto& c : conjuncts) {
    if (c.is_true()) continue;
    if (c.is_false()) return Expr::boolean(false);
    if (c.op() == Op::And) {
      for (const auto& inner : c.args()) kept.push_back(inner);
    } else {
      kept.push_back(std::move(c));
    }
  }
  if (kept.empty()) return Expr::boolean(true);
  if (kept.size() == 1) return kept[0];
  return Expr::make(Op::And, Sort::boolean(), std::move(kept));
}

Expr mk_and(const Expr& a, const Expr& b) { return mk_and(std::vector<Expr>{a, b}); }

Expr mk_or(std::vector<Expr> disjuncts) {
  std::vector<Expr> kept;
  for (auto& d : disjuncts) {
    if (d.is_false()) continue;
    if (d.is_true()) return Expr::boolean(true);
    if (d.op() == Op::Or) {
      for (const auto& inner : d.args()) kept.push_back(inner);
    } else {
      kept.push_back(std::move(d));
    }
  }
  if (kept.empty()) return Expr::boolean(false);
  if (kept.size() == 1) return kept[0];
  return Expr::make(Op::Or, Sort::boolean(), std::move(kept));
}

Expr mk_or(const Expr& a, const Expr& b) { return mk_or(std::vector<Expr>{a, b}); }

Expr mk_implies(const Expr& a, const Expr& b) {
  if (a.is_true()) return b;
  if (a.is_false() || b.is_true()) return Expr::boolean(true);
  return Expr::make(Op::Implies, Sort::boolean(), {a, b});
}

Expr mk_ite(const Expr& c, const Expr& a, const Expr& b) {
  if (c.is_true()) return a;
  if (c.is_false()) return b;
  if (a == b) return a;
  if (a.sort().is_bool()) {
    if (a.is_true() && b.is_false()) return c;
    if (a.is_false() && b.is_true()) return mk_not(c);
  }
  return Expr::make(Op::Ite, a.sort(), {c, a, b});
}

Expr mk_eq(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) {
    if (a.sort().is_fp()) return Expr::boolean(a.value().f == b.value().f);
    return Expr::boolean(a.value() == b.value());
  }
  if (a.sort().is_fp()) return Expr::make(Op::FEq, Sort::boolean(), {a, b});
  return Expr::make(Op::Eq, Sort::boolean(), {a, b});
}

Expr mk_bin(Op op, const Expr& a, const Expr& b) {
  if (op == Op::Eq) return mk_eq(a, b);
  if (op == Op::And) return mk_and(a, b);
  if (op == Op::Or) return mk_or(a, b);
  if (op == Op::Implies) return mk_implies(a, b);
  Sort sort = is_comparison(op) ? Sort::boolean() : a.sort();
  return Expr::make(op, sort, {a, b});
}

Expr mk_un(Op op, const Expr& a) {
  if (op == Op::Not) return mk_not(a);
  Sort sort = is_comparison(op) ? Sort::boolean() : a.sort();
  return Expr::make(op, sort, {a});
}

Expr mk_resize(const Expr& e, unsigned width, bool is_signed) {
  unsigned from = e.sort().width;
  if (from == width) return e;
  if (width < from) return Expr::make(Op::Extract, Sort::bitvec(width), {e});
  return Expr::make(is_signed ? Op::SignExt : Op::ZeroExt, Sort::bitvec(width), {e});
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double to_double(const cpp_int& v) { return v.convert_to<double>(); }

Value fp_to_int(double f, unsigned width, bool is_signed) {
  if (std::isnan(f) || std::isinf(f)) return Value::bitvec(width, 0);
  double t = std::trunc(f);
  cpp_int v;
  // Exact conversion of the integral double.
  int exponent = 0;
  double mantissa = std::frexp(std::fabs(t), &exponent);
  cpp_int m = static_cast<unsigned long long>(std::ldexp(mantissa, 53));
  if (exponent >= 53) {
    v = m << (exponent - 53);
  } else {
    v = m >> (53 - exponent);
  }
  if (t < 0) v = -v;
  (void)is_signed;
  return Value::from_integer(width, v);
}

}  // namespace

Value apply_op(Op op, const Sort& sort, const std::vector<Value>& a) {
  const unsigned w = a.empty() ? 0 : a[0].sort.width;
  switch (op) {
    case Op::Not: return Value::boolean(!a[0].b);
    case Op::And: {
      for (const auto& v : a) {
        if (!v.b) return Value::boolean(false);
      }
      return Value::boolean(true);
    }
    case Op::Or: {
      for (const auto& v : a) {
        if (v.b) return Value::boolean(true);
      }
      return Value::boolean(false);
    }
    case Op::Implies: return Value::boolean(!a[0].b || a[1].b);
    case Op::Ite: return a[0].b ? a[1] : a[2];
    case Op::Eq: return Value::boolean(a[0] == a[1]);
    case Op::Add: return Value::bitvec(w, bv::add(a[0].bits, a[1].bits, w));
    case Op::Sub: return Value::bitvec(w, bv::sub(a[0].bits, a[1].bits, w));
    case Op::Mul: return Value::bitvec(w, bv::mul(a[0].bits, a[1].bits, w));
    case Op::Neg: return Value::bitvec(w, bv::neg(a[0].bits, w));
    case Op::UDiv: return Value::bitvec(w, bv::udiv(a[0].bits, a[1].bits, w));
    case Op::URem: return Value::bitvec(w, bv::urem(a[0].bits, a[1].bits, w));
    case Op::SDiv: return Value::bitvec(w, bv::sdiv(a[0].bits, a[1].bits, w));
    case Op::SRem: return Value::bitvec(w, bv::srem(a[0].bits, a[1].bits, w));
    case Op::FloorDiv: return Value::bitvec(w, bv::floordiv(a[0].bits, a[1].bits, w));
    case Op::FloorMod: return Value::bitvec(w, bv::floormod(a[0].bits, a[1].bits, w));
    case Op::BvAnd: return Value::bitvec(w, a[0].bits & a[1].bits);
    case Op::BvOr: return Value::bitvec(w, a[0].bits | a[1].bits);
    case Op::BvXor: return Value::bitvec(w, a[0].bits ^ a[1].bits);
    case Op::BvNot: return Value::bitvec(w, ~a[0].bits);
    case Op::Shl: return Value::bitvec(w, bv::shl(a[0].bits, a[1].bits, w));
    case Op::LShr: return Value::bitvec(w, bv::lshr(a[0].bits, a[1].bits, w));
    case Op::AShr: return Value::bitvec(w, bv::ashr(a[0].bits, a[1].bits, w));
    case Op::Slt: return Value::boolean(bv::slt(a[0].bits, a[1].bits, w));
    case Op::Sle: return Value::boolean(bv::sle(a[0].bits, a[1].bits, w));
    case Op::Ult: return Value::boolean(a[0].bits < a[1].bits);
    case Op::Ule: return Value::boolean(a[0].bits <= a[1].bits);
    case Op::ZeroExt: return Value::bitvec(sort.width, a[0].bits);
    case Op::SignExt: return Value::bitvec(sort.width, bv::sign_extend(a[0].bits, w, sort.width));
    case Op::Extract: return Value::bitvec(sort.width, a[0].bits);
    case Op::FAdd: return Value::fp(a[0].f + a[1].f);
    case Op::FSub: return Value::fp(a[0].f - a[1].f);
    case Op::FMul: return Value::fp(a[0].f * a[1].f);
    case Op::FDiv: return Value::fp(a[0].f / a[1].f);
    case Op::FNeg: return Value::fp(-a[0].f);
    case Op::FLt: return Value::boolean(a[0].f < a[1].f);
    case Op::FLe: return Value::boolean(a[0].f <= a[1].f);
    case Op::FEq: return Value::boolean(a[0].f == a[1].f);
    case Op::SIntToFp: return Value::fp(to_double(a[0].as_signed()));
    case Op::UIntToFp: return Value::fp(to_double(a[0].as_unsigned()));
    case Op::FpToSInt: return fp_to_int(a[0].f, sort.width, true);
    case Op::FpToUInt: return fp_to_int(a[0].f, sort.width, false);
    case Op::AddOverflow: {
      cpp_int r = a[0].as_signed() + a[1].as_signed();
      return Value::boolean(Value::from_integer(w, r).as_signed() != r);
    }
    case Op::SubOverflow: {
      cpp_int r = a[0].as_signed() - a[1].as_signed();
      return Value::boolean(Value::from_integer(w, r).as_signed() != r);
    }
    case Op::MulOverflow: {
      cpp_int r = a[0].as_signed() * a[1].as_signed();
      return Value::boolean(Value::from_integer(w, r).as_signed() != r);
    }
    case Op::NegOverflow:
      return Value::boolean(a[0].bits == (u256(1) << (w - 1)));
    case Op::DivOverflow:
      return Value::boolean(a[0].bits == (u256(1) << (w - 1)) && a[1].bits == bv::mask(w));
    default:
      break;
  }
  throw Error(ErrorCode::Internal, "cannot evaluate operator " + std::string(op_name(op)));
}

Value evaluate(const Expr& e, const SymbolLookup& lookup) {
  switch (e.op()) {
    case Op::Const: return e.value();
    case Op::Symbol: return lookup(e);
    case Op::Nondet: throw Error(ErrorCode::Internal, "evaluating a nondet expression");
    case Op::And: {
      for (const auto& a : e.args()) {
        if (!evaluate(a, lookup).b) return Value::boolean(false);
      }
      return Value::boolean(true);
    }
    case Op::Or: {
      for (const auto& a : e.args()) {
        if (evaluate(a, lookup).b) return Value::boolean(true);
      }
      return Value::boolean(false);
    }
    case Op::Implies:
      if (!evaluate(e.arg(0), lookup).b) return Value::boolean(true);
      return evaluate(e.arg(1), lookup);
    case Op::Ite:
      return evaluate(e.arg(0), lookup).b ? evaluate(e.arg(1), lookup) : evaluate(e.arg(2), lookup);
    default: {
      std::vector<Value> args;
      args.reserve(e.args().size());
      for (const auto& a : e.args()) args.push_back(evaluate(a, lookup));
      return apply_op(e.op(), e.sort(), args);
    }
  }
}

// ---------------------------------------------------------------------------
// Rewriting

Expr rewrite(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& f) {
  std::unordered_map<const void*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    Expr rebuilt = x;
    if (!x.args().empty()) {
      std::vector<Expr> args;
      bool changed = false;
      for (const auto& a : x.args()) {
        args.push_back(go(a));
        if (args.back().id() != a.id()) changed = true;
      }
      if (changed) rebuilt = Expr::make(x.op(), x.sort(), std::move(args));
    }
    if (auto r = f(rebuilt)) rebuilt = *r;
    memo.emplace(x.id(), rebuilt);
    return rebuilt;
  };
  return go(e);
}

Expr substitute_symbols(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& f) {
  std::unordered_map<const void*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    if (x.op() == Op::Symbol || x.op() == Op::Nondet) {
      auto r = f(x);
      return r ? *r : x;
    }
    if (x.args().empty()) return x;
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    std::vector<Expr> args;
    bool changed = false;
    for (const auto& a : x.args()) {
      args.push_back(go(a));
      if (args.back().id() != a.id()) changed = true;
    }
    Expr out = changed ? Expr::make(x.op(), x.sort(), std::move(args)) : x;
    memo.emplace(x.id(), out);
    return out;
  };
  return go(e);
}

Expr simplify_expr(const Expr& e) {
  return rewrite(e, [](const Expr& x) -> std::optional<Expr> {
    if (x.args().empty()) return std::nullopt;
    switch (x.op()) {
      case Op::Not: return mk_not(x.arg(0));
      case Op::And: return mk_and(x.args());
      case Op::Or: return mk_or(x.args());
      case Op::Implies: return mk_implies(x.arg(0), x.arg(1));
      case Op::Ite: return mk_ite(x.arg(0), x.arg(1), x.arg(2));
      case Op::Eq:
        if (x.arg(0) == x.arg(1)) return Expr::boolean(true);
        break;
      default:
        break;
    }
    bool all_const = true;
    for (const auto& a : x.args()) all_const = all_const && a.is_const();
    if (!all_const) {
      // Arithmetic identities that hold under modular semantics.
      if (x.args().size() == 2 && x.sort().is_bv()) {
        const Expr& a = x.arg(0);
        const Expr& b = x.arg(1);
        auto is_zero = [](const Expr& c) { return c.is_const() && c.sort().is_bv() && c.value().bits == 0; };
        if ((x.op() == Op::Add || x.op() == Op::Sub || x.op() == Op::BvOr || x.op() == Op::BvXor) && is_zero(b)) {
          return a;
        }
        if ((x.op() == Op::Add || x.op() == Op::BvOr || x.op() == Op::BvXor) && is_zero(a)) return b;
      }
      return std::nullopt;
    }
    std::vector<Value> values;
    for (const auto& a : x.args()) values.push_back(a.value());
    return Expr::constant(apply_op(x.op(), x.sort(), values));
  });
}

void collect_symbols(const Expr& e, std::vector<Expr>& out, std::vector<const void*>& seen) {
  std::unordered_set<const void*> visited;
  std::unordered_set<std::string> names;
  for (const auto& s : out) names.insert(s.to_string());
  (void)seen;
  std::function<void(const Expr&)> go = [&](const Expr& x) {
    if (!visited.insert(x.id()).second) return;
    if (x.is_symbol()) {
      if (names.insert(x.to_string()).second) out.push_back(x);
      return;
    }
    for (const auto& a : x.args()) go(a);
  };
  go(e);
}

std::vector<Expr> collect_symbols(const Expr& e) {
  std::vector<Expr> out;
  std::vector<const void*> seen;
  collect_symbols(e, out, seen);
  return out;
}

bool contains_op(const Expr& e, Op op) {
  std::unordered_set<const void*> visited;
  std::function<bool(const Expr&)> go = [&](const Expr& x) {
    if (x.op() == op) return true;
    if (!visited.insert(x.id()).second) return false;
    for (const auto& a : x.args()) {
      if (go(a)) return true;
    }
    return false;
  };
  return go(e);
}

std::size_t expr_size(const Expr& e) {
  std::size_t n = 1;
  for (const auto& a : e.args()) n += expr_size(a);
  return n;
}

}  // namespace pybmc
