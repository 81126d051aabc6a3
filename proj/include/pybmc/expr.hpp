#pragma once

// Sorted expression trees shared by the GOTO program, the SSA trace and the
// verification conditions. Nodes are immutable and shared.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pybmc/value.hpp"

namespace pybmc {

enum class Op {
  Const,
  Symbol,
  Nondet,  // fresh unconstrained value; removed by symbolic execution
  Not,
  And,
  Or,
  Implies,
  Ite,
  Eq,
  Add,
  Sub,
  Mul,
  Neg,
  UDiv,
  URem,
  SDiv,
  SRem,
  FloorDiv,  // Python `//` on signed operands
  FloorMod,  // Python `%` on signed operands
  BvAnd,
  BvOr,
  BvXor,
  BvNot,
  Shl,
  LShr,
  AShr,
  Slt,
  Sle,
  Ult,
  Ule,
  ZeroExt,
  SignExt,
  Extract,  // low bits, result width from the sort
  FAdd,
  FSub,
  FMul,
  FDiv,
  FNeg,
  FLt,
  FLe,
  FEq,
  SIntToFp,
  UIntToFp,
  FpToSInt,  // round toward zero
  FpToUInt,
  // Two's-complement overflow predicates of signed operations.
  AddOverflow,
  SubOverflow,
  MulOverflow,
  NegOverflow,
  DivOverflow,
};

std::string_view op_name(Op op);

class Expr {
 public:
  Expr() = default;

  static Expr constant(const Value& v);
  static Expr boolean(bool v) { return constant(Value::boolean(v)); }
  static Expr bv(unsigned width, const u256& bits) { return constant(Value::bitvec(width, bits)); }
  static Expr integer(unsigned width, const cpp_int& v) { return constant(Value::from_integer(width, v)); }
  static Expr fp(double v) { return constant(Value::fp(v)); }
  static Expr symbol(std::string name, Sort sort, int version = -1);
  static Expr nondet(Sort sort);
  static Expr make(Op op, Sort sort, std::vector<Expr> args);

  bool is_null() const { return !node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }
  Op op() const;
  const Sort& sort() const;
  const std::vector<Expr>& args() const;
  const Expr& arg(std::size_t i) const { return args()[i]; }
  const Value& value() const;
  const std::string& name() const;
  int version() const;

  bool is_const() const { return node_ && op() == Op::Const; }
  bool is_symbol() const { return node_ && op() == Op::Symbol; }
  bool is_true() const { return is_const() && sort().is_bool() && value().b; }
  bool is_false() const { return is_const() && sort().is_bool() && !value().b; }

  // Structural equality.
  bool operator==(const Expr& other) const;
  bool operator!=(const Expr& other) const { return !(*this == other); }
  std::size_t hash() const;
  const void* id() const { return node_.get(); }

  // Infix rendering for listings; symbols print as name or name!version.
  std::string to_string() const;

 private:
  struct Node;
  std::shared_ptr<const Node> node_;
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Builders; they fold trivial boolean cases but do no arithmetic folding.
Expr mk_not(const Expr& e);
Expr mk_and(std::vector<Expr> conjuncts);
Expr mk_and(const Expr& a, const Expr& b);
Expr mk_or(std::vector<Expr> disjuncts);
Expr mk_or(const Expr& a, const Expr& b);
Expr mk_implies(const Expr& a, const Expr& b);
Expr mk_ite(const Expr& c, const Expr& a, const Expr& b);
Expr mk_eq(const Expr& a, const Expr& b);
// Binary operation; the result sort is Bool for comparisons and predicates,
// otherwise the operand sort.
Expr mk_bin(Op op, const Expr& a, const Expr& b);
Expr mk_un(Op op, const Expr& a);
// Width change between bit-vector sorts (extension or truncation).
Expr mk_resize(const Expr& e, unsigned width, bool is_signed);

// Concrete evaluation; `lookup` supplies symbol values.
using SymbolLookup = std::function<Value(const Expr& symbol)>;
Value evaluate(const Expr& e, const SymbolLookup& lookup);
// Evaluation of a single operator on already evaluated operands.
Value apply_op(Op op, const Sort& sort, const std::vector<Value>& args);

// Constant folding and boolean simplification to a fixpoint-free single pass.
Expr simplify_expr(const Expr& e);

// Bottom-up rewrite: `f` may replace a node (after its children were rebuilt).
Expr rewrite(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& f);
// Leaf substitution applied top-down on symbols and nondet nodes only.
Expr substitute_symbols(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& f);

// Distinct symbols in first-occurrence order.
std::vector<Expr> collect_symbols(const Expr& e);
void collect_symbols(const Expr& e, std::vector<Expr>& out, std::vector<const void*>& seen);
bool contains_op(const Expr& e, Op op);
std::size_t expr_size(const Expr& e);

}  // namespace pybmc
