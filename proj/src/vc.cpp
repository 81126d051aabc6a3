#include "pybmc/vc.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace pybmc {

Expr Vc::constraints() const {
  std::vector<Expr> parts = definitions;
  parts.insert(parts.end(), assumptions.begin(), assumptions.end());
  return mk_and(parts);
}

Expr Vc::query() const { return mk_and(constraints(), mk_not(property)); }

std::vector<std::size_t> assertion_steps(const SsaTrace& trace) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    if (trace.steps[i].kind == StepKind::Assertion) out.push_back(i);
  }
  return out;
}

Vc generate_vc(const SsaTrace& trace, std::size_t assertion_index) {
  const auto positions = assertion_steps(trace);
  if (assertion_index >= positions.size()) throw Error(ErrorCode::Internal, "no such assertion");
  const std::size_t at = positions[assertion_index];
  const SsaStep& assertion = trace.steps[at];

  Vc vc;
  vc.step = at;
  vc.property_class = assertion.property;
  vc.text = assertion.text;
  vc.loc = assertion.loc;
  vc.property = mk_implies(assertion.guard, assertion.cond);

  std::map<std::pair<std::string, int>, std::size_t> position;  // first trace position of each symbol
  for (std::size_t i = 0; i < at; ++i) {
    const SsaStep& s = trace.steps[i];
    if (s.kind == StepKind::Assignment || s.kind == StepKind::Phi) position.emplace(std::make_pair(s.lhs.name(), s.lhs.version()), i);
  }

  std::vector<Expr> roots = {vc.property};
  std::vector<std::pair<std::size_t, Expr>> assumptions;
  for (std::size_t i = 0; i < at; ++i) {
    const SsaStep& s = trace.steps[i];
    if (s.kind != StepKind::Assumption) continue;
    Expr a = simplify_expr(mk_implies(s.guard, s.cond));
    if (a.is_true()) continue;
    vc.assumptions.push_back(a);
    roots.push_back(a);
  }

  // Cone of influence over the defining equations.
  std::set<std::pair<std::string, int>> seen;
  std::vector<Expr> work;
  for (const auto& r : roots) {
    for (const auto& s : collect_symbols(r)) work.push_back(s);
  }
  std::vector<std::pair<std::size_t, Expr>> cone;  // (position, symbol)
  std::size_t unplaced = trace.steps.size();
  while (!work.empty()) {
    Expr sym = work.back();
    work.pop_back();
    auto key = std::make_pair(sym.name(), sym.version());
    if (!seen.insert(key).second) continue;
    auto it = position.find(key);
    if (it == position.end()) {
      cone.push_back({unplaced++, sym});
      continue;
    }
    cone.push_back({it->second, sym});
    const SsaStep& def = trace.steps[it->second];
    if (def.rhs) {
      for (const auto& s : collect_symbols(def.rhs)) work.push_back(s);
    }
  }
  std::sort(cone.begin(), cone.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [pos, sym] : cone) {
    vc.symbols.push_back(sym);
    if (pos < trace.steps.size() && trace.steps[pos].rhs) {
      vc.definitions.push_back(Expr::make(Op::Eq, Sort::boolean(), {sym, trace.steps[pos].rhs}));
    } else {
      vc.inputs.push_back(sym);
    }
  }
  return vc;
}

std::string ssa_name(const Expr& symbol) {
  if (symbol.version() < 0) return symbol.name();
  return symbol.name() + "!" + std::to_string(symbol.version());
}

std::string smt_symbol(const Expr& symbol) { return "|" + ssa_name(symbol) + "|"; }

std::string smt_sort(const Sort& sort) {
  switch (sort.kind) {
    case Sort::Kind::Bool: return "Bool";
    case Sort::Kind::BitVec: return "(_ BitVec " + std::to_string(sort.width) + ")";
    case Sort::Kind::Float: return "(_ FloatingPoint 11 53)";
  }
  return "?";
}

namespace {

std::string bits_of(const u256& v, unsigned width) {
  std::string out(width, '0');
  for (unsigned i = 0; i < width; ++i) {
    if (bit_test(v, i)) out[width - 1 - i] = '1';
  }
  return out;
}

std::string bv_literal(const u256& v, unsigned width) {
  if (width % 4 != 0) return "#b" + bits_of(v, width);
  static const char* digits = "0123456789abcdef";
  std::string out(width / 4, '0');
  u256 x = v;
  for (unsigned i = 0; i < width / 4; ++i) {
    out[width / 4 - 1 - i] = digits[static_cast<unsigned>(x & 15)];
    x >>= 4;
  }
  return "#x" + out;
}

std::string fp_literal(double d) {
  std::uint64_t raw = 0;
  std::memcpy(&raw, &d, sizeof raw);
  std::string b = bits_of(u256(raw), 64);
  return "(fp #b" + b.substr(0, 1) + " #b" + b.substr(1, 11) + " #b" + b.substr(12) + ")";
}

class Printer {
 public:
  explicit Printer(const std::unordered_map<const void*, std::string>& shared) : shared_(shared) {}

  std::string term(const Expr& e, bool top = false) const {
    if (!top) {
      if (auto it = shared_.find(e.id()); it != shared_.end()) return it->second;
    }
    const auto& a = e.args();
    auto t = [&](std::size_t i) { return term(a[i]); };
    auto app = [&](const std::string& f) {
      std::string out = "(" + f;
      for (std::size_t i = 0; i < a.size(); ++i) out += " " + t(i);
      return out + ")";
    };
    const unsigned w = a.empty() || !a[0].sort().is_bv() ? 0 : a[0].sort().width;
    switch (e.op()) {
      case Op::Const: {
        const Value& v = e.value();
        switch (v.sort.kind) {
          case Sort::Kind::Bool: return v.b ? "true" : "false";
          case Sort::Kind::BitVec: return bv_literal(v.bits, v.sort.width);
          case Sort::Kind::Float: return fp_literal(v.f);
        }
        break;
      }
      case Op::Symbol: return smt_symbol(e);
      case Op::Nondet: throw Error(ErrorCode::Internal, "nondet value in a verification condition");
      case Op::Not: return app("not");
      case Op::And: return app("and");
      case Op::Or: return app("or");
      case Op::Implies: return app("=>");
      case Op::Ite: return app("ite");
      case Op::Eq: return app("=");
      case Op::Add: return app("bvadd");
      case Op::Sub: return app("bvsub");
      case Op::Mul: return app("bvmul");
      case Op::Neg: return app("bvneg");
      case Op::UDiv: return app("bvudiv");
      case Op::URem: return app("bvurem");
      case Op::SDiv: return app("bvsdiv");
      case Op::SRem: return app("bvsrem");
      case Op::FloorDiv:
      case Op::FloorMod: {
        // Truncating division corrected toward negative infinity when the
        // remainder and the divisor differ in sign.
        const std::string zero = bv_literal(0, w);
        const std::string b = t(1);
        const std::string fix = "(and (not (= |.r| " + zero + ")) (not (= (bvslt |.r| " + zero + ") (bvslt " + b + " " +
                                zero + "))))";
        const std::string result = e.op() == Op::FloorDiv ? "(ite " + fix + " (bvsub |.q| " + bv_literal(1, w) + ") |.q|)"
                                                          : "(ite " + fix + " (bvadd |.r| " + b + ") |.r|)";
        return "(let ((|.q| (bvsdiv " + t(0) + " " + b + ")) (|.r| (bvsrem " + t(0) + " " + b + "))) " + result + ")";
      }
      case Op::BvAnd: return app("bvand");
      case Op::BvOr: return app("bvor");
      case Op::BvXor: return app("bvxor");
      case Op::BvNot: return app("bvnot");
      case Op::Shl: return app("bvshl");
      case Op::LShr: return app("bvlshr");
      case Op::AShr: return app("bvashr");
      case Op::Slt: return app("bvslt");
      case Op::Sle: return app("bvsle");
      case Op::Ult: return app("bvult");
      case Op::Ule: return app("bvule");
      case Op::ZeroExt:
        return "((_ zero_extend " + std::to_string(e.sort().width - w) + ") " + t(0) + ")";
      case Op::SignExt:
        return "((_ sign_extend " + std::to_string(e.sort().width - w) + ") " + t(0) + ")";
      case Op::Extract:
        return "((_ extract " + std::to_string(e.sort().width - 1) + " 0) " + t(0) + ")";
      case Op::FAdd: return "(fp.add RNE " + t(0) + " " + t(1) + ")";
      case Op::FSub: return "(fp.sub RNE " + t(0) + " " + t(1) + ")";
      case Op::FMul: return "(fp.mul RNE " + t(0) + " " + t(1) + ")";
      case Op::FDiv: return "(fp.div RNE " + t(0) + " " + t(1) + ")";
      case Op::FNeg: return app("fp.neg");
      case Op::FLt: return app("fp.lt");
      case Op::FLe: return app("fp.leq");
      case Op::FEq: return app("fp.eq");
      case Op::SIntToFp: return "((_ to_fp 11 53) RNE " + t(0) + ")";
      case Op::UIntToFp: return "((_ to_fp_unsigned 11 53) RNE " + t(0) + ")";
      case Op::FpToSInt: return "((_ fp.to_sbv " + std::to_string(e.sort().width) + ") RTZ " + t(0) + ")";
      case Op::FpToUInt: return "((_ fp.to_ubv " + std::to_string(e.sort().width) + ") RTZ " + t(0) + ")";
      case Op::AddOverflow:
      case Op::SubOverflow:
      case Op::MulOverflow: {
        // Exact result in a wider vector differs from the wrapped one.
        const unsigned extra = e.op() == Op::MulOverflow ? w : 1;
        const std::string f = e.op() == Op::AddOverflow ? "bvadd" : e.op() == Op::SubOverflow ? "bvsub" : "bvmul";
        const std::string ext = "(_ sign_extend " + std::to_string(extra) + ")";
        return "(not (= (" + ext + " (" + f + " " + t(0) + " " + t(1) + ")) (" + f + " (" + ext + " " + t(0) +
               ") (" + ext + " " + t(1) + "))))";
      }
      case Op::NegOverflow: return "(= " + t(0) + " " + bv_literal(u256(1) << (w - 1), w) + ")";
      case Op::DivOverflow:
        return "(and (= " + t(0) + " " + bv_literal(u256(1) << (w - 1), w) + ") (= " + t(1) + " " +
               bv_literal(bv::mask(w), w) + "))";
    }
    throw Error(ErrorCode::UnsupportedSort, "operator without an SMT-LIB rendering");
  }

 private:
  const std::unordered_map<const void*, std::string>& shared_;
};

// Counts parents of each node so subterms used more than once are printed once.
void count_uses(const Expr& e, std::unordered_map<const void*, int>& uses, std::vector<Expr>& order) {
  int& n = uses[e.id()];
  if (n++ > 0) return;
  for (const auto& a : e.args()) count_uses(a, uses, order);
  order.push_back(e);  // children first
}

bool uses_fp(const Vc& vc) {
  for (const auto& s : vc.symbols) {
    if (s.sort().is_fp()) return true;
  }
  std::vector<Expr> all = vc.definitions;
  all.push_back(vc.property);
  all.insert(all.end(), vc.assumptions.begin(), vc.assumptions.end());
  for (const auto& e : all) {
    for (Op op : {Op::SIntToFp, Op::UIntToFp, Op::FpToSInt, Op::FpToUInt, Op::FLt, Op::FLe, Op::FEq}) {
      if (contains_op(e, op)) return true;
    }
  }
  return false;
}

}  // namespace

std::string smt_logic(const Vc& vc) { return uses_fp(vc) ? "QF_BVFP" : "QF_BV"; }

SmtScript smtlib_body(const Vc& vc) {
  SmtScript script;
  std::ostringstream decl;
  for (const auto& s : vc.symbols) decl << "(declare-fun " << smt_symbol(s) << " () " << smt_sort(s.sort()) << ")\n";

  std::vector<Expr> asserted = vc.definitions;
  asserted.insert(asserted.end(), vc.assumptions.begin(), vc.assumptions.end());
  const Expr negated = mk_not(vc.property);
  asserted.push_back(negated);

  std::unordered_map<const void*, int> uses;
  std::vector<Expr> order;
  for (const auto& e : asserted) count_uses(e, uses, order);
  std::unordered_map<const void*, std::string> shared;
  std::size_t next = 0;
  for (const auto& e : order) {
    if (uses[e.id()] < 2 || e.args().empty()) continue;
    const std::string name = "|$s" + std::to_string(next++) + "|";
    decl << "(define-fun " << name << " () " << smt_sort(e.sort()) << ' ' << Printer(shared).term(e, true) << ")\n";
    shared.emplace(e.id(), name);
  }
  script.declarations = decl.str();

  std::ostringstream body;
  Printer printer(shared);
  for (const auto& e : asserted) body << "(assert " << printer.term(e) << ")\n";
  script.assertions = body.str();
  return script;
}

std::string emit_smtlib(const Vc& vc) {
  std::ostringstream os;
  os << "(set-logic " << smt_logic(vc) << ")\n";
  os << "(set-option :produce-models true)\n";
  SmtScript body = smtlib_body(vc);
  os << body.declarations << body.assertions << "(check-sat)\n";
  if (!vc.inputs.empty()) {
    os << "(get-value (";
    for (std::size_t i = 0; i < vc.inputs.size(); ++i) os << (i ? " " : "") << smt_symbol(vc.inputs[i]);
    os << "))\n";
  }
  os << "(exit)\n";
  return os.str();
}

}  // namespace pybmc
