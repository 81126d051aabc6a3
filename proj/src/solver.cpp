#include "pybmc/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <sstream>
#include <unordered_map>

#include <omp.h>

#include "pybmc/process.hpp"

namespace pybmc {

std::string_view solver_status_name(SolverStatus status) {
  switch (status) {
    case SolverStatus::Sat: return "SAT";
    case SolverStatus::Unsat: return "UNSAT";
    case SolverStatus::Unknown: return "UNKNOWN";
    case SolverStatus::Timeout: return "TIMEOUT";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Solver output

namespace {

struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> items;
  bool is_list = false;
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw Error(ErrorCode::ModelParseError, "unexpected end of solver output");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      SExpr list;
      list.is_list = true;
      while (true) {
        skip_space();
        if (pos_ >= text_.size()) throw Error(ErrorCode::ModelParseError, "unbalanced parentheses in solver output");
        if (text_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (c == ')') throw Error(ErrorCode::ModelParseError, "unexpected ')' in solver output");
    SExpr atom;
    if (c == '|') {
      std::size_t end = text_.find('|', pos_ + 1);
      if (end == std::string_view::npos) throw Error(ErrorCode::ModelParseError, "unterminated quoted symbol");
      atom.atom = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return atom;
    }
    if (c == '"') {
      std::size_t end = pos_ + 1;
      while (end < text_.size()) {
        if (text_[end] == '"' && (end + 1 >= text_.size() || text_[end + 1] != '"')) break;
        end += text_[end] == '"' ? 2 : 1;
      }
      atom.atom = std::string(text_.substr(pos_, end + 1 - pos_));
      pos_ = end + 1;
      return atom;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    atom.atom = std::string(text_.substr(start, pos_ - start));
    return atom;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

u256 parse_bits(const std::string& literal) {
  u256 v = 0;
  if (literal.rfind("#x", 0) == 0) {
    for (char c : literal.substr(2)) {
      v <<= 4;
      v |= static_cast<unsigned>(std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : std::tolower(c) - 'a' + 10);
    }
    return v;
  }
  if (literal.rfind("#b", 0) == 0) {
    for (char c : literal.substr(2)) {
      v <<= 1;
      v |= static_cast<unsigned>(c == '1');
    }
    return v;
  }
  throw Error(ErrorCode::ModelParseError, "bit-vector literal expected, got '" + literal + "'");
}

unsigned literal_width(const std::string& literal) {
  if (literal.rfind("#x", 0) == 0) return static_cast<unsigned>(4 * (literal.size() - 2));
  return static_cast<unsigned>(literal.size() - 2);
}

Value parse_value(const SExpr& e, const Sort& sort) {
  switch (sort.kind) {
    case Sort::Kind::Bool:
      if (e.atom == "true") return Value::boolean(true);
      if (e.atom == "false") return Value::boolean(false);
      break;
    case Sort::Kind::BitVec:
      if (!e.is_list) return Value::bitvec(sort.width, parse_bits(e.atom));
      if (e.items.size() == 3 && e.items[0].atom == "_" && e.items[1].atom.rfind("bv", 0) == 0) {
        return Value::from_integer(sort.width, cpp_int(e.items[1].atom.substr(2)));
      }
      break;
    case Sort::Kind::Float: {
      if (e.is_list && e.items.size() == 4 && e.items[0].atom == "fp") {
        u256 sign = parse_bits(e.items[1].atom);
        u256 exponent = parse_bits(e.items[2].atom);
        u256 mantissa = parse_bits(e.items[3].atom);
        if (literal_width(e.items[2].atom) != 11 || literal_width(e.items[3].atom) != 52) break;
        std::uint64_t raw = (static_cast<std::uint64_t>(sign) << 63) | (static_cast<std::uint64_t>(exponent) << 52) |
                            static_cast<std::uint64_t>(mantissa);
        double d;
        std::memcpy(&d, &raw, sizeof d);
        return Value::fp(d);
      }
      if (e.is_list && e.items.size() == 4 && e.items[0].atom == "_") {
        const std::string& k = e.items[1].atom;
        if (k == "+zero") return Value::fp(0.0);
        if (k == "-zero") return Value::fp(-0.0);
        if (k == "+oo") return Value::fp(std::numeric_limits<double>::infinity());
        if (k == "-oo") return Value::fp(-std::numeric_limits<double>::infinity());
        if (k == "NaN") return Value::fp(std::numeric_limits<double>::quiet_NaN());
      }
      break;
    }
  }
  throw Error(ErrorCode::ModelParseError, "cannot read a " + sort.to_string() + " value from the solver model");
}

}  // namespace

Model parse_model(const std::string& text, const std::vector<Expr>& inputs) {
  std::unordered_map<std::string, const Expr*> by_name;
  for (const auto& s : inputs) by_name.emplace(ssa_name(s), &s);
  Model model;
  SExprReader reader(text);
  while (!reader.at_end()) {
    SExpr e = reader.read();
    if (!e.is_list) continue;
    if (!e.items.empty() && !e.items[0].is_list && e.items[0].atom == "error") continue;
    for (const auto& binding : e.items) {
      if (!binding.is_list || binding.items.size() != 2 || binding.items[0].is_list) {
        throw Error(ErrorCode::ModelParseError, "malformed model binding");
      }
      auto it = by_name.find(binding.items[0].atom);
      if (it == by_name.end()) continue;
      model[it->first] = parse_value(binding.items[1], it->second->sort());
    }
  }
  return model;
}

namespace {

// Splits the response to one check-sat (plus its get-value) into a verdict.
Verdict read_verdict(const std::string& response, const std::vector<Expr>& inputs) {
  Verdict v;
  std::istringstream is(response);
  std::string first;
  while (std::getline(is, first)) {
    if (!first.empty() && first.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  first.erase(first.find_last_not_of(" \t\r") + 1);
  first.erase(0, first.find_first_not_of(" \t"));
  std::string rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (first == "sat") {
    v.status = SolverStatus::Sat;
    v.model = parse_model(rest, inputs);
    for (const auto& s : inputs) {
      if (!v.model.count(ssa_name(s))) {
        throw Error(ErrorCode::IncompleteModel, "solver model lacks a value for " + ssa_name(s));
      }
    }
  } else if (first == "unsat") {
    v.status = SolverStatus::Unsat;
  } else if (first == "unknown") {
    v.status = SolverStatus::Unknown;
    v.reason = "solver answered unknown";
  } else if (first == "timeout") {
    v.status = SolverStatus::Timeout;
  } else {
    throw Error(ErrorCode::SolverCrashed, "unexpected solver response: " + first.substr(0, 200));
  }
  return v;
}

ProcessResult invoke(const std::string& script, const std::string& solver_cmd, double timeout_seconds) {
  auto argv = split_command(solver_cmd);
  if (argv.empty()) throw Error(ErrorCode::InvalidConfig, "empty solver command");
  if (!find_executable(argv[0])) throw Error(ErrorCode::SolverCrashed, "solver '" + argv[0] + "' not found");
  ProcessResult r = run_process(argv, script, timeout_seconds);
  if (!r.timed_out && r.term_signal != 0) {
    throw Error(ErrorCode::SolverCrashed,
                "solver killed by signal " + std::to_string(r.term_signal) + ": " + r.err.substr(0, 300));
  }
  return r;
}

}  // namespace

Verdict solve_external(const std::string& script, const std::vector<Expr>& inputs, const std::string& solver_cmd,
                       double timeout_seconds) {
  ProcessResult r = invoke(script, solver_cmd, timeout_seconds);
  Verdict v;
  if (r.timed_out) {
    v.status = SolverStatus::Timeout;
    v.reason = "solver exceeded " + std::to_string(timeout_seconds) + " s";
  } else {
    if (r.out.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw Error(ErrorCode::SolverCrashed, "solver exited with status " + std::to_string(r.exit_code) +
                                                " and no answer: " + r.err.substr(0, 300));
    }
    v = read_verdict(r.out, inputs);
  }
  v.seconds = r.wall_seconds;
  return v;
}

Verdict solve_external(const Vc& vc, const std::string& solver_cmd, double timeout_seconds) {
  return solve_external(emit_smtlib(vc), vc.inputs, solver_cmd, timeout_seconds);
}

std::vector<Verdict> solve_external_batch(const std::vector<Vc>& vcs, const std::string& solver_cmd,
                                          double timeout_seconds) {
  if (vcs.empty()) return {};
  static const std::string marker = "--pybmc-end--";
  std::ostringstream os;
  bool fp = std::any_of(vcs.begin(), vcs.end(), [](const Vc& vc) { return smt_logic(vc) == "QF_BVFP"; });
  os << "(set-logic " << (fp ? "QF_BVFP" : "QF_BV") << ")\n(set-option :produce-models true)\n";
  for (const auto& vc : vcs) {
    SmtScript body = smtlib_body(vc);
    os << "(push 1)\n" << body.declarations << body.assertions << "(check-sat)\n";
    if (!vc.inputs.empty()) {
      os << "(get-value (";
      for (std::size_t i = 0; i < vc.inputs.size(); ++i) os << (i ? " " : "") << smt_symbol(vc.inputs[i]);
      os << "))\n";
    }
    os << "(echo \"" << marker << "\")\n(pop 1)\n";
  }
  os << "(exit)\n";
  ProcessResult r = invoke(os.str(), solver_cmd, timeout_seconds);
  std::vector<Verdict> out;
  std::size_t pos = 0;
  for (const auto& vc : vcs) {
    std::size_t end = r.out.find(marker, pos);
    if (end == std::string::npos) {
      if (r.timed_out) {
        Verdict v;
        v.status = SolverStatus::Timeout;
        v.reason = "solver exceeded " + std::to_string(timeout_seconds) + " s";
        out.push_back(v);
        continue;
      }
      throw Error(ErrorCode::SolverCrashed, "solver stopped early: " + r.err.substr(0, 300));
    }
    out.push_back(read_verdict(r.out.substr(pos, end - pos), vc.inputs));
    pos = end + marker.size();
  }
  for (auto& v : out) v.seconds = r.wall_seconds / static_cast<double>(out.size());
  return out;
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

using Key = std::pair<std::string, int>;
Key key_of(const Expr& s) { return {s.name(), s.version()}; }

// Flat evaluation program for C ∧ ¬P: every DAG node once, definitions
// stored into symbol slots as they complete.
class Tape {
 public:
  explicit Tape(const Vc& vc) {
    for (const auto& s : vc.inputs) slot(s);
    for (const auto& d : vc.definitions) {
      const Expr& lhs = d.arg(0);
      std::size_t rhs = emit(d.arg(1));
      nodes_.push_back({Kind::Store, Op::Const, lhs.sort(), {rhs}, Value(), slot(lhs)});
    }
    std::vector<Expr> parts = vc.assumptions;
    parts.push_back(mk_not(vc.property));
    result_ = emit(mk_and(parts));
  }

  struct Scratch {
    std::vector<Value> nodes;
    std::vector<Value> slots;
    std::vector<Value> args;
  };

  Scratch scratch() const { return {std::vector<Value>(nodes_.size()), std::vector<Value>(slot_count_), {}}; }

  bool run(Scratch& s, const std::vector<Value>& inputs) const {
    std::copy(inputs.begin(), inputs.end(), s.slots.begin());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      switch (n.kind) {
        case Kind::Constant: s.nodes[i] = n.value; break;
        case Kind::Load: s.nodes[i] = s.slots[n.slot]; break;
        case Kind::Store: s.slots[n.slot] = s.nodes[n.args[0]]; break;
        case Kind::Apply:
          s.args.clear();
          for (std::size_t a : n.args) s.args.push_back(s.nodes[a]);
          s.nodes[i] = apply_op(n.op, n.sort, s.args);
          break;
      }
    }
    return s.nodes[result_].b;
  }

 private:
  enum class Kind { Constant, Load, Store, Apply };
  struct Node {
    Kind kind;
    Op op;
    Sort sort;
    std::vector<std::size_t> args;
    Value value;
    std::size_t slot = 0;
  };

  std::size_t slot(const Expr& s) {
    auto [it, inserted] = slots_.emplace(key_of(s), slot_count_);
    if (inserted) ++slot_count_;
    return it->second;
  }

  std::size_t emit(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Node n{Kind::Apply, e.op(), e.sort(), {}, Value(), 0};
    if (e.is_const()) {
      n.kind = Kind::Constant;
      n.value = e.value();
    } else if (e.is_symbol()) {
      n.kind = Kind::Load;
      auto it = slots_.find(key_of(e));
      if (it == slots_.end()) throw Error(ErrorCode::Internal, "oracle: undefined symbol " + ssa_name(e));
      n.slot = it->second;
    } else if (e.op() == Op::Nondet) {
      throw Error(ErrorCode::Internal, "oracle: nondet value in a verification condition");
    } else {
      for (const auto& a : e.args()) n.args.push_back(emit(a));
    }
    nodes_.push_back(std::move(n));
    memo_.emplace(e.id(), nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  std::vector<Node> nodes_;
  std::map<Key, std::size_t> slots_;
  std::unordered_map<const void*, std::size_t> memo_;
  std::size_t slot_count_ = 0;
  std::size_t result_ = 0;
};

struct Bound {
  bool is_signed;
  bool upper;  // sym <= value (else sym >= value)
  cpp_int value;
};

cpp_int reading(const Value& v, bool is_signed) { return is_signed ? v.as_signed() : v.as_unsigned(); }

void split_conjuncts(const Expr& e, std::vector<Expr>& out) {
  if (e.op() == Op::And) {
    for (const auto& a : e.args()) split_conjuncts(a, out);
  } else {
    out.push_back(e);
  }
}

// Bounds a conjunct places on a single input, if it has the recognized shape.
void collect_bounds(const Expr& c, const std::map<Key, std::size_t>& index, std::vector<std::vector<Bound>>& bounds,
                    std::vector<std::optional<bool>>& fixed_bool) {
  Expr e = c;
  bool negated = false;
  if (e.op() == Op::Not) {
    negated = true;
    e = e.arg(0);
  }
  if (e.is_symbol() && e.sort().is_bool()) {
    if (auto it = index.find(key_of(e)); it != index.end()) fixed_bool[it->second] = !negated;
    return;
  }
  const Op op = e.op();
  const bool compare = op == Op::Slt || op == Op::Sle || op == Op::Ult || op == Op::Ule || op == Op::Eq;
  if (!compare || e.args().size() != 2 || !e.arg(0).sort().is_bv()) return;
  const Expr& a = e.arg(0);
  const Expr& b = e.arg(1);
  const bool sym_left = a.is_symbol() && b.is_const();
  const bool sym_right = b.is_symbol() && a.is_const();
  if (!sym_left && !sym_right) return;
  const Expr& sym = sym_left ? a : b;
  auto it = index.find(key_of(sym));
  if (it == index.end()) return;
  const Value& k = (sym_left ? b : a).value();
  auto& list = bounds[it->second];
  if (op == Op::Eq) {
    if (negated) return;
    list.push_back({true, true, k.as_signed()});
    list.push_back({true, false, k.as_signed()});
    return;
  }
  const bool is_signed = op == Op::Slt || op == Op::Sle;
  const bool strict = op == Op::Slt || op == Op::Ult;
  const cpp_int kv = reading(k, is_signed);
  // Normalize to sym <= x or sym >= x.
  // sym < k, sym <= k, k < sym, k <= sym and their negations.
  bool upper = sym_left;
  bool strict_now = strict;
  if (negated) {
    upper = !upper;
    strict_now = !strict;
  }
  cpp_int bound = kv;
  if (strict_now) bound += upper ? -1 : 1;
  list.push_back({is_signed, upper, bound});
}

}  // namespace

std::vector<InputDomain> oracle_domains(const Vc& vc) {
  std::map<Key, std::size_t> index;
  for (std::size_t i = 0; i < vc.inputs.size(); ++i) {
    if (vc.inputs[i].sort().is_fp()) {
      throw Error(ErrorCode::UnsupportedSortForOracle, "floating-point input " + ssa_name(vc.inputs[i]));
    }
    index.emplace(key_of(vc.inputs[i]), i);
  }
  std::vector<std::vector<Bound>> bounds(vc.inputs.size());
  std::vector<std::optional<bool>> fixed_bool(vc.inputs.size());
  // Assumptions arrive guarded by the ones before them (P => Q). When every
  // conjunct of P is already known to hold, Q holds as well.
  std::vector<Expr> known;
  auto holds = [&](const Expr& e) { return std::find(known.begin(), known.end(), e) != known.end(); };
  for (const auto& a : vc.assumptions) {
    std::vector<Expr> conjuncts;
    if (a.op() == Op::Implies) {
      std::vector<Expr> premise;
      split_conjuncts(a.arg(0), premise);
      if (!std::all_of(premise.begin(), premise.end(), holds)) continue;
      split_conjuncts(a.arg(1), conjuncts);
    } else {
      split_conjuncts(a, conjuncts);
    }
    for (const auto& c : conjuncts) {
      collect_bounds(c, index, bounds, fixed_bool);
      known.push_back(c);
    }
  }
  std::vector<InputDomain> out;
  cpp_int product = 1;
  for (std::size_t i = 0; i < vc.inputs.size(); ++i) {
    const Expr& s = vc.inputs[i];
    InputDomain d;
    d.symbol = s;
    if (s.sort().is_bool()) {
      d.lo = fixed_bool[i] ? cpp_int(*fixed_bool[i] ? 1 : 0) : cpp_int(0);
      d.hi = fixed_bool[i] ? d.lo : cpp_int(1);
    } else {
      const unsigned w = s.sort().width;
      d.is_signed = bounds[i].empty() ? true : bounds[i].front().is_signed;
      d.lo = d.is_signed ? -(cpp_int(1) << (w - 1)) : cpp_int(0);
      d.hi = d.is_signed ? (cpp_int(1) << (w - 1)) - 1 : (cpp_int(1) << w) - 1;
      // Bounds read with the other signedness are not used for narrowing.
      for (const auto& b : bounds[i]) {
        if (b.is_signed != d.is_signed) continue;
        if (b.upper) {
          d.hi = std::min(d.hi, b.value);
        } else {
          d.lo = std::max(d.lo, b.value);
        }
      }
    }
    product *= d.size();
    out.push_back(d);
  }
  if (product > kOracleDomainLimit) {
    throw Error(ErrorCode::DomainTooLarge, "oracle domain of " + product.str() + " input combinations exceeds 2^20");
  }
  return out;
}

namespace {

std::uint64_t domain_product(const std::vector<InputDomain>& domains) {
  cpp_int product = 1;
  for (const auto& d : domains) product *= d.size();
  return product.convert_to<std::uint64_t>();
}

void decode(std::uint64_t index, const std::vector<InputDomain>& domains, std::vector<Value>& out) {
  for (std::size_t i = domains.size(); i-- > 0;) {
    const auto& d = domains[i];
    const std::uint64_t size = d.size().convert_to<std::uint64_t>();
    const cpp_int v = d.lo + cpp_int(index % size);
    index /= size;
    out[i] = d.symbol.sort().is_bool() ? Value::boolean(v != 0) : Value::from_integer(d.symbol.sort().width, v);
  }
}

Verdict witness(const Vc& vc, const std::vector<InputDomain>& domains, std::uint64_t index) {
  Verdict v;
  v.status = SolverStatus::Sat;
  std::vector<Value> values(domains.size());
  decode(index, domains, values);
  for (std::size_t i = 0; i < domains.size(); ++i) v.model[ssa_name(vc.inputs[i])] = values[i];
  return v;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Verdict solve_oracle(const Vc& vc) {
  const auto start = std::chrono::steady_clock::now();
  const auto domains = oracle_domains(vc);
  const std::uint64_t n = domain_product(domains);
  Tape tape(vc);
  auto scratch = tape.scratch();
  std::vector<Value> values(domains.size());
  for (std::uint64_t i = 0; i < n; ++i) {
    decode(i, domains, values);
    if (tape.run(scratch, values)) {
      Verdict v = witness(vc, domains, i);
      v.seconds = seconds_since(start);
      return v;
    }
  }
  Verdict v;
  v.status = SolverStatus::Unsat;
  v.seconds = seconds_since(start);
  return v;
}

Verdict solve_oracle_parallel(const Vc& vc, int threads) {
  const auto start = std::chrono::steady_clock::now();
  const auto domains = oracle_domains(vc);
  const std::uint64_t n = domain_product(domains);
  const Tape tape(vc);
  std::atomic<std::uint64_t> best{n};
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(team)
  {
    auto scratch = tape.scratch();
    std::vector<Value> values(domains.size());
#pragma omp for schedule(dynamic, 256)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(n); ++k) {
      const auto i = static_cast<std::uint64_t>(k);
      // Indices past a known witness cannot be the first one.
      if (i >= best.load(std::memory_order_relaxed)) continue;
      decode(i, domains, values);
      if (!tape.run(scratch, values)) continue;
      std::uint64_t cur = best.load();
      while (i < cur && !best.compare_exchange_weak(cur, i)) {
      }
    }
  }
  Verdict v;
  if (best.load() < n) {
    v = witness(vc, domains, best.load());
  } else {
    v.status = SolverStatus::Unsat;
  }
  v.seconds = seconds_since(start);
  return v;
}

bool evaluate_query(const Vc& vc, const Model& inputs) {
  Tape tape(vc);
  auto scratch = tape.scratch();
  std::vector<Value> values;
  for (const auto& s : vc.inputs) {
    auto it = inputs.find(ssa_name(s));
    if (it == inputs.end()) throw Error(ErrorCode::IncompleteModel, "no value for input " + ssa_name(s));
    values.push_back(it->second);
  }
  return tape.run(scratch, values);
}

}  // namespace pybmc
