#include "pybmc/goto.hpp"

#include <algorithm>
#include <sstream>

namespace pybmc {

std::string_view instr_kind_name(InstrKind kind) {
  switch (kind) {
    case InstrKind::Decl: return "DECL";
    case InstrKind::Assign: return "ASSIGN";
    case InstrKind::Assume: return "ASSUME";
    case InstrKind::Assert: return "ASSERT";
    case InstrKind::Goto: return "GOTO";
    case InstrKind::Skip: return "SKIP";
    case InstrKind::FunctionCall: return "FUNCTION_CALL";
    case InstrKind::End: return "END_FUNCTION";
  }
  return "?";
}

std::string_view property_class_name(PropertyClass cls) {
  switch (cls) {
    case PropertyClass::UserAssertion: return "user-assertion";
    case PropertyClass::DivisionByZero: return "division-by-zero";
    case PropertyClass::Overflow: return "overflow";
    case PropertyClass::Bounds: return "bounds";
    case PropertyClass::Unwinding: return "unwinding";
  }
  return "?";
}

std::string_view property_class_words(PropertyClass cls) {
  switch (cls) {
    case PropertyClass::UserAssertion: return "assertion";
    case PropertyClass::DivisionByZero: return "division by zero";
    case PropertyClass::Overflow: return "arithmetic overflow";
    case PropertyClass::Bounds: return "array bounds violated";
    case PropertyClass::Unwinding: return "unwinding assertion";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Instrumentation

GotoProgram instrument_properties(const GotoProgram& gp, const CheckOptions& options) {
  GotoProgram out = gp;
  for (auto& [name, fn] : out.functions) {
    std::vector<Instruction> body;
    std::vector<std::size_t> start(fn.body.size() + 1);
    for (std::size_t i = 0; i < fn.body.size(); ++i) {
      start[i] = body.size();
      Instruction ins = fn.body[i];
      for (const Check& c : ins.checks) {
        if (c.cls == PropertyClass::Overflow && !options.overflow) continue;
        Instruction a;
        a.kind = InstrKind::Assert;
        a.expr = c.condition;
        a.property = c.cls;
        a.text = c.text;
        a.loc = c.loc.valid() ? c.loc : ins.loc;
        a.depth = ins.depth;
        a.function = ins.function;
        body.push_back(std::move(a));
      }
      ins.checks.clear();
      body.push_back(std::move(ins));
    }
    start[fn.body.size()] = body.size();
    for (auto& ins : body) {
      if (ins.kind == InstrKind::Goto) ins.target = start.at(ins.target);
    }
    fn.body = std::move(body);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unwinding

namespace {

std::optional<std::pair<std::size_t, std::size_t>> innermost_back_edge(const std::vector<Instruction>& body) {
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i].kind == InstrKind::Goto && body[i].target <= i) return std::make_pair(body[i].target, i);
  }
  return std::nullopt;
}

std::vector<Instruction> unroll_loop(const std::vector<Instruction>& body, std::size_t h, std::size_t l, unsigned k,
                                     bool unwinding_assertions) {
  const Instruction& latch = body[l];
  if (latch.expr) throw Error(ErrorCode::Internal, "conditional loop latch", latch.loc);
  std::size_t e = l;
  for (std::size_t i = h; i < l; ++i) {
    if (body[i].kind == InstrKind::Goto && body[i].loop_exit && body[i].target == l + 1) {
      e = i;
      break;
    }
  }
  if (e == l) throw Error(ErrorCode::Internal, "loop without exit test", latch.loc);

  const std::size_t len = l - h;
  const std::size_t copies_start = h;
  const std::size_t residual_start = copies_start + len * k;
  const std::size_t residual_len = (e - h) + (unwinding_assertions ? 1 : 0) + 1;
  const std::size_t suffix_start = residual_start + residual_len;
  const std::size_t entry = k > 0 ? copies_start : residual_start;

  enum class Region { Outside, Copy, Residual };
  auto map = [&](std::size_t t, Region region, unsigned copy) -> std::size_t {
    if (t < h) return t;
    if (t > l) return suffix_start + (t - l - 1);
    if (region == Region::Copy) {
      if (t == l) return copy + 1 < k ? copies_start + (copy + 1) * len : residual_start;
      return copies_start + copy * len + (t - h);
    }
    if (region == Region::Residual && t <= e) return residual_start + (t - h);
    if (t == h || t == l) return entry;
    return k > 0 ? copies_start + (t - h) : residual_start;
  };

  std::vector<Instruction> out;
  out.reserve(suffix_start + body.size() - l - 1);
  for (std::size_t i = 0; i < h; ++i) {
    Instruction ins = body[i];
    if (ins.kind == InstrKind::Goto) ins.target = map(ins.target, Region::Outside, 0);
    out.push_back(std::move(ins));
  }
  for (unsigned c = 0; c < k; ++c) {
    for (std::size_t i = h; i < l; ++i) {
      Instruction ins = body[i];
      if (ins.kind == InstrKind::Goto) {
        ins.target = map(ins.target, Region::Copy, c);
        ins.loop_exit = false;
      }
      out.push_back(std::move(ins));
    }
  }
  for (std::size_t i = h; i < e; ++i) {
    Instruction ins = body[i];
    if (ins.kind == InstrKind::Goto) {
      ins.target = map(ins.target, Region::Residual, 0);
      ins.loop_exit = false;
    }
    out.push_back(std::move(ins));
  }
  // One more iteration would start here unless the exit test holds.
  const Instruction& exit = body[e];
  Expr exited = exit.expr ? exit.expr : Expr::boolean(true);
  if (unwinding_assertions) {
    Instruction a;
    a.kind = InstrKind::Assert;
    a.expr = exited;
    a.property = PropertyClass::Unwinding;
    a.text = "loop at line " + std::to_string(latch.loc.line) + " unwound " + std::to_string(k) + " times";
    a.loc = latch.loc;
    a.function = exit.function;
    a.depth = exit.depth;
    out.push_back(std::move(a));
  }
  Instruction assume;
  assume.kind = InstrKind::Assume;
  assume.expr = exited;
  assume.loc = latch.loc;
  assume.function = exit.function;
  assume.depth = exit.depth;
  out.push_back(std::move(assume));
  for (std::size_t i = l + 1; i < body.size(); ++i) {
    Instruction ins = body[i];
    if (ins.kind == InstrKind::Goto) ins.target = map(ins.target, Region::Outside, 0);
    out.push_back(std::move(ins));
  }
  return out;
}

std::vector<Instruction> unwind_loops(std::vector<Instruction> body, unsigned k, bool unwinding_assertions) {
  while (auto edge = innermost_back_edge(body)) {
    body = unroll_loop(body, edge->first, edge->second, k, unwinding_assertions);
  }
  return body;
}

// Renames the symbols of one activation of a recursive function.
class FrameRenamer {
 public:
  FrameRenamer(const std::string& function, std::size_t activation, std::map<std::string, VerifierType>& types)
      : prefix_(function + "@"),
        replacement_(activation > 0 ? function + "$" + std::to_string(activation + 1) + "@" : prefix_),
        types_(types) {}

  Expr operator()(const Expr& e) const {
    if (!e || prefix_ == replacement_) return e;
    return substitute_symbols(e, [&](const Expr& s) -> std::optional<Expr> {
      if (!s.is_symbol() || s.name().compare(0, prefix_.size(), prefix_) != 0) return std::nullopt;
      std::string renamed = replacement_ + s.name().substr(prefix_.size());
      if (auto it = types_.find(s.name()); it != types_.end()) types_.emplace(renamed, it->second);
      return Expr::symbol(renamed, s.sort(), s.version());
    });
  }

  std::vector<Expr> operator()(const std::vector<Expr>& v) const {
    std::vector<Expr> out;
    for (const auto& e : v) out.push_back((*this)(e));
    return out;
  }

 private:
  std::string prefix_;
  std::string replacement_;
  std::map<std::string, VerifierType>& types_;
};

class Inliner {
 public:
  Inliner(const GotoProgram& gp, unsigned k, bool unwinding_assertions, std::map<std::string, VerifierType>& types)
      : gp_(gp), k_(k), unwinding_assertions_(unwinding_assertions), types_(types) {
    for (const auto& [name, fn] : gp.functions) loops_unwound_[name] = unwind_loops(fn.body, k, unwinding_assertions);
  }

  std::vector<Instruction> run() {
    std::vector<Instruction> out;
    expand(gp_.entry, 0, out, true);
    return out;
  }

 private:
  // The isolated function runs at the level of the synthesized entry that
  // calls it.
  static bool transparent(const std::string& caller, const std::string& callee) {
    return short_name(caller) == kEntryFunction && short_name(callee) != kInitFunction;
  }

  void expand(const std::string& function, int depth, std::vector<Instruction>& out, bool is_entry) {
    const std::vector<Instruction>& body = loops_unwound_.at(function);
    const std::size_t activation = static_cast<std::size_t>(std::count(stack_.begin(), stack_.end(), function));
    FrameRenamer rename(function, activation, types_);
    stack_.push_back(function);
    const std::size_t base = out.size();
    std::vector<std::size_t> start(body.size() + 1);
    std::vector<std::size_t> jumps;
    for (std::size_t i = 0; i < body.size(); ++i) {
      start[i] = out.size();
      const Instruction& src = body[i];
      if (src.kind == InstrKind::FunctionCall) {
        call(*src.call, src, rename, depth, out);
        continue;
      }
      Instruction ins = src;
      ins.depth = depth;
      ins.lhs = rename(ins.lhs);
      ins.expr = rename(ins.expr);
      if (ins.kind == InstrKind::End && !is_entry) ins.kind = InstrKind::Skip;
      if (ins.kind == InstrKind::Goto) jumps.push_back(out.size());
      out.push_back(std::move(ins));
    }
    start[body.size()] = out.size();
    for (std::size_t j : jumps) out[j].target = start.at(out[j].target);
    (void)base;
    stack_.pop_back();
  }

  void call(const CallSite& site, const Instruction& at, const FrameRenamer& rename, int depth,
            std::vector<Instruction>& out) {
    const std::string& callee = site.callee;
    const GotoFunction& fn = gp_.functions.at(callee);
    const auto active = static_cast<unsigned>(std::count(stack_.begin(), stack_.end(), callee));
    auto make = [&](InstrKind kind) {
      Instruction ins;
      ins.kind = kind;
      ins.loc = at.loc;
      ins.depth = depth;
      ins.function = at.function;
      return ins;
    };
    if (active > 0 && active >= k_) {
      // Recursion deeper than the bound.
      if (unwinding_assertions_) {
        Instruction a = make(InstrKind::Assert);
        a.expr = Expr::boolean(false);
        a.property = PropertyClass::Unwinding;
        a.text = "recursion of " + short_name(callee) + " unwound " + std::to_string(k_) + " times";
        out.push_back(std::move(a));
      }
      Instruction assume = make(InstrKind::Assume);
      assume.expr = Expr::boolean(false);
      out.push_back(std::move(assume));
      return;
    }
    FrameRenamer callee_names(callee, active, types_);
    const int inner = transparent(at.function, callee) ? depth : depth + 1;
    const std::vector<Expr> params = callee_names(fn.params);
    const std::vector<Expr> args = rename(site.args);
    for (std::size_t i = 0; i < params.size() && i < args.size(); ++i) {
      Instruction bind = make(InstrKind::Assign);
      bind.lhs = params[i];
      bind.expr = args[i];
      bind.depth = inner;
      bind.function = callee;
      out.push_back(std::move(bind));
    }
    expand(callee, inner, out, false);
    const std::vector<Expr> returns = callee_names(fn.returns);
    const std::vector<Expr> results = rename(site.results);
    for (std::size_t i = 0; i < results.size() && i < returns.size(); ++i) {
      Instruction r = make(InstrKind::Assign);
      r.lhs = results[i];
      r.expr = returns[i];
      out.push_back(std::move(r));
    }
    const std::vector<Expr> outs = rename(site.outs);
    for (std::size_t i = 0; i < outs.size() && i < params.size(); ++i) {
      if (!outs[i]) continue;
      Instruction w = make(InstrKind::Assign);
      w.lhs = outs[i];
      w.expr = params[i];
      out.push_back(std::move(w));
    }
  }

  const GotoProgram& gp_;
  unsigned k_;
  bool unwinding_assertions_;
  std::map<std::string, VerifierType>& types_;
  std::map<std::string, std::vector<Instruction>> loops_unwound_;
  std::vector<std::string> stack_;
};

}  // namespace

GotoProgram unwind(const GotoProgram& gp, unsigned k, bool unwinding_assertions) {
  GotoProgram out;
  out.entry = gp.entry;
  out.leaf_types = gp.leaf_types;
  out.unwound = k;
  Inliner inliner(gp, k, unwinding_assertions, out.leaf_types);
  GotoFunction flat;
  flat.name = gp.entry;
  flat.body = inliner.run();
  out.functions[gp.entry] = std::move(flat);
  out.order = {gp.entry};
  return out;
}

// ---------------------------------------------------------------------------
// Listing

namespace {

std::string join(const std::vector<Expr>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += v[i] ? v[i].to_string() : "_";
  }
  return out;
}

}  // namespace

std::string render_goto(const GotoProgram& gp) {
  std::ostringstream os;
  for (const auto& name : gp.order) {
    const GotoFunction& fn = gp.functions.at(name);
    os << name << " /* " << (gp.unwound ? "unwound " + std::to_string(*gp.unwound) : std::string("lowered"))
       << " */\n";
    for (std::size_t i = 0; i < fn.body.size(); ++i) {
      const Instruction& ins = fn.body[i];
      std::ostringstream line;
      line << "  " << i << ": " << instr_kind_name(ins.kind);
      switch (ins.kind) {
        case InstrKind::Decl: line << ' ' << ins.lhs.to_string(); break;
        case InstrKind::Assign: line << ' ' << ins.lhs.to_string() << " := " << ins.expr.to_string(); break;
        case InstrKind::Assume: line << ' ' << ins.expr.to_string(); break;
        case InstrKind::Assert:
          line << ' ' << ins.expr.to_string() << " [" << property_class_name(ins.property) << "] \"" << ins.text
               << '"';
          break;
        case InstrKind::Goto:
          line << ' ' << ins.target;
          if (ins.expr) line << " IF " << ins.expr.to_string();
          break;
        case InstrKind::FunctionCall:
          line << ' ';
          if (!ins.call->results.empty()) line << '(' << join(ins.call->results) << ") := ";
          line << ins.call->callee << '(' << join(ins.call->args) << ')';
          if (std::any_of(ins.call->outs.begin(), ins.call->outs.end(), [](const Expr& e) { return bool(e); })) {
            line << " out(" << join(ins.call->outs) << ')';
          }
          break;
        default: break;
      }
      if (ins.loc.valid()) line << "  // " << ins.loc.file << ':' << ins.loc.line;
      os << line.str() << '\n';
      for (const Check& c : ins.checks) {
        os << "       check [" << property_class_name(c.cls) << "] " << c.condition.to_string() << '\n';
      }
    }
    os << '\n';
  }
  return os.str();
}

bool has_back_edge(const GotoFunction& fn) {
  for (std::size_t i = 0; i < fn.body.size(); ++i) {
    if (fn.body[i].kind == InstrKind::Goto && fn.body[i].target <= i) return true;
  }
  return false;
}

bool is_acyclic(const GotoFunction& fn) {
  const std::size_t n = fn.body.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Instruction& ins = fn.body[i];
    if (ins.kind == InstrKind::End) continue;
    const bool falls_through = !(ins.kind == InstrKind::Goto && (!ins.expr || ins.expr.is_true()));
    if (falls_through && i + 1 < n) succ[i].push_back(i + 1);
    if (ins.kind == InstrKind::Goto && ins.target < n) succ[i].push_back(ins.target);
  }
  for (const auto& s : succ) {
    for (std::size_t t : s) ++indegree[t];
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::size_t i = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t t : succ[i]) {
      if (--indegree[t] == 0) ready.push_back(t);
    }
  }
  return seen == n;
}

std::size_t count_assertions(const GotoProgram& gp, PropertyClass cls) {
  std::size_t n = 0;
  for (const auto& [name, fn] : gp.functions) {
    for (const auto& ins : fn.body) {
      if (ins.kind == InstrKind::Assert && ins.property == cls) ++n;
    }
  }
  return n;
}

std::string display_name(const std::string& symbol) {
  auto at = symbol.rfind('@');
  return at == std::string::npos ? symbol : symbol.substr(at + 1);
}

bool is_user_variable(const std::string& symbol) { return display_name(symbol).find('$') == std::string::npos; }

// ---------------------------------------------------------------------------
// Concrete interpreter

namespace {

class Interpreter {
 public:
  Interpreter(const GotoProgram& gp, const InputSource& input, std::size_t limit)
      : gp_(gp), input_(input), limit_(limit) {}

  ConcreteRun run() {
    try {
      execute(gp_.entry, 0);
    } catch (const Stop&) {
    }
    return std::move(result_);
  }

 private:
  struct Stop {};

  Value value_of(const Expr& sym) const {
    auto it = result_.state.find(sym.name());
    return it != result_.state.end() ? it->second : zero_value(sym.sort());
  }

  Value eval(const Expr& e) {
    Expr closed = e;
    if (contains_op(e, Op::Nondet)) {
      closed = substitute_symbols(e, [&](const Expr& leaf) -> std::optional<Expr> {
        if (leaf.op() != Op::Nondet) return std::nullopt;
        return Expr::constant(input_(leaf.sort(), inputs_++));
      });
    }
    return evaluate(closed, [&](const Expr& s) { return value_of(s); });
  }

  void step() {
    if (++result_.steps > limit_) {
      result_.status = ConcreteRun::Status::StepLimit;
      throw Stop{};
    }
  }

  void execute(const std::string& function, std::size_t depth) {
    if (depth > 4000) {
      result_.status = ConcreteRun::Status::StepLimit;
      throw Stop{};
    }
    const GotoFunction& fn = gp_.functions.at(function);
    std::size_t pc = 0;
    while (pc < fn.body.size()) {
      step();
      const Instruction& ins = fn.body[pc];
      ++result_.visits[{function, pc}];
      switch (ins.kind) {
        case InstrKind::Decl:
          result_.state[ins.lhs.name()] = zero_value(ins.lhs.sort());
          break;
        case InstrKind::Assign:
          result_.state[ins.lhs.name()] = eval(ins.expr);
          break;
        case InstrKind::Assume:
          if (!eval(ins.expr).b) {
            result_.status = ConcreteRun::Status::AssumptionFailed;
            result_.failed = &ins;
            throw Stop{};
          }
          break;
        case InstrKind::Assert:
          if (!eval(ins.expr).b) {
            result_.status = ConcreteRun::Status::AssertionFailed;
            result_.failed = &ins;
            throw Stop{};
          }
          break;
        case InstrKind::Goto:
          if (!ins.expr || eval(ins.expr).b) {
            pc = ins.target;
            continue;
          }
          break;
        case InstrKind::FunctionCall:
          call(*ins.call, depth);
          break;
        case InstrKind::End:
          return;
        case InstrKind::Skip:
          break;
      }
      ++pc;
    }
  }

  void call(const CallSite& site, std::size_t depth) {
    const GotoFunction& callee = gp_.functions.at(site.callee);
    std::vector<Value> args;
    for (const auto& a : site.args) args.push_back(eval(a));
    // The callee's own symbols belong to this activation only.
    const std::string prefix = site.callee + "@";
    std::map<std::string, Value> saved;
    for (auto it = result_.state.lower_bound(prefix); it != result_.state.end() && it->first.compare(0, prefix.size(), prefix) == 0;) {
      saved.insert(*it);
      it = result_.state.erase(it);
    }
    for (std::size_t i = 0; i < callee.params.size() && i < args.size(); ++i) {
      result_.state[callee.params[i].name()] = args[i];
    }
    execute(site.callee, depth + 1);
    std::vector<Value> returns;
    for (const auto& r : callee.returns) returns.push_back(value_of(r));
    std::vector<Value> params;
    for (const auto& p : callee.params) params.push_back(value_of(p));
    for (auto it = result_.state.lower_bound(prefix); it != result_.state.end() && it->first.compare(0, prefix.size(), prefix) == 0;) {
      it = result_.state.erase(it);
    }
    for (auto& kv : saved) result_.state.insert(kv);
    for (std::size_t i = 0; i < site.results.size() && i < returns.size(); ++i) {
      result_.state[site.results[i].name()] = returns[i];
    }
    for (std::size_t i = 0; i < site.outs.size() && i < params.size(); ++i) {
      if (site.outs[i]) result_.state[site.outs[i].name()] = params[i];
    }
  }

  const GotoProgram& gp_;
  const InputSource& input_;
  std::size_t limit_;
  std::size_t inputs_ = 0;
  ConcreteRun result_;
};

}  // namespace

ConcreteRun run_concrete(const GotoProgram& gp, const InputSource& input, std::size_t step_limit) {
  return Interpreter(gp, input, step_limit).run();
}

}  // namespace pybmc
