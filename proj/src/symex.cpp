#include "pybmc/symex.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

namespace pybmc {

namespace {

struct State {
  Expr guard;
  std::map<std::string, Expr> values;  // unversioned name -> current versioned symbol
};

class Executor {
 public:
  explicit Executor(const GotoProgram& gp) : fn_(gp.entry_function()) { trace_.types = gp.leaf_types; }

  SsaTrace run() {
    const auto& body = fn_.body;
    std::vector<std::vector<State>> pending(body.size() + 1);
    std::optional<State> current = State{Expr::boolean(true), {}};
    for (std::size_t i = 0; i < body.size(); ++i) {
      std::vector<State> incoming = std::move(pending[i]);
      if (current) incoming.push_back(std::move(*current));
      current.reset();
      if (incoming.empty()) continue;
      index_ = i;
      const Instruction& ins = body[i];
      loc_ = ins.loc;
      depth_ = ins.depth;
      current = incoming.size() == 1 ? std::move(incoming.front()) : merge(incoming);
      State& s = *current;
      switch (ins.kind) {
        case InstrKind::Decl:
          assign(s, ins.lhs, Expr::constant(zero_value(ins.lhs.sort())), true);
          break;
        case InstrKind::Assign:
          if (ins.expr.op() == Op::Nondet) {
            define_input(s, ins.lhs);
          } else {
            assign(s, ins.lhs, rename(s, ins.expr), false);
          }
          break;
        case InstrKind::Assume: {
          SsaStep step = make(StepKind::Assumption, s);
          step.cond = rename(s, ins.expr);
          step.text = ins.text;
          trace_.steps.push_back(step);
          s.guard = mk_and(s.guard, step.cond);
          if (s.guard.is_false()) current.reset();
          break;
        }
        case InstrKind::Assert: {
          SsaStep step = make(StepKind::Assertion, s);
          step.cond = rename(s, ins.expr);
          step.property = ins.property;
          step.text = ins.text;
          trace_.steps.push_back(std::move(step));
          break;
        }
        case InstrKind::Goto: {
          if (ins.target <= i) throw Error(ErrorCode::Internal, "symbolic execution needs a loop-free program", ins.loc);
          if (!ins.expr) {
            pending[ins.target].push_back(std::move(s));
            current.reset();
            break;
          }
          Expr c = rename(s, ins.expr);
          if (c.is_true()) {
            pending[ins.target].push_back(std::move(s));
            current.reset();
          } else if (!c.is_false()) {
            State taken{mk_and(s.guard, c), s.values};
            pending[ins.target].push_back(std::move(taken));
            s.guard = mk_and(s.guard, mk_not(c));
          }
          break;
        }
        case InstrKind::FunctionCall:
          throw Error(ErrorCode::Internal, "symbolic execution needs an inlined program", ins.loc);
        case InstrKind::Skip:
        case InstrKind::End:
          break;
      }
    }
    if (current || !pending[body.size()].empty()) {
      std::vector<State> last = std::move(pending[body.size()]);
      if (current) last.push_back(std::move(*current));
      if (last.size() > 1) merge(last);
    }
    for (const auto& [name, v] : versions_) trace_.final_versions[name] = v - 1;
    return std::move(trace_);
  }

 private:
  SsaStep make(StepKind kind, const State& s) const {
    SsaStep step;
    step.kind = kind;
    step.guard = s.guard;
    step.loc = loc_;
    step.goto_index = index_;
    step.depth = depth_;
    return step;
  }

  Expr fresh(const std::string& name, const Sort& sort) {
    int& v = versions_[name];
    return Expr::symbol(name, sort, v++);
  }

  Expr current_value(const State& s, const std::string& name, const Sort& sort) const {
    auto it = s.values.find(name);
    return it != s.values.end() ? it->second : Expr::constant(zero_value(sort));
  }

  Expr rename(const State& s, const Expr& e) {
    Expr out = substitute_symbols(e, [&](const Expr& leaf) -> std::optional<Expr> {
      if (leaf.op() == Op::Nondet) {
        Expr sym = fresh(std::string(kNondetSymbol) + std::to_string(anonymous_++), leaf.sort());
        SsaStep step = make(StepKind::Assignment, s);
        step.lhs = sym;
        step.input = true;
        step.hidden = true;
        trace_.steps.push_back(step);
        trace_.inputs.push_back(sym);
        return sym;
      }
      if (!leaf.is_symbol()) return std::nullopt;
      return current_value(s, leaf.name(), leaf.sort());
    });
    return simplify_expr(out);
  }

  void assign(State& s, const Expr& lhs, const Expr& rhs, bool decl) {
    SsaStep step = make(StepKind::Assignment, s);
    step.lhs = fresh(lhs.name(), lhs.sort());
    step.rhs = rhs;
    step.decl = decl;
    step.hidden = !is_user_variable(lhs.name());
    s.values[lhs.name()] = step.lhs;
    trace_.steps.push_back(std::move(step));
  }

  void define_input(State& s, const Expr& lhs) {
    SsaStep step = make(StepKind::Assignment, s);
    step.lhs = fresh(lhs.name(), lhs.sort());
    step.input = true;
    step.hidden = !is_user_variable(lhs.name());
    s.values[lhs.name()] = step.lhs;
    trace_.inputs.push_back(step.lhs);
    trace_.steps.push_back(std::move(step));
  }

  // Join of several paths: one guard, and a phi per variable whose value differs.
  State merge(std::vector<State>& states) {
    std::vector<Expr> guards;
    for (const auto& s : states) guards.push_back(s.guard);
    Expr guard = simplify_expr(mk_or(guards));
    if (!guard.is_const() && !guard.is_symbol()) {
      State any{Expr::boolean(true), {}};
      SsaStep step = make(StepKind::Assignment, any);
      step.lhs = fresh(kGuardSymbol, Sort::boolean());
      step.rhs = guard;
      step.hidden = true;
      trace_.steps.push_back(step);
      guard = step.lhs;
    }
    std::set<std::string> names;
    std::map<std::string, Sort> sorts;
    for (const auto& s : states) {
      for (const auto& [name, v] : s.values) {
        names.insert(name);
        sorts.emplace(name, v.sort());
      }
    }
    State out{guard, {}};
    for (const auto& name : names) {
      const Sort& sort = sorts.at(name);
      std::vector<Expr> vals;
      for (const auto& s : states) vals.push_back(current_value(s, name, sort));
      if (std::all_of(vals.begin(), vals.end(), [&](const Expr& v) { return v == vals.front(); })) {
        out.values[name] = vals.front();
        continue;
      }
      Expr acc = vals.back();
      for (std::size_t j = vals.size() - 1; j-- > 0;) {
        if (vals[j] != acc) acc = mk_ite(states[j].guard, vals[j], acc);
      }
      SsaStep step = make(StepKind::Phi, out);
      step.lhs = fresh(name, sort);
      step.rhs = acc;
      step.hidden = true;
      out.values[name] = step.lhs;
      trace_.steps.push_back(std::move(step));
    }
    return out;
  }

  const GotoFunction& fn_;
  SsaTrace trace_;
  std::unordered_map<std::string, int> versions_;
  std::size_t anonymous_ = 0;
  std::size_t index_ = 0;
  SourceLocation loc_;
  int depth_ = 0;
};

std::string versioned(const Expr& e) { return e ? e.to_string() : "_"; }

}  // namespace

SsaTrace execute(const GotoProgram& unwound) {
  if (!unwound.unwound) throw Error(ErrorCode::Internal, "symbolic execution runs on unwound programs");
  return Executor(unwound).run();
}

SsaTrace simplify(const SsaTrace& trace) {
  SsaTrace out;
  out.final_versions = trace.final_versions;
  out.inputs = trace.inputs;
  out.types = trace.types;
  std::unordered_map<Expr, Expr, ExprHash> constants;
  auto fold = [&](const Expr& e) -> Expr {
    if (!e) return e;
    Expr s = substitute_symbols(e, [&](const Expr& leaf) -> std::optional<Expr> {
      auto it = constants.find(leaf);
      if (it == constants.end()) return std::nullopt;
      return it->second;
    });
    return simplify_expr(s);
  };
  for (const auto& src : trace.steps) {
    SsaStep step = src;
    step.guard = fold(step.guard);
    step.rhs = fold(step.rhs);
    step.cond = fold(step.cond);
    if ((step.kind == StepKind::Assignment || step.kind == StepKind::Phi) && step.rhs && step.rhs.is_const()) {
      constants.emplace(step.lhs, step.rhs);
    }
    const bool definition = step.kind == StepKind::Assignment || step.kind == StepKind::Phi;
    // Definitions stay so every referenced symbol keeps its equation.
    if (step.guard.is_false() && !definition) continue;
    out.steps.push_back(std::move(step));
  }
  return out;
}

std::string render_ssa(const SsaTrace& trace) {
  std::ostringstream os;
  for (const auto& step : trace.steps) {
    os << step.guard.to_string() << " ⊢ ";
    switch (step.kind) {
      case StepKind::Assignment:
        os << versioned(step.lhs) << " := " << (step.input ? std::string("nondet") : step.rhs.to_string());
        break;
      case StepKind::Phi: os << versioned(step.lhs) << " := φ " << step.rhs.to_string(); break;
      case StepKind::Assumption: os << "ASSUME " << step.cond.to_string(); break;
      case StepKind::Assertion:
        os << "ASSERT " << step.cond.to_string() << " [" << property_class_name(step.property) << ']';
        break;
    }
    if (step.loc.valid()) os << "  // " << step.loc.file << ':' << step.loc.line;
    os << '\n';
  }
  return os.str();
}

bool is_single_assignment(const SsaTrace& trace) {
  std::set<std::pair<std::string, int>> seen;
  for (const auto& step : trace.steps) {
    if (step.kind != StepKind::Assignment && step.kind != StepKind::Phi) continue;
    if (!seen.insert({step.lhs.name(), step.lhs.version()}).second) return false;
  }
  return true;
}

}  // namespace pybmc
