#include "interpreter.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

using pybmc::ast::AstNode;
using pybmc::ast::NodeKind;
using pybmc::ast::Scalar;

PyValue PyValue::integer(cpp_int v, IntType t, bool literal) {
  PyValue p;
  p.kind = Kind::Int;
  p.i = std::move(v);
  p.type = t;
  p.literal = literal;
  return p;
}

PyValue PyValue::boolean(bool v) {
  PyValue p;
  p.kind = Kind::Bool;
  p.b = v;
  return p;
}

PyValue PyValue::real(double v) {
  PyValue p;
  p.kind = Kind::Float;
  p.f = v;
  return p;
}

bool PyValue::truthy() const {
  switch (kind) {
    case Kind::Int: return i != 0;
    case Kind::Bool: return b;
    case Kind::Float: return f != 0.0;
    case Kind::None: return false;
  }
  return false;
}

std::optional<IntType> int_type_named(const std::string& name) {
  if (name == "int") return IntType{32, true};
  for (unsigned w : {32u, 64u, 128u, 256u}) {
    if (name == "int" + std::to_string(w)) return IntType{w, true};
    if (name == "uint" + std::to_string(w)) return IntType{w, false};
  }
  return std::nullopt;
}

Inputs from_list(std::vector<PyValue> values) {
  auto shared = std::make_shared<std::vector<PyValue>>(std::move(values));
  return [shared](const std::string& kind, std::size_t ordinal) {
    if (ordinal >= shared->size()) throw std::runtime_error("interpreter ran out of inputs for nondet_" + kind);
    return (*shared)[ordinal];
  };
}

namespace {

cpp_int reduce(const cpp_int& v, IntType t) {
  const cpp_int modulus = cpp_int(1) << t.width;
  cpp_int m = v % modulus;
  if (m < 0) m += modulus;
  if (t.is_signed && m >= (modulus >> 1)) m -= modulus;
  return m;
}

cpp_int floor_div(const cpp_int& a, const cpp_int& b) {
  cpp_int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

struct Halt {
  Outcome outcome;
};
struct ReturnSignal {
  PyValue value;
};
struct BreakSignal {};
struct ContinueSignal {};

struct Slot {
  PyValue value;
  std::optional<IntType> int_type;
  bool is_bool = false;
  bool is_float = false;
};

using Frame = std::map<std::string, Slot>;

bool contains_call(const AstNode& n) {
  if (n.is(NodeKind::Call)) return true;
  for (const auto& [field, child] : n.children) {
    for (const auto& k : child.nodes) {
      if (contains_call(k)) return true;
    }
  }
  return false;
}

class Interpreter {
 public:
  Interpreter(const AstNode& module, const Inputs& inputs, std::size_t limit)
      : module_(module), inputs_(inputs), limit_(limit) {
    for (const auto& s : module.list("body")) {
      if (s.is(NodeKind::FunctionDef)) functions_[s.str("name")] = &s;
    }
  }

  Outcome run_module() {
    try {
      frames_.push_back({});
      exec_block(module_.list("body"));
    } catch (const Halt& h) {
      return h.outcome;
    }
    return {};
  }

  Outcome run_function(const std::string& name, const std::vector<PyValue>& args, PyValue* result) {
    try {
      frames_.push_back({});
      // Only the declarations a called function can depend on: classes and
      // call-free global initializers. Top-level code with side effects,
      // nondet inputs and assertions stays out of a direct call.
      for (const auto& s : module_.list("body")) {
        const bool global = (s.is(NodeKind::AnnAssign) || s.is(NodeKind::Assign)) && !contains_call(s);
        if (s.is(NodeKind::ClassDef) || global) exec(s);
      }
      PyValue r = invoke(name, args, {});
      if (result) *result = r;
    } catch (const Halt& h) {
      return h.outcome;
    }
    return {};
  }

 private:
  [[noreturn]] void halt(Outcome::Status status, const AstNode& at, std::string text = "") {
    Outcome o;
    o.status = status;
    o.line = at.loc.line;
    o.text = std::move(text);
    throw Halt{o};
  }

  void tick(const AstNode& at) {
    if (++steps_ > limit_) halt(Outcome::Status::StepLimit, at);
  }

  // --- storage ---------------------------------------------------------------

  Slot* find(const std::string& name) {
    auto& local = frames_.back();
    if (auto it = local.find(name); it != local.end()) return &it->second;
    auto& global = frames_.front();
    if (auto it = global.find(name); it != global.end()) return &it->second;
    return nullptr;
  }

  static PyValue convert_for(const Slot& slot, PyValue v) {
    if (slot.int_type) {
      if (v.kind == PyValue::Kind::Bool) return PyValue::integer(v.b ? 1 : 0, *slot.int_type);
      if (v.kind == PyValue::Kind::Float) return PyValue::integer(cpp_int(std::trunc(v.f)), *slot.int_type);
      return PyValue::integer(reduce(v.i, *slot.int_type), *slot.int_type);
    }
    if (slot.is_bool) return PyValue::boolean(v.truthy());
    if (slot.is_float) {
      if (v.kind == PyValue::Kind::Int) return PyValue::real(v.i.convert_to<double>());
      if (v.kind == PyValue::Kind::Bool) return PyValue::real(v.b ? 1.0 : 0.0);
    }
    return v;
  }

  static Slot slot_for_annotation(const AstNode* annotation) {
    Slot s;
    if (!annotation || !annotation->is(NodeKind::Name)) return s;
    const std::string id = annotation->str("id");
    if (auto t = int_type_named(id)) s.int_type = t;
    s.is_bool = id == "bool";
    s.is_float = id == "float";
    return s;
  }

  static Slot slot_for_value(const PyValue& v) {
    Slot s;
    if (v.kind == PyValue::Kind::Int) s.int_type = v.type;
    s.is_bool = v.kind == PyValue::Kind::Bool;
    s.is_float = v.kind == PyValue::Kind::Float;
    return s;
  }

  void store(const std::string& name, const PyValue& v, const AstNode* annotation) {
    Slot* existing = find(name);
    if (annotation || !existing) {
      Slot s = annotation ? slot_for_annotation(annotation) : slot_for_value(v);
      s.value = convert_for(s, v);
      frames_.back()[name] = s;
      return;
    }
    existing->value = convert_for(*existing, v);
  }

  // --- statements ------------------------------------------------------------

  void exec_block(const std::vector<AstNode>& body) {
    for (const auto& s : body) exec(s);
  }

  void exec(const AstNode& s) {
    tick(s);
    switch (s.kind) {
      case NodeKind::FunctionDef:
      case NodeKind::ClassDef:
      case NodeKind::Import:
      case NodeKind::ImportFrom:
      case NodeKind::Pass:
        return;
      case NodeKind::AnnAssign: {
        const AstNode* value = s.child("value");
        if (!value) return;
        store(s.child("target")->str("id"), eval(*value), s.child("annotation"));
        return;
      }
      case NodeKind::Assign: {
        PyValue v = eval(*s.child("value"));
        store(s.list("targets").at(0).str("id"), v, nullptr);
        return;
      }
      case NodeKind::AugAssign: {
        const std::string name = s.child("target")->str("id");
        Slot* slot = find(name);
        if (!slot) throw std::runtime_error("augmented assignment to unknown " + name);
        PyValue r = binary(s.child("op")->type_name, slot->value, eval(*s.child("value")), s);
        slot->value = convert_for(*slot, r);
        return;
      }
      case NodeKind::Expr:
        eval(*s.child("value"));
        return;
      case NodeKind::If:
        if (eval(*s.child("test")).truthy()) {
          exec_block(s.list("body"));
        } else {
          exec_block(s.list("orelse"));
        }
        return;
      case NodeKind::While:
        while (eval(*s.child("test")).truthy()) {
          tick(s);
          try {
            exec_block(s.list("body"));
          } catch (const BreakSignal&) {
            return;
          } catch (const ContinueSignal&) {
          }
        }
        exec_block(s.list("orelse"));
        return;
      case NodeKind::For: {
        const AstNode& iter = *s.child("iter");
        if (!iter.is(NodeKind::Call) || iter.child("func")->str("id") != "range") {
          throw std::runtime_error("interpreter only iterates over range()");
        }
        std::vector<cpp_int> bounds;
        PyValue first;
        for (const auto& a : iter.list("args")) {
          PyValue v = eval(a);
          if (first.kind == PyValue::Kind::None) first = v;
          bounds.push_back(v.i);
        }
        cpp_int lo = bounds.size() >= 2 ? bounds[0] : cpp_int(0);
        cpp_int hi = bounds.size() >= 2 ? bounds[1] : bounds.at(0);
        cpp_int step = bounds.size() == 3 ? bounds[2] : cpp_int(1);
        const std::string var = s.child("target")->str("id");
        IntType t = first.literal ? IntType{} : first.type;
        for (cpp_int i = lo; step > 0 ? i < hi : i > hi; i += step) {
          tick(s);
          store(var, PyValue::integer(i, t), nullptr);
          try {
            exec_block(s.list("body"));
          } catch (const BreakSignal&) {
            return;
          } catch (const ContinueSignal&) {
          }
        }
        exec_block(s.list("orelse"));
        return;
      }
      case NodeKind::Break:
        throw BreakSignal{};
      case NodeKind::Continue:
        throw ContinueSignal{};
      case NodeKind::Return: {
        const AstNode* v = s.child("value");
        throw ReturnSignal{v ? eval(*v) : PyValue::none()};
      }
      case NodeKind::Assert:
        if (!eval(*s.child("test")).truthy()) {
          halt(Outcome::Status::AssertionFailed, s, pybmc::ast::unparse(*s.child("test")));
        }
        return;
      default:
        throw std::runtime_error("interpreter does not support " + std::string(pybmc::ast::node_kind_name(s.kind)));
    }
  }

  // --- expressions -----------------------------------------------------------

  PyValue eval(const AstNode& e) {
    switch (e.kind) {
      case NodeKind::Constant: {
        const Scalar* v = e.scalar("value");
        if (!v) return PyValue::none();
        switch (v->kind) {
          case Scalar::Kind::Bool: return PyValue::boolean(v->boolean);
          case Scalar::Kind::Int: return PyValue::integer(cpp_int(v->text), IntType{}, true);
          case Scalar::Kind::Float: return PyValue::real(v->real);
          default: return PyValue::none();
        }
      }
      case NodeKind::Name: {
        const std::string id = e.str("id");
        if (id == "True") return PyValue::boolean(true);
        if (id == "False") return PyValue::boolean(false);
        Slot* s = find(id);
        if (!s) throw std::runtime_error("interpreter: unknown name " + id);
        return s->value;
      }
      case NodeKind::BinOp:
        return binary(e.child("op")->type_name, eval(*e.child("left")), eval(*e.child("right")), e);
      case NodeKind::UnaryOp: {
        const std::string op = e.child("op")->type_name;
        PyValue v = eval(*e.child("operand"));
        if (op == "Not") return PyValue::boolean(!v.truthy());
        if (v.kind == PyValue::Kind::Bool) v = PyValue::integer(v.b ? 1 : 0, IntType{});
        if (v.kind == PyValue::Kind::Float) return op == "USub" ? PyValue::real(-v.f) : v;
        if (op == "USub") return PyValue::integer(v.literal ? cpp_int(-v.i) : reduce(-v.i, v.type), v.type, v.literal);
        if (op == "Invert") return PyValue::integer(v.literal ? cpp_int(-v.i - 1) : reduce(-v.i - 1, v.type), v.type, v.literal);
        return v;
      }
      case NodeKind::BoolOp: {
        const bool is_and = e.child("op")->type_name == "And";
        PyValue last;
        for (const auto& operand : e.list("values")) {
          last = eval(operand);
          if (is_and != last.truthy()) return PyValue::boolean(last.truthy());
        }
        return PyValue::boolean(last.truthy());
      }
      case NodeKind::Compare: {
        PyValue left = eval(*e.child("left"));
        const auto& ops = e.list("ops");
        const auto& rights = e.list("comparators");
        for (std::size_t i = 0; i < ops.size(); ++i) {
          PyValue right = eval(rights[i]);
          if (!compare(ops[i].type_name, left, right)) return PyValue::boolean(false);
          left = right;
        }
        return PyValue::boolean(true);
      }
      case NodeKind::IfExp:
        return eval(*e.child("test")).truthy() ? eval(*e.child("body")) : eval(*e.child("orelse"));
      case NodeKind::Call:
        return call(e);
      default:
        throw std::runtime_error("interpreter does not support " + std::string(pybmc::ast::node_kind_name(e.kind)));
    }
  }

  // Both operands as ints of one type; literals take the other side's type.
  static std::pair<PyValue, PyValue> unify(PyValue a, PyValue b) {
    if (a.kind == PyValue::Kind::Bool) a = PyValue::integer(a.b ? 1 : 0, IntType{}, true);
    if (b.kind == PyValue::Kind::Bool) b = PyValue::integer(b.b ? 1 : 0, IntType{}, true);
    if (a.literal && !b.literal) a = PyValue::integer(reduce(a.i, b.type), b.type);
    if (b.literal && !a.literal) b = PyValue::integer(reduce(b.i, a.type), a.type);
    return {a, b};
  }

  static double as_double(const PyValue& v) {
    switch (v.kind) {
      case PyValue::Kind::Float: return v.f;
      case PyValue::Kind::Bool: return v.b ? 1.0 : 0.0;
      default: return v.i.convert_to<double>();
    }
  }

  bool compare(const std::string& op, const PyValue& l, const PyValue& r) {
    if (l.kind == PyValue::Kind::Float || r.kind == PyValue::Kind::Float) {
      double a = as_double(l), b = as_double(r);
      if (op == "Eq") return a == b;
      if (op == "NotEq") return a != b;
      if (op == "Lt") return a < b;
      if (op == "LtE") return a <= b;
      if (op == "Gt") return a > b;
      if (op == "GtE") return a >= b;
    } else {
      auto [a, b] = unify(l, r);
      if (op == "Eq") return a.i == b.i;
      if (op == "NotEq") return a.i != b.i;
      if (op == "Lt") return a.i < b.i;
      if (op == "LtE") return a.i <= b.i;
      if (op == "Gt") return a.i > b.i;
      if (op == "GtE") return a.i >= b.i;
    }
    throw std::runtime_error("interpreter: comparison " + op);
  }

  PyValue binary(const std::string& op, const PyValue& l, const PyValue& r, const AstNode& at) {
    if (op == "Div" || l.kind == PyValue::Kind::Float || r.kind == PyValue::Kind::Float) {
      double a = as_double(l), b = as_double(r);
      if (op == "Add") return PyValue::real(a + b);
      if (op == "Sub") return PyValue::real(a - b);
      if (op == "Mult") return PyValue::real(a * b);
      if (op == "Div") return PyValue::real(a / b);
      throw std::runtime_error("interpreter: float operator " + op);
    }
    auto [a, b] = unify(l, r);
    const IntType t = a.type;
    const bool literal = a.literal && b.literal;
    auto make = [&](const cpp_int& v) { return PyValue::integer(literal ? v : reduce(v, t), t, literal); };
    // Bitwise operators act on the two's-complement pattern.
    auto pattern = [&](const cpp_int& v) {
      const IntType u{literal ? 256u : t.width, false};
      return reduce(v, u);
    };
    auto from_pattern = [&](const cpp_int& v) {
      return literal ? reduce(v, IntType{256, true}) : v;
    };
    if (op == "Add") return make(a.i + b.i);
    if (op == "Sub") return make(a.i - b.i);
    if (op == "Mult") return make(a.i * b.i);
    if (op == "FloorDiv" || op == "Mod") {
      if (b.i == 0) halt(Outcome::Status::DivisionByZero, at, pybmc::ast::unparse(at));
      cpp_int q = floor_div(a.i, b.i);
      return make(op == "FloorDiv" ? q : cpp_int(a.i - b.i * q));
    }
    if (op == "BitAnd") return make(from_pattern(pattern(a.i) & pattern(b.i)));
    if (op == "BitOr") return make(from_pattern(pattern(a.i) | pattern(b.i)));
    if (op == "BitXor") return make(from_pattern(pattern(a.i) ^ pattern(b.i)));
    if (op == "LShift" || op == "RShift") {
      if (b.i < 0) throw std::runtime_error("interpreter: negative shift");
      const unsigned n = b.i > 512 ? 512u : b.i.convert_to<unsigned>();
      if (op == "LShift") return make(a.i << n);
      // Flooring shift of the mathematical value.
      return make(floor_div(a.i, cpp_int(1) << n));
    }
    throw std::runtime_error("interpreter: operator " + op);
  }

  PyValue call(const AstNode& e) {
    const AstNode& func = *e.child("func");
    if (!func.is(NodeKind::Name)) throw std::runtime_error("interpreter: only direct calls");
    const std::string name = func.str("id");
    std::vector<PyValue> args;
    for (const auto& a : e.list("args")) args.push_back(eval(a));
    std::map<std::string, PyValue> keywords;
    for (const auto& k : e.list("keywords")) keywords[k.str("arg")] = eval(*k.child("value"));

    if (name == "__ESBMC_assume" || name == "__VERIFIER_assume") {
      if (!args.at(0).truthy()) halt(Outcome::Status::AssumptionViolated, e);
      return PyValue::none();
    }
    if (name.rfind("nondet_", 0) == 0) {
      const std::string kind = name.substr(7);
      PyValue v = inputs_(kind, nondet_count_++);
      if (auto t = int_type_named(kind)) {
        if (v.kind != PyValue::Kind::Int) throw std::runtime_error("nondet_" + kind + " needs an int input");
        return PyValue::integer(reduce(v.i, *t), *t);
      }
      return v;
    }
    if (name == "abs") {
      PyValue v = args.at(0);
      if (v.kind == PyValue::Kind::Float) return PyValue::real(std::fabs(v.f));
      return PyValue::integer(v.literal ? cpp_int(abs(v.i)) : reduce(abs(v.i), v.type), v.type, v.literal);
    }
    if (name == "min" || name == "max") {
      PyValue best = args.at(0);
      for (std::size_t i = 1; i < args.size(); ++i) {
        const bool less = compare("Lt", args[i], best);
        if (name == "min" ? less : compare("Gt", args[i], best)) best = args[i];
      }
      if (best.literal) {
        for (const auto& a : args) {
          if (!a.literal && a.kind == PyValue::Kind::Int) best = PyValue::integer(reduce(best.i, a.type), a.type);
        }
      }
      return best;
    }
    if (name == "bool") return PyValue::boolean(args.at(0).truthy());
    if (name == "float") return PyValue::real(as_double(args.at(0)));
    if (auto t = int_type_named(name)) {
      const PyValue& v = args.at(0);
      if (v.kind == PyValue::Kind::Float) return PyValue::integer(reduce(cpp_int(std::trunc(v.f)), *t), *t);
      if (v.kind == PyValue::Kind::Bool) return PyValue::integer(v.b ? 1 : 0, *t);
      return PyValue::integer(reduce(v.i, *t), *t);
    }
    return invoke(name, args, keywords);
  }

  PyValue invoke(const std::string& name, const std::vector<PyValue>& args,
                 const std::map<std::string, PyValue>& keywords) {
    auto it = functions_.find(name);
    if (it == functions_.end()) throw std::runtime_error("interpreter: unknown function " + name);
    const AstNode& def = *it->second;
    const AstNode& arguments = *def.child("args");
    const auto& params = arguments.list("args");
    const auto& defaults = arguments.list("defaults");
    Frame frame;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const std::string pname = params[i].str("arg");
      PyValue v;
      if (i < args.size()) {
        v = args[i];
      } else if (auto k = keywords.find(pname); k != keywords.end()) {
        v = k->second;
      } else {
        const std::size_t first_default = params.size() - defaults.size();
        if (i < first_default) throw std::runtime_error("interpreter: missing argument " + pname);
        v = eval(defaults[i - first_default]);
      }
      Slot s = slot_for_annotation(params[i].child("annotation"));
      if (!params[i].child("annotation")) s = slot_for_value(v);
      s.value = convert_for(s, v);
      frame[pname] = s;
    }
    if (frames_.size() > 10000) throw std::runtime_error("interpreter: recursion too deep");
    frames_.push_back(std::move(frame));
    PyValue result;
    try {
      exec_block(def.list("body"));
    } catch (const ReturnSignal& r) {
      result = r.value;
    } catch (...) {
      frames_.pop_back();
      throw;
    }
    frames_.pop_back();
    Slot ret = slot_for_annotation(def.child("returns"));
    return convert_for(ret, result);
  }

  const AstNode& module_;
  const Inputs& inputs_;
  std::size_t limit_;
  std::size_t steps_ = 0;
  std::size_t nondet_count_ = 0;
  std::vector<Frame> frames_;
  std::map<std::string, const AstNode*> functions_;
};

}  // namespace

Outcome interpret(const AstNode& module, const Inputs& inputs, const std::string& function,
                  const std::vector<PyValue>& args, std::size_t step_limit) {
  Interpreter interp(module, inputs, step_limit);
  if (function.empty()) return interp.run_module();
  return interp.run_function(function, args, nullptr);
}

Outcome call(const AstNode& module, const std::string& function, const std::vector<PyValue>& args, PyValue* result) {
  static const Inputs none = from_list({});
  Interpreter interp(module, none, 1000000);
  return interp.run_function(function, args, result);
}

}  // namespace oracle
