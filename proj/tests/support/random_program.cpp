#include "random_program.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

namespace oracle {

using nlohmann::json;

unsigned long long RandomProgram::domain() const {
  unsigned long long d = 1;
  for (const auto& in : inputs) d *= in.size();
  return d;
}

namespace {

// Expression tree rendered to both output forms.
struct E {
  enum Kind { Name, Int, Bin, Cmp, BoolOp, Not, Neg } kind = Int;
  std::string text;  // name, or operator spelling
  std::string op;    // AST operator class
  long value = 0;
  std::vector<std::shared_ptr<E>> kids;
};
using P = std::shared_ptr<E>;

P name(const std::string& n) {
  auto e = std::make_shared<E>();
  e->kind = E::Name;
  e->text = n;
  return e;
}

P integer(long v) {
  auto e = std::make_shared<E>();
  if (v < 0) {
    e->kind = E::Neg;
    e->kids = {integer(-v)};
    return e;
  }
  e->kind = E::Int;
  e->value = v;
  return e;
}

P node(E::Kind k, std::string text, std::string op, std::vector<P> kids) {
  auto e = std::make_shared<E>();
  e->kind = k;
  e->text = std::move(text);
  e->op = std::move(op);
  e->kids = std::move(kids);
  return e;
}

std::string render(const P& e) {
  switch (e->kind) {
    case E::Name: return e->text;
    case E::Int: return std::to_string(e->value);
    case E::Neg: return "(-" + render(e->kids[0]) + ")";
    case E::Not: return "(not " + render(e->kids[0]) + ")";
    case E::Bin:
    case E::Cmp:
    case E::BoolOp:
      return "(" + render(e->kids[0]) + " " + e->text + " " + render(e->kids[1]) + ")";
  }
  return "";
}

json located(json j, int line, int col = 0) {
  j["lineno"] = line;
  j["col_offset"] = col;
  j["end_lineno"] = line;
  j["end_col_offset"] = col + 1;
  return j;
}

json load_ctx() { return json{{"_type", "Load"}}; }

json to_ast(const P& e, int line) {
  switch (e->kind) {
    case E::Name: return located({{"_type", "Name"}, {"id", e->text}, {"ctx", load_ctx()}}, line);
    case E::Int: return located({{"_type", "Constant"}, {"value", e->value}, {"kind", nullptr}}, line);
    case E::Neg:
      return located({{"_type", "UnaryOp"}, {"op", {{"_type", "USub"}}}, {"operand", to_ast(e->kids[0], line)}}, line);
    case E::Not:
      return located({{"_type", "UnaryOp"}, {"op", {{"_type", "Not"}}}, {"operand", to_ast(e->kids[0], line)}}, line);
    case E::Bin:
      return located({{"_type", "BinOp"},
                      {"left", to_ast(e->kids[0], line)},
                      {"op", {{"_type", e->op}}},
                      {"right", to_ast(e->kids[1], line)}},
                     line);
    case E::Cmp:
      return located({{"_type", "Compare"},
                      {"left", to_ast(e->kids[0], line)},
                      {"ops", json::array({{{"_type", e->op}}})},
                      {"comparators", json::array({to_ast(e->kids[1], line)})}},
                     line);
    case E::BoolOp:
      return located({{"_type", "BoolOp"},
                      {"op", {{"_type", e->op}}},
                      {"values", json::array({to_ast(e->kids[0], line), to_ast(e->kids[1], line)})}},
                     line);
  }
  return {};
}

class Generator {
 public:
  explicit Generator(std::mt19937_64& rng) : rng_(rng) {}

  RandomProgram run(unsigned long long max_domain) {
    RandomProgram p;
    const int n_inputs = pick(1, 3);
    for (int i = 0; i < n_inputs; ++i) {
      RandomInput in;
      in.name = "x" + std::to_string(i);
      in.is_bool = chance(0.25);
      if (!in.is_bool) {
        in.lo = pick(-128, 127);
        in.hi = std::min<long>(in.lo + pick(0, 255), 127);
      }
      p.inputs.push_back(in);
    }
    // Narrow the widest int ranges until the product fits.
    while (p.domain() > max_domain) {
      auto widest = std::max_element(p.inputs.begin(), p.inputs.end(),
                                     [](const RandomInput& a, const RandomInput& b) { return a.size() < b.size(); });
      widest->hi = widest->lo + static_cast<long>(widest->size() / 2) - 1;
    }
    for (const auto& in : p.inputs) {
      if (in.is_bool) {
        bools_.push_back(in.name);
        stmt_ann(in.name, "bool", call("nondet_bool", {}));
      } else {
        ints_.push_back(in.name);
        stmt_ann(in.name, "int", call("nondet_int", {}));
        P range = node(E::BoolOp, "and", "And",
                       {node(E::Cmp, ">=", "GtE", {name(in.name), integer(in.lo)}),
                        node(E::Cmp, "<=", "LtE", {name(in.name), integer(in.hi)})});
        stmt_expr(call("__ESBMC_assume", {range}));
      }
    }
    const int n_statements = pick(2, 6);
    for (int i = 0; i < n_statements; ++i) {
      if (!temps_.empty() && chance(0.35)) {
        if_statement();
      } else {
        const std::string t = "t" + std::to_string(temps_.size());
        stmt_ann(t, "int", int_expr(2));
        temps_.push_back(t);
        ints_.push_back(t);
      }
      if (chance(0.3)) assertion();
    }
    assertion();
    p.source = source_.str();
    p.ast = json{{"_type", "Module"}, {"body", body_}, {"type_ignores", json::array()}, {"python_version", "3.10"}};
    return p;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  template <typename T>
  const T& choose(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
  }

  struct Call {
    std::string fn;
    std::vector<P> args;
  };
  Call call(std::string fn, std::vector<P> args) { return {std::move(fn), std::move(args)}; }

  json call_ast(const Call& c, int line) {
    json args = json::array();
    for (const auto& a : c.args) args.push_back(to_ast(a, line));
    return located({{"_type", "Call"},
                    {"func", located({{"_type", "Name"}, {"id", c.fn}, {"ctx", load_ctx()}}, line)},
                    {"args", args},
                    {"keywords", json::array()}},
                   line);
  }

  std::string call_text(const Call& c) {
    std::string s = c.fn + "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) s += (i ? ", " : "") + render(c.args[i]);
    return s + ")";
  }

  std::string indent() const { return std::string(4 * static_cast<std::size_t>(depth_), ' '); }

  void append(json stmt) {
    if (blocks_.empty()) {
      body_.push_back(std::move(stmt));
    } else {
      blocks_.back()->push_back(std::move(stmt));
    }
  }

  json annotated(const std::string& var, const std::string& type, json value, int line) {
    return located({{"_type", "AnnAssign"},
                    {"target", located({{"_type", "Name"}, {"id", var}, {"ctx", {{"_type", "Store"}}}}, line)},
                    {"annotation", located({{"_type", "Name"}, {"id", type}, {"ctx", load_ctx()}}, line)},
                    {"value", std::move(value)},
                    {"simple", 1}},
                   line);
  }

  void stmt_ann(const std::string& var, const std::string& type, const Call& c) {
    const int line = ++line_;
    source_ << indent() << var << ": " << type << " = " << call_text(c) << "\n";
    append(annotated(var, type, call_ast(c, line), line));
  }

  void stmt_ann(const std::string& var, const std::string& type, const P& e) {
    const int line = ++line_;
    source_ << indent() << var << ": " << type << " = " << render(e) << "\n";
    append(annotated(var, type, to_ast(e, line), line));
  }

  void stmt_assign(const std::string& var, const P& e) {
    const int line = ++line_;
    source_ << indent() << var << " = " << render(e) << "\n";
    append(located({{"_type", "Assign"},
                    {"targets", json::array({located({{"_type", "Name"}, {"id", var}, {"ctx", {{"_type", "Store"}}}},
                                                     line)})},
                    {"value", to_ast(e, line)},
                    {"type_comment", nullptr}},
                   line));
  }

  void stmt_expr(const Call& c) {
    const int line = ++line_;
    source_ << indent() << call_text(c) << "\n";
    append(located({{"_type", "Expr"}, {"value", call_ast(c, line)}}, line));
  }

  void assertion() {
    const int line = ++line_;
    P cond = bool_expr(2);
    source_ << indent() << "assert " << render(cond) << "\n";
    append(located({{"_type", "Assert"}, {"test", to_ast(cond, line)}, {"msg", nullptr}}, line));
  }

  void if_statement() {
    const int line = ++line_;
    P cond = bool_expr(1);
    source_ << indent() << "if " << render(cond) << ":\n";
    json stmt = located({{"_type", "If"}, {"test", to_ast(cond, line)}, {"body", json::array()}, {"orelse", json::array()}},
                        line);
    json body = json::array(), orelse = json::array();
    ++depth_;
    blocks_.push_back(&body);
    stmt_assign(choose(temps_), int_expr(2));
    blocks_.pop_back();
    --depth_;
    if (chance(0.6)) {
      source_ << indent() << "else:\n";
      ++line_;
      ++depth_;
      blocks_.push_back(&orelse);
      stmt_assign(choose(temps_), int_expr(2));
      blocks_.pop_back();
      --depth_;
    }
    stmt["body"] = body;
    stmt["orelse"] = orelse;
    append(std::move(stmt));
  }

  P int_leaf() {
    if (ints_.empty() || chance(0.3)) return integer(pick(-8, 8));
    return name(choose(ints_));
  }

  P int_expr(int depth) {
    if (depth == 0 || chance(0.3)) return int_leaf();
    static const std::vector<std::pair<std::string, std::string>> ops = {
        {"+", "Add"}, {"-", "Sub"}, {"*", "Mult"}, {"//", "FloorDiv"}, {"%", "Mod"},
        {"&", "BitAnd"}, {"|", "BitOr"}, {"^", "BitXor"}};
    const auto& [text, op] = choose(ops);
    return node(E::Bin, text, op, {int_expr(depth - 1), int_expr(depth - 1)});
  }

  P bool_expr(int depth) {
    if (depth > 0 && chance(0.3)) {
      if (chance(0.3)) return node(E::Not, "not", "Not", {bool_expr(depth - 1)});
      const bool is_and = chance(0.5);
      return node(E::BoolOp, is_and ? "and" : "or", is_and ? "And" : "Or", {bool_expr(depth - 1), bool_expr(depth - 1)});
    }
    if (!bools_.empty() && chance(0.2)) return name(choose(bools_));
    static const std::vector<std::pair<std::string, std::string>> cmps = {
        {"<", "Lt"}, {"<=", "LtE"}, {"==", "Eq"}, {"!=", "NotEq"}, {">", "Gt"}, {">=", "GtE"}};
    const auto& [text, op] = choose(cmps);
    return node(E::Cmp, text, op, {int_expr(1), int_expr(1)});
  }

  std::mt19937_64& rng_;
  std::ostringstream source_;
  json body_ = json::array();
  std::vector<json*> blocks_;
  std::vector<std::string> ints_, bools_, temps_;
  int line_ = 0;
  int depth_ = 0;
};

}  // namespace

RandomProgram generate_program(std::mt19937_64& rng, unsigned long long max_domain) {
  return Generator(rng).run(max_domain);
}

}  // namespace oracle
