#include "pybmc/ast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "pybmc/process.hpp"

namespace pybmc::ast {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Node kinds

namespace {

struct KindEntry {
  std::string_view type_name;
  NodeKind kind;
};

constexpr KindEntry kKinds[] = {
    {"Module", NodeKind::Module},         {"FunctionDef", NodeKind::FunctionDef},
    {"ClassDef", NodeKind::ClassDef},     {"AnnAssign", NodeKind::AnnAssign},
    {"Assign", NodeKind::Assign},         {"AugAssign", NodeKind::AugAssign},
    {"If", NodeKind::If},                 {"While", NodeKind::While},
    {"For", NodeKind::For},               {"Return", NodeKind::Return},
    {"Expr", NodeKind::Expr},             {"Pass", NodeKind::Pass},
    {"Break", NodeKind::Break},           {"Continue", NodeKind::Continue},
    {"Assert", NodeKind::Assert},         {"Import", NodeKind::Import},
    {"ImportFrom", NodeKind::ImportFrom}, {"Call", NodeKind::Call},
    {"Name", NodeKind::Name},             {"Attribute", NodeKind::Attribute},
    {"Constant", NodeKind::Constant},     {"BinOp", NodeKind::BinOp},
    {"BoolOp", NodeKind::BoolOp},         {"UnaryOp", NodeKind::UnaryOp},
    {"Compare", NodeKind::Compare},       {"IfExp", NodeKind::IfExp},
    {"Subscript", NodeKind::Subscript},   {"List", NodeKind::List},
    {"arguments", NodeKind::Arguments},   {"arg", NodeKind::Arg},
    {"keyword", NodeKind::Keyword},       {"alias", NodeKind::Alias},
};

constexpr std::string_view kOperators[] = {
    "Add",  "Sub",    "Mult", "FloorDiv", "Mod", "Div",   "BitAnd", "BitOr",
    "BitXor", "LShift", "RShift", "And", "Or",  "Not",   "USub",   "UAdd",
    "Invert", "Eq",   "NotEq", "Lt",      "LtE", "Gt",    "GtE",
};

// Expression contexts carry no information the verifier needs.
constexpr std::string_view kDropped[] = {"Load", "Store", "Del"};

struct Required {
  NodeKind kind;
  std::vector<std::string_view> fields;
};

const std::vector<Required>& required_fields() {
  static const std::vector<Required> table = {
      {NodeKind::Module, {"body"}},
      {NodeKind::FunctionDef, {"name", "args", "body"}},
      {NodeKind::ClassDef, {"name", "bases", "body"}},
      {NodeKind::AnnAssign, {"target", "annotation"}},
      {NodeKind::Assign, {"targets", "value"}},
      {NodeKind::AugAssign, {"target", "op", "value"}},
      {NodeKind::If, {"test", "body"}},
      {NodeKind::While, {"test", "body"}},
      {NodeKind::For, {"target", "iter", "body"}},
      {NodeKind::Expr, {"value"}},
      {NodeKind::Assert, {"test"}},
      {NodeKind::Import, {"names"}},
      {NodeKind::ImportFrom, {"names"}},
      {NodeKind::Call, {"func"}},
      {NodeKind::Name, {"id"}},
      {NodeKind::Attribute, {"value", "attr"}},
      {NodeKind::Constant, {"value"}},
      {NodeKind::BinOp, {"left", "op", "right"}},
      {NodeKind::BoolOp, {"op", "values"}},
      {NodeKind::UnaryOp, {"op", "operand"}},
      {NodeKind::Compare, {"left", "ops", "comparators"}},
      {NodeKind::IfExp, {"test", "body", "orelse"}},
      {NodeKind::Subscript, {"value", "slice"}},
      {NodeKind::List, {"elts"}},
      {NodeKind::Arguments, {"args"}},
      {NodeKind::Arg, {"arg"}},
      {NodeKind::Keyword, {"value"}},
      {NodeKind::Alias, {"name"}},
  };
  return table;
}

std::optional<NodeKind> lookup_kind(std::string_view type_name) {
  for (const auto& entry : kKinds) {
    if (entry.type_name == type_name) return entry.kind;
  }
  for (auto op : kOperators) {
    if (op == type_name) return NodeKind::Operator;
  }
  return std::nullopt;
}

bool is_dropped(std::string_view type_name) {
  return std::find(std::begin(kDropped), std::end(kDropped), type_name) != std::end(kDropped);
}

constexpr std::string_view kLocationKeys[] = {"lineno", "col_offset", "end_lineno",
                                              "end_col_offset"};

bool is_location_key(std::string_view key) {
  return std::find(std::begin(kLocationKeys), std::end(kLocationKeys), key) !=
         std::end(kLocationKeys);
}

const std::vector<AstNode> kEmptyList;

}  // namespace

std::string_view node_kind_name(NodeKind kind) {
  if (kind == NodeKind::Operator) return "Operator";
  for (const auto& entry : kKinds) {
    if (entry.kind == kind) return entry.type_name;
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Scalar / AstNode accessors

Scalar Scalar::from_bool(bool value) {
  Scalar s;
  s.kind = Kind::Bool;
  s.boolean = value;
  return s;
}

Scalar Scalar::from_int(std::string decimal) {
  Scalar s;
  s.kind = Kind::Int;
  s.text = std::move(decimal);
  return s;
}

Scalar Scalar::from_float(double value) {
  Scalar s;
  s.kind = Kind::Float;
  s.real = value;
  return s;
}

Scalar Scalar::from_string(std::string value) {
  Scalar s;
  s.kind = Kind::String;
  s.text = std::move(value);
  return s;
}

const AstNode* AstNode::child(std::string_view field) const {
  auto it = children.find(std::string(field));
  if (it == children.end() || it->second.is_list || it->second.nodes.empty()) return nullptr;
  return &it->second.nodes.front();
}

AstNode* AstNode::child(std::string_view field) {
  auto it = children.find(std::string(field));
  if (it == children.end() || it->second.is_list || it->second.nodes.empty()) return nullptr;
  return &it->second.nodes.front();
}

const std::vector<AstNode>& AstNode::list(std::string_view field) const {
  auto it = children.find(std::string(field));
  if (it == children.end() || !it->second.is_list) return kEmptyList;
  return it->second.nodes;
}

std::vector<AstNode>& AstNode::list(std::string_view field) {
  auto& slot = children[std::string(field)];
  slot.is_list = true;
  return slot.nodes;
}

const Scalar* AstNode::scalar(std::string_view field) const {
  auto it = scalars.find(std::string(field));
  return it == scalars.end() ? nullptr : &it->second;
}

std::string AstNode::str(std::string_view field) const {
  const Scalar* s = scalar(field);
  if (!s || s->kind != Scalar::Kind::String) return {};
  return s->text;
}

void AstNode::set_child(const std::string& field, AstNode node) {
  scalars.erase(field);
  ChildField slot;
  slot.is_list = false;
  slot.nodes.push_back(std::move(node));
  children[field] = std::move(slot);
}

void AstNode::set_list(const std::string& field, std::vector<AstNode> nodes) {
  scalars.erase(field);
  ChildField slot;
  slot.is_list = true;
  slot.nodes = std::move(nodes);
  children[field] = std::move(slot);
}

void AstNode::set_scalar(const std::string& field, Scalar value) {
  children.erase(field);
  scalars[field] = std::move(value);
}

void AstNode::erase(const std::string& field) {
  children.erase(field);
  scalars.erase(field);
}

AstNode make_node(NodeKind kind, std::string type_name, const SourceLocation& loc) {
  AstNode node;
  node.kind = kind;
  node.type_name = std::move(type_name);
  node.loc = loc;
  return node;
}

AstNode make_name(const std::string& id, const SourceLocation& loc) {
  AstNode node = make_node(NodeKind::Name, "Name", loc);
  node.set_scalar("id", Scalar::from_string(id));
  return node;
}

AstNode make_call(AstNode func, std::vector<AstNode> args, const SourceLocation& loc) {
  AstNode node = make_node(NodeKind::Call, "Call", loc);
  node.set_child("func", std::move(func));
  node.set_list("args", std::move(args));
  node.set_list("keywords", {});
  return node;
}

AstNode make_int_constant(const std::string& decimal, const SourceLocation& loc) {
  AstNode node = make_node(NodeKind::Constant, "Constant", loc);
  node.set_scalar("value", Scalar::from_int(decimal));
  return node;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

class Loader {
 public:
  explicit Loader(std::string file) : file_(std::move(file)) {}

  AstNode load(const json& doc, const SourceLocation& parent) {
    if (!doc.is_object()) throw Error(ErrorCode::MalformedAst, "expected an AST node object", parent);
    auto type_it = doc.find("_type");
    if (type_it == doc.end() || !type_it->is_string()) {
      throw Error(ErrorCode::MalformedAst, "node without a _type string", parent);
    }
    const std::string type_name = type_it->get<std::string>();

    SourceLocation loc = parent;
    loc.file = file_;
    bool has_own_location = false;
    if (auto it = doc.find("lineno"); it != doc.end() && it->is_number_integer()) {
      loc.line = it->get<int>();
      has_own_location = true;
      loc.column = 0;
    }
    if (auto it = doc.find("col_offset"); it != doc.end() && it->is_number_integer()) {
      loc.column = it->get<int>();
    }
    if (has_own_location && (loc.line < 1 || loc.column < 0)) {
      throw Error(ErrorCode::MalformedAst, "location out of range", loc);
    }

    auto kind = lookup_kind(type_name);
    if (!kind) {
      throw Error(ErrorCode::UnsupportedConstruct, "'" + type_name + "' is outside the supported subset",
                  loc);
    }

    AstNode node;
    node.kind = *kind;
    node.type_name = type_name;
    node.loc = has_own_location ? loc : SourceLocation{file_, 0, 0};
    if (auto it = doc.find("end_lineno"); it != doc.end() && it->is_number_integer()) {
      node.end_line = it->get<int>();
    }
    if (auto it = doc.find("end_col_offset"); it != doc.end() && it->is_number_integer()) {
      node.end_column = it->get<int>();
    }

    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string& key = it.key();
      if (key == "_type" || key == "ctx" || is_location_key(key)) continue;
      const json& value = it.value();
      if (value.is_object() && value.contains("_type")) {
        if (is_dropped(value["_type"].get<std::string>())) continue;
        node.set_child(key, load(value, loc));
      } else if (value.is_array()) {
        std::vector<AstNode> items;
        bool all_nodes = true;
        for (const auto& element : value) {
          if (!(element.is_object() && element.contains("_type"))) {
            all_nodes = false;
            break;
          }
        }
        if (!all_nodes) {
          throw Error(ErrorCode::UnsupportedConstruct, "non-node list in field '" + key + "'", loc);
        }
        for (const auto& element : value) items.push_back(load(element, loc));
        node.set_list(key, std::move(items));
      } else {
        node.set_scalar(key, to_scalar(value, key, loc));
      }
    }

    check_required(node, doc, loc);
    check_subset(node, loc);
    return node;
  }

 private:
  static Scalar to_scalar(const json& value, const std::string& key, const SourceLocation& loc) {
    if (value.is_null()) return Scalar::null();
    if (value.is_boolean()) return Scalar::from_bool(value.get<bool>());
    if (value.is_number_unsigned()) return Scalar::from_int(std::to_string(value.get<std::uint64_t>()));
    if (value.is_number_integer()) return Scalar::from_int(std::to_string(value.get<std::int64_t>()));
    if (value.is_number_float()) return Scalar::from_float(value.get<double>());
    if (value.is_string()) return Scalar::from_string(value.get<std::string>());
    throw Error(ErrorCode::MalformedAst, "unexpected value in field '" + key + "'", loc);
  }

  static void check_required(const AstNode& node, const json& doc, const SourceLocation& loc) {
    for (const auto& entry : required_fields()) {
      if (entry.kind != node.kind) continue;
      for (auto field : entry.fields) {
        if (!doc.contains(std::string(field))) {
          throw Error(ErrorCode::MalformedAst,
                      std::string(node.type_name) + " lacks required field '" + std::string(field) + "'",
                      loc);
        }
      }
    }
  }

  static void reject(const std::string& what, const SourceLocation& loc) {
    throw Error(ErrorCode::UnsupportedConstruct, what + " is outside the supported subset", loc);
  }

  static void check_subset(const AstNode& node, const SourceLocation& loc) {
    switch (node.kind) {
      case NodeKind::FunctionDef: {
        if (!node.list("decorator_list").empty()) reject("decorator", loc);
        const AstNode* args = node.child("args");
        if (!args) throw Error(ErrorCode::MalformedAst, "FunctionDef without arguments", loc);
        if (args->child("vararg") || args->child("kwarg")) reject("variadic parameter", loc);
        if (!args->list("kwonlyargs").empty()) reject("keyword-only parameter", loc);
        if (!args->list("posonlyargs").empty()) reject("positional-only parameter", loc);
        for (const auto& stmt : node.list("body")) {
          if (stmt.is(NodeKind::FunctionDef) || stmt.is(NodeKind::ClassDef)) {
            reject("nested definition", stmt.loc);
          }
        }
        break;
      }
      case NodeKind::ClassDef:
        if (!node.list("decorator_list").empty()) reject("class decorator", loc);
        if (!node.list("keywords").empty()) reject("class keyword", loc);
        break;
      case NodeKind::For:
      case NodeKind::While:
        if (!node.list("orelse").empty()) reject("loop else clause", loc);
        break;
      case NodeKind::Keyword:
        if (node.str("arg").empty()) reject("keyword unpacking", loc);
        break;
      case NodeKind::Constant: {
        const Scalar* v = node.scalar("value");
        if (!v && node.child("value")) reject("constant", loc);
        break;
      }
      default:
        break;
    }
  }

  std::string file_;
};

void check_python_version(const json& doc, const std::string& file) {
  auto it = doc.find("python_version");
  if (it == doc.end()) return;
  if (!it->is_string()) throw Error(ErrorCode::MalformedAst, "python_version must be a string", {file});
  std::string version = it->get<std::string>();
  int major = 0, minor = 0;
  if (std::sscanf(version.c_str(), "%d.%d", &major, &minor) != 2 || major != 3 ||
      minor < kMinPythonMinor || minor > kMaxPythonMinor) {
    throw Error(ErrorCode::MalformedAst,
                "AST dialect of Python " + version + " is not supported (tested 3." +
                    std::to_string(kMinPythonMinor) + " to 3." + std::to_string(kMaxPythonMinor) + ")",
                {file});
  }
}

}  // namespace

AstNode load_ast(const json& doc, const std::string& file) {
  if (!doc.is_object() || doc.value("_type", std::string()) != "Module") {
    throw Error(ErrorCode::MalformedAst, "document root is not a Module", {file});
  }
  check_python_version(doc, file);
  Loader loader(file);
  AstNode root = loader.load(doc, SourceLocation{file, 0, 0});
  root.erase("python_version");
  return root;
}

AstNode load_ast_file(const std::string& json_path, const std::string& source_name) {
  std::ifstream in(json_path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + json_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedAst, json_path + ": " + e.what(), {source_name});
  }
  return load_ast(doc, source_name);
}

json to_json(const AstNode& node) {
  json out = json::object();
  out["_type"] = node.type_name;
  if (node.loc.line > 0) {
    out["lineno"] = node.loc.line;
    out["col_offset"] = node.loc.column;
  }
  if (node.end_line > 0) {
    out["end_lineno"] = node.end_line;
    out["end_col_offset"] = node.end_column;
  }
  for (const auto& [key, scalar] : node.scalars) {
    switch (scalar.kind) {
      case Scalar::Kind::Null: out[key] = nullptr; break;
      case Scalar::Kind::Bool: out[key] = scalar.boolean; break;
      case Scalar::Kind::Float: out[key] = scalar.real; break;
      case Scalar::Kind::String: out[key] = scalar.text; break;
      case Scalar::Kind::Int: {
        // Integers beyond 64 bits are written as raw JSON numbers.
        if (scalar.text.size() < 19) {
          out[key] = std::stoll(scalar.text);
        } else {
          out[key] = json::parse(scalar.text);
        }
        break;
      }
    }
  }
  for (const auto& [key, field] : node.children) {
    if (field.is_list) {
      json items = json::array();
      for (const auto& n : field.nodes) items.push_back(to_json(n));
      out[key] = std::move(items);
    } else if (!field.nodes.empty()) {
      out[key] = to_json(field.nodes.front());
    }
  }
  return out;
}

std::size_t count_nodes(const AstNode& node) {
  std::size_t total = 1;
  for (const auto& [key, field] : node.children) {
    for (const auto& n : field.nodes) total += count_nodes(n);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Unparsing

namespace {

int binop_precedence(std::string_view op) {
  if (op == "BitOr") return 5;
  if (op == "BitXor") return 6;
  if (op == "BitAnd") return 7;
  if (op == "LShift" || op == "RShift") return 8;
  if (op == "Add" || op == "Sub") return 9;
  return 10;  // Mult, Div, FloorDiv, Mod
}

std::string_view operator_text(std::string_view op) {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"Add", "+"},     {"Sub", "-"},     {"Mult", "*"},    {"FloorDiv", "//"}, {"Mod", "%"},
      {"Div", "/"},     {"BitAnd", "&"},  {"BitOr", "|"},   {"BitXor", "^"},    {"LShift", "<<"},
      {"RShift", ">>"}, {"And", "and"},   {"Or", "or"},     {"Not", "not "},    {"USub", "-"},
      {"UAdd", "+"},    {"Invert", "~"},  {"Eq", "=="},     {"NotEq", "!="},    {"Lt", "<"},
      {"LtE", "<="},    {"Gt", ">"},      {"GtE", ">="},
  };
  auto it = table.find(op);
  return it == table.end() ? op : it->second;
}

int precedence(const AstNode& node) {
  switch (node.kind) {
    case NodeKind::IfExp: return 0;
    case NodeKind::BoolOp: return node.child("op")->type_name == "Or" ? 1 : 2;
    case NodeKind::UnaryOp: return node.child("op")->type_name == "Not" ? 3 : 11;
    case NodeKind::Compare: return 4;
    case NodeKind::BinOp: return binop_precedence(node.child("op")->type_name);
    default: return 13;
  }
}

std::string format_float(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.precision(17);
  out << value;
  std::string text = out.str();
  // Shortest round-trip representation, as Python's repr would print it.
  for (int digits = 1; digits <= 17; ++digits) {
    std::ostringstream trial;
    trial.precision(digits);
    trial << value;
    if (std::stod(trial.str()) == value) {
      text = trial.str();
      break;
    }
  }
  if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
  return text;
}

std::string unparse_expr(const AstNode& node, int parent_precedence);

std::string wrap(const AstNode& node, int min_precedence) {
  return unparse_expr(node, min_precedence);
}

std::string unparse_expr(const AstNode& node, int parent_precedence) {
  std::string text;
  const int own = precedence(node);
  switch (node.kind) {
    case NodeKind::Name:
      text = node.str("id");
      break;
    case NodeKind::Constant: {
      const Scalar* v = node.scalar("value");
      if (!v || v->kind == Scalar::Kind::Null) {
        text = "None";
      } else if (v->kind == Scalar::Kind::Bool) {
        text = v->boolean ? "True" : "False";
      } else if (v->kind == Scalar::Kind::Int) {
        text = v->text;
      } else if (v->kind == Scalar::Kind::Float) {
        text = format_float(v->real);
      } else {
        text = "'" + v->text + "'";
      }
      break;
    }
    case NodeKind::BinOp: {
      const std::string op = node.child("op")->type_name;
      // Left-associative: the right operand needs parentheses at equal precedence.
      text = wrap(*node.child("left"), own) + " " + std::string(operator_text(op)) + " " +
             wrap(*node.child("right"), own + 1);
      break;
    }
    case NodeKind::BoolOp: {
      const std::string op = node.child("op")->type_name;
      const auto& values = node.list("values");
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text += " " + std::string(operator_text(op)) + " ";
        text += wrap(values[i], own + 1);
      }
      break;
    }
    case NodeKind::UnaryOp: {
      const std::string op = node.child("op")->type_name;
      text = std::string(operator_text(op)) + wrap(*node.child("operand"), own);
      break;
    }
    case NodeKind::Compare: {
      text = wrap(*node.child("left"), own + 1);
      const auto& ops = node.list("ops");
      const auto& rhs = node.list("comparators");
      for (std::size_t i = 0; i < ops.size() && i < rhs.size(); ++i) {
        text += " " + std::string(operator_text(ops[i].type_name)) + " " + wrap(rhs[i], own + 1);
      }
      break;
    }
    case NodeKind::IfExp:
      text = wrap(*node.child("body"), 1) + " if " + wrap(*node.child("test"), 1) + " else " +
             wrap(*node.child("orelse"), 0);
      break;
    case NodeKind::Call: {
      text = wrap(*node.child("func"), 13) + "(";
      bool first = true;
      for (const auto& a : node.list("args")) {
        if (!first) text += ", ";
        text += unparse_expr(a, 0);
        first = false;
      }
      for (const auto& k : node.list("keywords")) {
        if (!first) text += ", ";
        text += k.str("arg") + "=" + unparse_expr(*k.child("value"), 0);
        first = false;
      }
      text += ")";
      break;
    }
    case NodeKind::Attribute:
      text = wrap(*node.child("value"), 13) + "." + node.str("attr");
      break;
    case NodeKind::Subscript:
      text = wrap(*node.child("value"), 13) + "[" + unparse_expr(*node.child("slice"), 0) + "]";
      break;
    case NodeKind::List: {
      text = "[";
      const auto& elts = node.list("elts");
      for (std::size_t i = 0; i < elts.size(); ++i) {
        if (i) text += ", ";
        text += unparse_expr(elts[i], 0);
      }
      text += "]";
      break;
    }
    case NodeKind::Operator:
      text = std::string(operator_text(node.type_name));
      break;
    default:
      text = "<" + node.type_name + ">";
  }
  if (own < parent_precedence) return "(" + text + ")";
  return text;
}

}  // namespace

std::string unparse(const AstNode& node) {
  switch (node.kind) {
    case NodeKind::AnnAssign: {
      std::string text = unparse(*node.child("target")) + ": " + unparse(*node.child("annotation"));
      if (const AstNode* v = node.child("value")) text += " = " + unparse(*v);
      return text;
    }
    case NodeKind::Assign: {
      std::string text;
      for (const auto& t : node.list("targets")) text += unparse(t) + " = ";
      return text + unparse(*node.child("value"));
    }
    case NodeKind::AugAssign:
      return unparse(*node.child("target")) + " " +
             std::string(operator_text(node.child("op")->type_name)) + "= " +
             unparse(*node.child("value"));
    case NodeKind::Expr:
      return unparse(*node.child("value"));
    case NodeKind::Assert:
      return "assert " + unparse(*node.child("test"));
    case NodeKind::Return:
      return node.child("value") ? "return " + unparse(*node.child("value")) : "return";
    case NodeKind::Pass: return "pass";
    case NodeKind::Break: return "break";
    case NodeKind::Continue: return "continue";
    default:
      return unparse_expr(node, 0);
  }
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

void render_into(const AstNode& node, const std::string& field, int depth, std::ostringstream& out) {
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ');
  if (!field.empty()) out << field << ": ";
  out << node_kind_name(node.kind);
  switch (node.kind) {
    case NodeKind::Name: out << " id=" << node.str("id"); break;
    case NodeKind::FunctionDef:
    case NodeKind::ClassDef: out << " name=" << node.str("name"); break;
    case NodeKind::Arg: out << " arg=" << node.str("arg"); break;
    case NodeKind::Attribute: out << " attr=" << node.str("attr"); break;
    case NodeKind::Alias: out << " name=" << node.str("name"); break;
    case NodeKind::Keyword: out << " arg=" << node.str("arg"); break;
    case NodeKind::ImportFrom: out << " module=" << node.str("module"); break;
    case NodeKind::Operator: out << " " << node.type_name; break;
    case NodeKind::Constant: out << " value=" << unparse(node); break;
    default: break;
  }
  if (node.loc.line > 0) out << " [" << node.loc.line << ":" << node.loc.column << "]";
  out << "\n";
  for (const auto& [key, child] : node.children) {
    for (const auto& n : child.nodes) render_into(n, key, depth + 1, out);
  }
}

}  // namespace

std::string render_parse_tree(const AstNode& node) {
  std::ostringstream out;
  render_into(node, "", 0, out);
  return out.str();
}

std::string render_parse_tree(const ProgramUnit& unit) {
  return render_parse_tree(unit.main_module.root);
}

// ---------------------------------------------------------------------------
// Program units

const ModuleAst* ProgramUnit::find_module(std::string_view name) const {
  if (main_module.name == name) return &main_module;
  for (const auto& m : imported_modules) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::vector<const ModuleAst*> ProgramUnit::all_modules() const {
  std::vector<const ModuleAst*> out;
  for (const auto& m : imported_modules) out.push_back(&m);
  out.push_back(&main_module);
  return out;
}

bool is_ignored_module(std::string_view name) {
  return name == "typing" || name == "__future__";
}

namespace {

std::optional<std::string> dumper_command() {
  if (const char* env = std::getenv("PYBMC_AST_DUMP"); env && *env) return std::string(env);
  if (auto exe = find_executable("ast-dump")) return *exe;
  return std::nullopt;
}

// Loads `<dir>/<stem>.json`, falling back to dumping `<dir>/<stem>.py`.
std::optional<ModuleAst> load_module_from(const fs::path& dir, const std::string& name) {
  std::string relative = name;
  std::replace(relative.begin(), relative.end(), '.', '/');
  fs::path json_path = dir / (relative + ".json");
  fs::path py_path = dir / (relative + ".py");
  const std::string source_name = py_path.filename().string();
  if (fs::exists(json_path)) {
    return ModuleAst{name, json_path.string(), source_name, load_ast_file(json_path.string(), source_name)};
  }
  if (fs::exists(py_path)) {
    auto dumper = dumper_command();
    if (!dumper) {
      throw Error(ErrorCode::Io, "no JSON AST for " + py_path.string() +
                                     " and no AST dumper (ast-dump) available");
    }
    auto argv = split_command(*dumper);
    argv.push_back(py_path.string());
    ProcessResult r = run_process(argv, {}, 60.0);
    if (r.exit_code != 0) {
      throw Error(r.exit_code == 2 ? ErrorCode::MalformedAst : ErrorCode::Io,
                  "AST dumper failed on " + py_path.string() + ": " + r.err);
    }
    json doc;
    try {
      doc = json::parse(r.out);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::MalformedAst, std::string("dumper output: ") + e.what());
    }
    return ModuleAst{name, py_path.string(), source_name, load_ast(doc, source_name)};
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, SourceLocation>> imported_names(const AstNode& module) {
  std::vector<std::pair<std::string, SourceLocation>> out;
  for (const auto& stmt : module.list("body")) {
    if (stmt.is(NodeKind::Import)) {
      for (const auto& alias : stmt.list("names")) out.emplace_back(alias.str("name"), stmt.loc);
    } else if (stmt.is(NodeKind::ImportFrom)) {
      const Scalar* level = stmt.scalar("level");
      if (level && level->kind == Scalar::Kind::Int && level->text != "0") {
        throw Error(ErrorCode::UnsupportedConstruct, "relative import", stmt.loc);
      }
      out.emplace_back(stmt.str("module"), stmt.loc);
    }
  }
  return out;
}

}  // namespace

ProgramUnit load_program(const std::string& path) {
  fs::path p(path);
  if (!fs::exists(p)) throw Error(ErrorCode::Io, "no such file: " + path);
  ProgramUnit unit;
  unit.source_path = path;
  const std::string stem = p.stem().string();
  auto module = load_module_from(p.parent_path().empty() ? fs::path(".") : p.parent_path(), stem);
  if (p.extension() == ".json") {
    // Load exactly the named document, even when a sibling with the same stem exists.
    module = ModuleAst{stem, path, stem + ".py", load_ast_file(path, stem + ".py")};
  }
  if (!module) throw Error(ErrorCode::Io, "cannot load " + path);
  unit.main_module = std::move(*module);
  return unit;
}

ProgramUnit resolve_imports(ProgramUnit unit, const std::string& search_dir) {
  std::vector<ModuleAst> ordered;
  std::vector<std::string> stack;
  std::set<std::string> done;
  fs::path dir(search_dir.empty() ? "." : search_dir);

  std::function<void(const ModuleAst&)> visit = [&](const ModuleAst& module) {
    stack.push_back(module.name);
    for (const auto& [name, loc] : imported_names(module.root)) {
      if (is_ignored_module(name)) continue;
      if (std::find(stack.begin(), stack.end(), name) != stack.end()) {
        std::string path;
        auto start = std::find(stack.begin(), stack.end(), name);
        for (auto it = start; it != stack.end(); ++it) path += *it + " -> ";
        path += name;
        throw Error(ErrorCode::ImportCycle, path, loc);
      }
      if (done.count(name)) continue;
      auto loaded = load_module_from(dir, name);
      if (!loaded) throw Error(ErrorCode::ModuleNotFound, "module '" + name + "' not found", loc);
      visit(*loaded);
      done.insert(name);
      ordered.push_back(std::move(*loaded));
    }
    stack.pop_back();
  };
  visit(unit.main_module);
  unit.imported_modules = std::move(ordered);
  return unit;
}

ProgramUnit isolate_function(ProgramUnit unit, const std::string& name) {
  const auto& body = unit.main_module.root.list("body");
  auto dot = name.find('.');
  bool found = false;
  if (dot == std::string::npos) {
    for (const auto& stmt : body) {
      if (stmt.is(NodeKind::FunctionDef) && stmt.str("name") == name) found = true;
    }
  } else {
    const std::string cls = name.substr(0, dot);
    const std::string method = name.substr(dot + 1);
    for (const auto& stmt : body) {
      if (!stmt.is(NodeKind::ClassDef) || stmt.str("name") != cls) continue;
      // Inherited methods are accepted too; the symbol table resolves them.
      found = true;
      bool own = false;
      for (const auto& member : stmt.list("body")) {
        if (member.is(NodeKind::FunctionDef) && member.str("name") == method) own = true;
      }
      if (!own && stmt.list("bases").empty()) found = false;
    }
  }
  if (!found) throw Error(ErrorCode::FunctionNotFound, "function '" + name + "' not found");
  unit.isolated_function = name;
  return unit;
}

}  // namespace pybmc::ast
