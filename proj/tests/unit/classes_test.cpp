#include <doctest.h>

#include <optional>
#include <random>

#include "fixtures.hpp"
#include "pybmc/annotate.hpp"
#include "pybmc/symtab.hpp"

using namespace pybmc;
using nlohmann::json;

namespace {

json at(json j, int line) {
  j["lineno"] = line;
  j["col_offset"] = 0;
  j["end_lineno"] = line;
  j["end_col_offset"] = 1;
  return j;
}

json name_node(const std::string& id, int line) { return at({{"_type", "Name"}, {"id", id}, {"ctx", {{"_type", "Load"}}}}, line); }

json method(const std::string& name, int value, int line) {
  json self = at({{"_type", "arg"}, {"arg", "self"}, {"annotation", nullptr}, {"type_comment", nullptr}}, line);
  json args = {{"_type", "arguments"}, {"args", json::array({self})}, {"defaults", json::array()},
               {"kw_defaults", json::array()}, {"kwarg", nullptr}, {"kwonlyargs", json::array()},
               {"posonlyargs", json::array()}, {"vararg", nullptr}};
  json ret = at({{"_type", "Return"}, {"value", at({{"_type", "Constant"}, {"value", value}, {"kind", nullptr}}, line)}},
                line);
  return at({{"_type", "FunctionDef"}, {"name", name}, {"args", args}, {"body", json::array({ret})},
             {"decorator_list", json::array()}, {"returns", name_node("int", line)}, {"type_comment", nullptr}},
            line);
}

struct Hierarchy {
  std::vector<std::vector<int>> bases;
  std::vector<std::vector<bool>> defines;  // [class][method]
};

const int kMethods = 3;

json to_module(const Hierarchy& h) {
  json body = json::array();
  int line = 1;
  for (std::size_t c = 0; c < h.bases.size(); ++c) {
    json bases = json::array();
    for (int b : h.bases[c]) bases.push_back(name_node("C" + std::to_string(b), line));
    json members = json::array();
    for (int m = 0; m < kMethods; ++m) {
      if (h.defines[c][m]) members.push_back(method("m" + std::to_string(m), static_cast<int>(c), ++line));
    }
    if (members.empty()) members.push_back(at({{"_type", "Pass"}}, ++line));
    body.push_back(at({{"_type", "ClassDef"}, {"name", "C" + std::to_string(c)}, {"bases", bases},
                       {"body", members}, {"decorator_list", json::array()}, {"keywords", json::array()}},
                      line - static_cast<int>(members.size())));
    ++line;
  }
  return {{"_type", "Module"}, {"body", body}, {"type_ignores", json::array()}, {"python_version", "3.10"}};
}

// Left-to-right depth-first search, the class itself first.
std::optional<int> dfs_owner(const Hierarchy& h, int c, int m) {
  if (h.defines[c][m]) return c;
  for (int b : h.bases[c]) {
    if (auto owner = dfs_owner(h, b, m)) return owner;
  }
  return std::nullopt;
}

Hierarchy random_hierarchy(std::mt19937_64& rng) {
  Hierarchy h;
  const int n = std::uniform_int_distribution<int>(2, 7)(rng);
  for (int c = 0; c < n; ++c) {
    std::vector<int> bases;
    const int count = c == 0 ? 0 : std::uniform_int_distribution<int>(0, std::min(c, 3))(rng);
    while (static_cast<int>(bases.size()) < count) {
      const int b = std::uniform_int_distribution<int>(0, c - 1)(rng);
      if (std::find(bases.begin(), bases.end(), b) == bases.end()) bases.push_back(b);
    }
    h.bases.push_back(bases);
    std::vector<bool> defines;
    for (int m = 0; m < kMethods; ++m) defines.push_back(std::bernoulli_distribution(0.3)(rng));
    h.defines.push_back(defines);
  }
  return h;
}

}  // namespace

TEST_CASE("member lookup follows a left-first depth-first search") {
  std::mt19937_64 rng(3);
  fixtures::TempDir dir;
  int found = 0, missing = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Hierarchy h = random_hierarchy(rng);
    const std::string path = dir.write_json("main", to_module(h));
    auto st = build_symbol_table(infer_and_annotate(ast::load_program(path)));
    for (std::size_t c = 0; c < h.bases.size(); ++c) {
      const std::string cls = "main@C" + std::to_string(c);
      for (int m = 0; m < kMethods; ++m) {
        const std::string member = "m" + std::to_string(m);
        CAPTURE(trial);
        CAPTURE(cls);
        CAPTURE(member);
        const auto owner = dfs_owner(h, static_cast<int>(c), m);
        if (owner) {
          ++found;
          const Symbol s = resolve_member(*st, cls, member);
          CHECK(s.qualified == "main@C" + std::to_string(*owner) + "@" + member);
          CHECK(s.kind == SymbolKind::Method);
        } else {
          ++missing;
          CHECK_THROWS_AS(resolve_member(*st, cls, member), Error);
        }
      }
    }
  }
  CHECK(found > 0);
  CHECK(missing > 0);
}

TEST_CASE("the diamond resolves through the left base") {
  const auto input = fixtures::suite_test("classes", "diamond_mro");
  auto st = build_symbol_table(infer_and_annotate(ast::load_program(input.string())));
  CHECK(resolve_member(*st, "main@D", "who").qualified == "main@B@who");
  CHECK(resolve_member(*st, "main@C", "who").qualified == "main@C@who");
  const auto& d = st->classes().at("main@D");
  CHECK(d.bases == std::vector<std::string>{"main@B", "main@C"});
}
