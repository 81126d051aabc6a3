#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "interpreter.hpp"
#include "random_program.hpp"

using namespace pybmc;

namespace {

oracle::PyValue input_value(const oracle::RandomInput& in, long v) {
  if (in.is_bool) return oracle::PyValue::boolean(v != 0);
  return oracle::PyValue::integer(v, oracle::IntType{32, true});
}

// Value of `main@<name>!<version>` in the model, zero when the input is unread.
long model_value(const Model& m, const oracle::RandomInput& in) {
  const std::string prefix = "main@" + in.name + "!";
  for (const auto& [key, value] : m) {
    if (key.rfind(prefix, 0) != 0) continue;
    if (value.sort.is_bool()) return value.b ? 1 : 0;
    return value.as_signed().convert_to<long>();
  }
  return 0;
}

// Enumerates every input combination; stops at the first violating one.
std::optional<oracle::Outcome> exhaustive(const ast::AstNode& module, const oracle::RandomProgram& p) {
  std::vector<long> current(p.inputs.size());
  for (std::size_t i = 0; i < p.inputs.size(); ++i) current[i] = p.inputs[i].is_bool ? 0 : p.inputs[i].lo;
  while (true) {
    std::vector<oracle::PyValue> values;
    for (std::size_t i = 0; i < p.inputs.size(); ++i) values.push_back(input_value(p.inputs[i], current[i]));
    const auto o = oracle::interpret(module, oracle::from_list(values));
    if (o.violated()) return o;
    std::size_t i = p.inputs.size();
    while (i-- > 0) {
      const long hi = p.inputs[i].is_bool ? 1 : p.inputs[i].hi;
      if (current[i] < hi) {
        ++current[i];
        break;
      }
      current[i] = p.inputs[i].is_bool ? 0 : p.inputs[i].lo;
    }
    if (i == static_cast<std::size_t>(-1)) return std::nullopt;
  }
}

}  // namespace

TEST_CASE("verifier verdicts match the reference interpreter on random programs") {
  std::mt19937_64 rng(2024);
  fixtures::TempDir dir;
  int failed = 0, successful = 0;
  for (int i = 0; i < 40; ++i) {
    const auto p = oracle::generate_program(rng, 1 << 12);
    RunConfig config;
    config.input = dir.write_json("main", p.ast);
    const auto module = ast::load_ast(p.ast, "main.py");
    const auto r = verify(config);
    CAPTURE(p.source);
    REQUIRE((r.outcome == Outcome::Failed || r.outcome == Outcome::Successful));
    if (r.outcome == Outcome::Failed) {
      ++failed;
      const Violation& v = r.violations.front();
      std::vector<oracle::PyValue> values;
      for (const auto& in : p.inputs) values.push_back(input_value(in, model_value(v.model, in)));
      const auto o = oracle::interpret(module, oracle::from_list(values));
      CHECK(o.violated());
      CHECK(o.line == v.loc.line);
    } else {
      ++successful;
      const auto o = exhaustive(module, p);
      CHECK_FALSE(o.has_value());
    }
  }
  CHECK(failed > 0);
  CHECK(successful > 0);
}

TEST_CASE("the interpreter reproduces the suite verdicts it can decide") {
  // Programs whose inputs are all bounded by assumptions to a small range are
  // checked exhaustively; the rest are covered by the solver tests.
  const auto module = ast::load_ast_file(fixtures::suite_test("functions", "factorial_fails").string(), "main.py");
  int violations = 0;
  for (long n = -5; n <= 12; ++n) {
    const auto o = oracle::interpret(module, oracle::from_list({oracle::PyValue::integer(n, {32, true})}));
    if (o.violated()) {
      ++violations;
      CHECK(n == 5);
      CHECK(o.line == 10);
    }
  }
  CHECK(violations == 1);
}
