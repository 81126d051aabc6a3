#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "pybmc/goto.hpp"
#include "pybmc/symex.hpp"

using namespace pybmc;

namespace {

pybmc::RunConfig suite_config(const std::string& cat, const std::string& name, unsigned k = 1) {
  auto c = fixtures::config_for(fixtures::suite_test(cat, name).string(), {});
  c.unwind = k;
  return c;
}

bool any_back_edge(const GotoProgram& gp) {
  for (const auto& [name, fn] : gp.functions) {
    if (has_back_edge(fn)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("loops lower to back edges that unwinding removes") {
  auto a = build_artifacts(suite_config("loops", "sum_range", 6));
  CHECK(any_back_edge(a.program));
  for (unsigned k : {1u, 2u, 7u}) {
    const auto u = unwind(a.program, k, true);
    CHECK(u.unwound == k);
    CHECK_FALSE(has_back_edge(u.entry_function()));
    CHECK(is_acyclic(u.entry_function()));
  }
}

TEST_CASE("each unwound loop leaves one unwinding assertion, or an assumption") {
  auto a = build_artifacts(suite_config("loops", "while_counter", 5));
  const auto with = unwind(a.program, 5, true);
  const auto without = unwind(a.program, 5, false);
  CHECK(count_assertions(with, PropertyClass::Unwinding) >= 1);
  CHECK(count_assertions(without, PropertyClass::Unwinding) == 0);
}

TEST_CASE("recursion is inlined up to k frames") {
  auto a = build_artifacts(suite_config("functions", "factorial_fails", 5));
  std::size_t calls = 0;
  for (const auto& ins : a.unwound.entry_function().body) calls += ins.kind == InstrKind::FunctionCall;
  CHECK(calls == 0);
  CHECK(count_assertions(a.unwound, PropertyClass::Unwinding) == 1);
  CHECK(count_assertions(a.unwound, PropertyClass::UserAssertion) == 1);
}

TEST_CASE("every // and % gets a division-by-zero check") {
  auto a = build_artifacts(suite_config("arith_operations", "divide_by_nondet"));
  CHECK(count_assertions(a.program, PropertyClass::DivisionByZero) >= 1);
  CHECK(count_assertions(a.program, PropertyClass::Overflow) == 0);
  auto checked = fixtures::config_for(fixtures::suite_test("arith_operations", "signed_overflow").string(),
                                      {"--overflow-check"});
  CHECK(count_assertions(build_artifacts(checked).program, PropertyClass::Overflow) >= 1);
}

TEST_CASE("symbolic execution produces single-assignment traces") {
  for (const auto& c : fixtures::suite_cases()) {
    CAPTURE(c.test.input);
    auto a = build_artifacts(c.config);
    const auto raw = execute(a.unwound);
    CHECK(is_single_assignment(raw));
    CHECK(is_single_assignment(a.trace));
    std::set<std::string> seen;
    for (const auto& s : raw.steps) {
      if (s.kind != StepKind::Assignment && s.kind != StepKind::Phi) continue;
      CHECK(seen.insert(s.lhs.name() + "!" + std::to_string(s.lhs.version())).second);
    }
  }
}

TEST_CASE("a duplicated assignment is detected") {
  auto a = build_artifacts(suite_config("assignments", "chained_updates"));
  auto trace = execute(a.unwound);
  auto it = std::find_if(trace.steps.begin(), trace.steps.end(),
                         [](const SsaStep& s) { return s.kind == StepKind::Assignment; });
  REQUIRE(it != trace.steps.end());
  trace.steps.push_back(*it);
  CHECK_FALSE(is_single_assignment(trace));
}

TEST_CASE("the unwound program agrees with concrete execution of the original") {
  // Concrete runs with real loops and calls must reach the same failing
  // assertion as the symbolic verdict when the bound is large enough.
  auto a = build_artifacts(suite_config("functions", "factorial_fails", 6));
  auto five = [](const Sort& s, std::size_t) { return Value::from_integer(s.width, 5); };
  auto three = [](const Sort& s, std::size_t) { return Value::from_integer(s.width, 3); };
  const auto bad = run_concrete(a.program, five);
  CHECK(bad.status == ConcreteRun::Status::AssertionFailed);
  REQUIRE(bad.failed != nullptr);
  CHECK(bad.failed->text == "result != 120");
  CHECK(run_concrete(a.program, three).status == ConcreteRun::Status::Completed);
  CHECK(run_concrete(a.unwound, five).status == ConcreteRun::Status::AssertionFailed);
}

TEST_CASE("display names") {
  CHECK(display_name("main@factorial@n") == "n");
  CHECK(display_name("main@p.x") == "p.x");
  CHECK(is_user_variable("main@n"));
  CHECK_FALSE(is_user_variable("main@factorial@$t3"));
}
