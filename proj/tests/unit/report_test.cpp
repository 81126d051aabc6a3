#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"

using namespace pybmc;

namespace {

VerificationResult verify_suite(const std::string& cat, const std::string& name, std::vector<std::string> flags) {
  return verify(fixtures::config_for(fixtures::suite_test(cat, name).string(), flags));
}

}  // namespace

TEST_CASE("factorial counterexample: states, ordinals and values") {
  const auto r = verify_suite("functions", "factorial_fails", {"--unwind", "5"});
  REQUIRE(r.outcome == Outcome::Failed);
  CHECK(exit_code(r) == 1);
  REQUIRE(r.violations.size() == 1);
  const Violation& v = r.violations[0];
  CHECK(v.property_class == PropertyClass::UserAssertion);
  CHECK(v.text == "result != 120");
  CHECK(v.loc.line == 10);
  // n, the assumption and the call's result precede the assertion.
  CHECK(v.ordinal == 4);
  REQUIRE(v.states.size() == 1);
  CHECK(v.states[0].ordinal == 1);
  CHECK(v.states[0].loc.line == 7);
  REQUIRE(v.states[0].assignments.size() == 1);
  CHECK(v.states[0].assignments[0].name == "n");
  CHECK(v.states[0].assignments[0].decimal == "5");
  CHECK(v.states[0].assignments[0].binary == "00000000 00000000 00000000 00000101");

  const std::string text = render_text(r);
  CHECK(text.find("State 1 file main.py line 7") != std::string::npos);
  CHECK(text.find("n = 5 (00000000 00000000 00000000 00000101)") != std::string::npos);
  CHECK(text.find("Violated property:") != std::string::npos);
  CHECK(text.find("VERIFICATION FAILED") != std::string::npos);
}

TEST_CASE("successful and unknown outcomes") {
  const auto ok = verify_suite("functions", "factorial_bounded", {"--unwind", "5"});
  CHECK(ok.outcome == Outcome::Successful);
  CHECK(ok.violations.empty());
  CHECK(exit_code(ok) == 0);
  CHECK(render_text(ok).find("VERIFICATION SUCCESSFUL") != std::string::npos);

  auto config = fixtures::config_for(fixtures::suite_test("functions", "factorial_fails").string(), {"--unwind", "5"});
  config.solver = "/nonexistent/solver";
  const auto broken = verify(config);
  // A solver that cannot be started is an error of the back end, not a front-end one.
  CHECK(broken.outcome == Outcome::Error);
  CHECK(broken.error == ErrorCode::SolverCrashed);
  CHECK(exit_code(broken) == 3);
}

TEST_CASE("front-end errors exit with 2 and carry a location") {
  auto config = fixtures::config_for("/nonexistent/main.json", {});
  const auto r = verify(config);
  CHECK(r.outcome == Outcome::Error);
  CHECK(exit_code(r) == 2);
  CHECK(r.error == ErrorCode::Io);
}

TEST_CASE("the enumeration oracle gives the same report") {
  auto config = fixtures::config_for(fixtures::suite_test("functions", "factorial_fails").string(), {"--unwind", "5"});
  config.solver = kOracleSolver;
  const auto r = verify(config);
  REQUIRE(r.outcome == Outcome::Failed);
  CHECK(r.violations[0].states[0].assignments[0].decimal == "5");
}

TEST_CASE("division by zero in integer_squareroot") {
  const auto r = verify_suite("numeric_types", "integer_squareroot", {"--function", "integer_squareroot"});
  REQUIRE(r.outcome == Outcome::Failed);
  const Violation& v = r.violations[0];
  CHECK(v.property_class == PropertyClass::DivisionByZero);
  bool witness = false;
  for (const auto& s : v.states) {
    for (const auto& a : s.assignments) witness = witness || (a.name == "n" && a.decimal == "18446744073709551615");
  }
  CHECK(witness);
  const auto j = render_json(r);
  CHECK(j.at("outcome") == "FAILED");
  CHECK(j.at("violations").at(0).at("property_class") == "division-by-zero");
}

TEST_CASE("multi-property reports every violated assertion") {
  auto config = fixtures::config_for(fixtures::suite_test("logical_operations", "implication_wrong").string(), {});
  const auto first = verify(config);
  config.multi_property = true;
  const auto all = verify(config);
  REQUIRE(first.outcome == Outcome::Failed);
  REQUIRE(all.outcome == Outcome::Failed);
  CHECK(first.violations.size() == 1);
  CHECK(all.violations.size() >= first.violations.size());
  CHECK(all.violations.front().loc.line == first.violations.front().loc.line);
}

TEST_CASE("dump flags write intermediates") {
  auto config = fixtures::config_for(fixtures::suite_test("functions", "factorial_fails").string(), {"--unwind", "2"});
  config.show_goto = true;
  config.show_ssa = true;
  std::ostringstream dumps;
  verify(config, &dumps);
  CHECK(dumps.str().find("ASSERT") != std::string::npos);
  CHECK(dumps.str().find(":=") != std::string::npos);
}

TEST_CASE("configuration is validated") {
  RunConfig c;
  c.input = "x.json";
  c.unwind = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.unwind = 1;
  c.int_width = 16;
  CHECK_THROWS_AS(c.validate(), Error);
  c.int_width = 64;
  CHECK_NOTHROW(c.validate());
}
