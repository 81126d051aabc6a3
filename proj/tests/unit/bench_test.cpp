#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"

using namespace pybmc;

TEST_CASE("expectation files") {
  fixtures::TempDir dir;
  CHECK_THROWS_AS(read_expectation(dir.path().string()), Error);
  std::ofstream(dir.path() / "expect") << "MAYBE\n";
  CHECK_THROWS_AS(read_expectation(dir.path().string()), Error);
  std::ofstream(dir.path() / "expect") << "FAILED\n--unwind 3 --overflow-check\n";
  const auto e = read_expectation(dir.path().string());
  CHECK(e.verdict == "FAILED");
  CHECK(e.flags == std::vector<std::string>{"--unwind", "3", "--overflow-check"});
}

TEST_CASE("an empty suite gives an empty report") {
  fixtures::TempDir dir;
  BenchOptions options;
  options.verifier = PYBMC_BINARY;
  const auto r = run_suite(dir.path().string(), options);
  CHECK(r.tests.empty());
  CHECK(r.categories.empty());
  CHECK(r.all_match());
}

TEST_CASE("suite discovery is sorted and complete") {
  const auto tests = discover_suite(fixtures::suite_dir().string());
  REQUIRE(tests.size() >= 30);
  for (std::size_t i = 1; i < tests.size(); ++i) {
    CHECK(std::make_pair(tests[i - 1].category, tests[i - 1].name) < std::make_pair(tests[i].category, tests[i].name));
  }
  for (const auto& t : tests) CHECK((t.expected.verdict == "FAILED" || t.expected.verdict == "SUCCESSFUL"));
}

TEST_CASE("category display names") {
  CHECK(category_display_name("arith_operations") == "Arith operations");
  CHECK(category_display_name("built-in_functions") == "Built-in functions");
  CHECK(category_display_name("non-determinism") == "Non-determinism");
}
