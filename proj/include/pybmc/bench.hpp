#pragma once

// Suite runner: one verifier process per test, verdicts compared against the
// `expect` sidecar, wall time and peak memory aggregated per category.

#include <string>
#include <vector>

namespace pybmc {

struct Expectation {
  std::string verdict;             // "FAILED" or "SUCCESSFUL"
  std::vector<std::string> flags;  // extra command-line flags for this test
};

// Reads `<test_dir>/expect`; throws MissingExpectation when absent or malformed.
Expectation read_expectation(const std::string& test_dir);

struct BenchTest {
  std::string category;  // directory name
  std::string name;
  std::string input;     // main.json, or main.py when no AST is checked in
  Expectation expected;
  std::string actual;    // FAILED, SUCCESSFUL, UNKNOWN, ERROR or TIMEOUT
  int exit_code = -1;
  double wall_seconds = 0.0;
  long peak_rss_kb = 0;
  std::string output;    // verifier stdout and stderr
  bool matches() const { return actual == expected.verdict; }
};

struct BenchCategory {
  std::string name;  // display name, e.g. "Arith operations"
  std::size_t tests = 0;
  double mean_memory_bytes = 0.0;
  double mean_seconds = 0.0;
  std::size_t mismatches = 0;
};

struct BenchReport {
  std::vector<BenchTest> tests;  // sorted by category, then name
  std::vector<BenchCategory> categories;
  bool all_match() const;
};

struct BenchOptions {
  std::string verifier;  // path of the verifier executable
  int jobs = 1;
  double timeout_seconds = 60.0;
  std::vector<std::string> extra_args;  // appended to every invocation
};

// Tests are the directories `<suite>/<category>/<name>` holding main.json or main.py.
std::vector<BenchTest> discover_suite(const std::string& suite_dir);

BenchReport run_suite(const std::string& suite_dir, const BenchOptions& options);

// "arith_operations" -> "Arith operations".
std::string category_display_name(const std::string& directory);

// Table with one row per category followed by the per-test verdicts.
std::string render_bench(const BenchReport& report);

}  // namespace pybmc
