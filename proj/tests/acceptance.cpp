// Acceptance run: one PASS/FAIL line per criterion, preceded by the suite
// table and the evidence each line rests on.

#include <algorithm>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "agreement.hpp"
#include "fixtures.hpp"
#include "interpreter.hpp"
#include "pybmc/process.hpp"
#include "random_program.hpp"

namespace {

namespace fs = std::filesystem;
using oracle::PyValue;
using pybmc::ast::AstNode;

struct Line {
  std::string title;
  bool pass = false;
  std::string detail;
};

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string seconds(double s) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << s << " s";
  return os.str();
}

AstNode load_module(const fs::path& json_path) { return pybmc::ast::load_ast_file(json_path.string(), "main.py"); }

PyValue int32(long v) { return PyValue::integer(v, oracle::IntType{32, true}); }

// Recursive factorial: FAILED with n = 5 under k = 5, and n = 5 really is the witness.
Line factorial_end_to_end(const std::string& binary) {
  Line l{"factorial end-to-end (k=5): FAILED, result != 120, n = 5"};
  const fs::path input = fixtures::suite_test("functions", "factorial_fails");
  auto r = pybmc::run_process({binary, input.string(), "--unwind", "5"}, "", 60);
  const bool verdict = r.exit_code == 1 && contains(r.out, "VERIFICATION FAILED");
  const bool property = contains(r.out, "Violated property:") && contains(r.out, "\n  result != 120\n");
  const bool witness = contains(r.out, "n = 5 (00000000 00000000 00000000 00000101)");
  const bool fast = r.wall_seconds < 2.0;

  // Independent check: the interpreter reaches the failing assertion at n = 5 only.
  const AstNode module = load_module(input);
  std::vector<long> violating;
  for (long n = -3; n <= 8; ++n) {
    auto o = oracle::interpret(module, oracle::from_list({int32(n)}));
    if (o.violated()) violating.push_back(n);
  }
  const bool derived = violating == std::vector<long>{5};
  l.pass = verdict && property && witness && fast && derived;
  l.detail = "exit " + std::to_string(r.exit_code) + ", property " + (property ? "ok" : "missing") + ", n=5 pattern " +
             (witness ? "ok" : "missing") + ", " + seconds(r.wall_seconds) + ", interpreter witnesses " +
             std::to_string(violating.size()) + (derived ? " (n=5)" : "");
  return l;
}

// The bounded variant: SUCCESSFUL, and brute force over n in [1,4] agrees.
Line factorial_dual(const std::string& binary) {
  Line l{"factorial dual (n in [1,4]): SUCCESSFUL"};
  const fs::path input = fixtures::suite_test("functions", "factorial_bounded");
  auto r = pybmc::run_process({binary, input.string(), "--unwind", "5"}, "", 60);
  const bool verdict = r.exit_code == 0 && contains(r.out, "VERIFICATION SUCCESSFUL");
  const AstNode module = load_module(input);
  bool derived = true;
  for (long n = 1; n <= 4; ++n) {
    PyValue f;
    auto o = oracle::call(module, "factorial", {int32(n)}, &f);
    derived = derived && o.status == oracle::Outcome::Status::Completed && f.i != 120;
    derived = derived && !oracle::interpret(module, oracle::from_list({int32(n)})).violated();
  }
  l.pass = verdict && derived;
  l.detail = "exit " + std::to_string(r.exit_code) + ", brute force over [1,4] " + (derived ? "agrees" : "disagrees") +
             ", " + seconds(r.wall_seconds);
  return l;
}

// integer_squareroot: division by zero at n = 2^64 - 1.
Line squareroot_bug(const std::string& binary) {
  Line l{"integer_squareroot(uint64): FAILED, division-by-zero at n = 2^64-1"};
  const fs::path input = fixtures::suite_test("numeric_types", "integer_squareroot");
  auto r = pybmc::run_process({binary, input.string(), "--function", "integer_squareroot", "--output", "json"}, "", 120);
  bool verdict = false, cls = false, witness = false;
  try {
    auto doc = nlohmann::json::parse(r.out);
    verdict = r.exit_code == 1 && doc.at("outcome") == "FAILED";
    const auto& v = doc.at("violations").at(0);
    cls = v.at("property_class") == "division-by-zero";
    for (const auto& s : v.at("states")) {
      for (const auto& a : s.at("assignments")) {
        if (a.at("name") == "n" && a.at("value") == "18446744073709551615") witness = true;
      }
    }
  } catch (const std::exception& e) {
    l.detail = std::string("unreadable report: ") + e.what() + "; ";
  }
  const oracle::cpp_int max = (oracle::cpp_int(1) << 64) - 1;
  // Modular uint64: (2^64-1)+1 wraps to 0, and the loop then divides by it.
  const bool wraps = ((max + 1) % (oracle::cpp_int(1) << 64)) == 0;
  const AstNode module = load_module(input);
  auto o = oracle::call(module, "integer_squareroot", {PyValue::integer(max, {64, false})}, nullptr);
  auto fine = oracle::call(module, "integer_squareroot", {PyValue::integer(max - 1, {64, false})}, nullptr);
  const bool derived = wraps && o.status == oracle::Outcome::Status::DivisionByZero &&
                       fine.status == oracle::Outcome::Status::Completed;
  const bool fast = r.wall_seconds < 30.0;
  l.pass = verdict && cls && witness && derived && fast;
  l.detail += "exit " + std::to_string(r.exit_code) + ", class " + (cls ? "division-by-zero" : "wrong") + ", n " +
              (witness ? "= 2^64-1" : "wrong") + ", interpreter " + (derived ? "confirms" : "disagrees") + ", " +
              seconds(r.wall_seconds);
  return l;
}

struct SuiteRun {
  pybmc::BenchReport report;
  std::string error;
};

Line suite_soundness(const SuiteRun& run) {
  Line l{"suite soundness: expected verdict on every test, 15 categories"};
  if (!run.error.empty()) {
    l.detail = run.error;
    return l;
  }
  const auto& r = run.report;
  std::map<std::string, std::set<std::string>> verdicts;
  for (const auto& t : r.tests) verdicts[t.category].insert(t.expected.verdict);
  std::size_t balanced = 0;
  for (const auto& [c, v] : verdicts) balanced += v.count("FAILED") && v.count("SUCCESSFUL");
  std::set<std::string> names;
  for (const auto& c : r.categories) names.insert(c.name);
  static const std::set<std::string> expected = {
      "Arith operations", "Assignments",    "Assume",        "Binary operations", "Binary types",
      "Built-in functions", "Classes",      "Conditionals",  "Functions",         "Imports",
      "Logical operations", "Loops",        "Non-determinism", "Numeric types",   "Type annotation"};
  std::size_t correct = 0;
  for (const auto& t : r.tests) correct += t.matches();
  const bool min_size = std::all_of(r.categories.begin(), r.categories.end(),
                                    [](const pybmc::BenchCategory& c) { return c.tests >= 2; });
  l.pass = names == expected && balanced == expected.size() && min_size && correct == r.tests.size();
  l.detail = std::to_string(correct) + "/" + std::to_string(r.tests.size()) + " verdicts, " +
             std::to_string(names.size()) + " categories, " + std::to_string(balanced) +
             " with both FAILED and SUCCESSFUL tests";
  for (const auto& t : r.tests) {
    if (!t.matches()) l.detail += "; mismatch " + t.category + "/" + t.name + " got " + t.actual;
  }
  return l;
}

Line performance(const SuiteRun& run) {
  Line l{"performance: every suite test under 5 s and 512 MB"};
  if (!run.error.empty()) {
    l.detail = run.error;
    return l;
  }
  double worst_time = 0;
  long worst_rss = 0;
  std::string slowest;
  for (const auto& t : run.report.tests) {
    if (t.wall_seconds > worst_time) {
      worst_time = t.wall_seconds;
      slowest = t.category + "/" + t.name;
    }
    worst_rss = std::max(worst_rss, t.peak_rss_kb);
  }
  l.pass = !run.report.tests.empty() && worst_time < 5.0 && worst_rss < 512 * 1024;
  l.detail = "slowest " + slowest + " " + seconds(worst_time) + ", peak memory " + std::to_string(worst_rss / 1024) + " MB";
  return l;
}

Line agreement(const std::vector<fixtures::SuiteCase>& cases, int programs) {
  Line l{"oracle/solver agreement: suite VCs and random programs"};
  oracle::Agreement suite, random;
  std::size_t suite_vcs = 0;
  try {
    for (const auto& c : cases) {
      auto a = pybmc::build_artifacts(c.config);
      for (const auto& vc : a.vcs) {
        ++suite_vcs;
        suite.merge(oracle::compare_solvers(vc, pybmc::kDefaultSolver));
      }
    }
    std::mt19937_64 rng(20240601);
    fixtures::TempDir dir;
    for (int i = 0; i < programs; ++i) {
      auto p = oracle::generate_program(rng);
      pybmc::RunConfig config;
      config.input = dir.write_json("main", p.ast);
      auto a = pybmc::build_artifacts(config);
      for (const auto& vc : a.vcs) random.merge(oracle::compare_solvers(vc, pybmc::kDefaultSolver));
    }
  } catch (const std::exception& e) {
    l.detail = std::string("error: ") + e.what();
    return l;
  }
  l.pass = suite.ok() && random.ok() && random.skipped == 0 && random.checked > 0;
  l.detail = "suite: " + std::to_string(suite.checked) + "/" + std::to_string(suite_vcs) + " VCs enumerable, " +
             std::to_string(suite.disagreements) + " disagreements; random: " + std::to_string(programs) +
             " programs, " + std::to_string(random.checked) + " VCs (" + std::to_string(random.sat) + " SAT), " +
             std::to_string(random.disagreements) + " disagreements, " + std::to_string(random.skipped) +
             " skipped; bad models " + std::to_string(suite.bad_models + random.bad_models);
  if (!suite.first_problem.empty()) l.detail += "; " + suite.first_problem;
  if (!random.first_problem.empty()) l.detail += "; " + random.first_problem;
  if (!random.first_skip.empty()) l.detail += "; skipped: " + random.first_skip;
  return l;
}

std::size_t count_division_nodes(const AstNode& n) {
  std::size_t c = n.is(pybmc::ast::NodeKind::Operator) && (n.type_name == "FloorDiv" || n.type_name == "Mod");
  for (const auto& [field, child] : n.children) {
    for (const auto& k : child.nodes) c += count_division_nodes(k);
  }
  return c;
}

Line structure(const std::vector<fixtures::SuiteCase>& cases) {
  Line l{"structure: SSA single assignment, acyclic unwinding, division checks"};
  std::size_t ssa_ok = 0, acyclic_ok = 0, div_ok = 0, traces = 0;
  std::string problems;
  try {
    for (const auto& c : cases) {
      const std::string name = c.test.category + "/" + c.test.name;
      auto a = pybmc::build_artifacts(c.config);
      ++traces;
      if (pybmc::is_single_assignment(a.trace)) {
        ++ssa_ok;
      } else {
        problems += "; SSA " + name;
      }
      bool acyclic = true;
      for (unsigned k : {1u, 5u, 10u}) {
        auto unwound = pybmc::unwind(a.program, k, c.config.unwinding_assertions);
        acyclic = acyclic && pybmc::is_acyclic(unwound.entry_function()) &&
                  !pybmc::has_back_edge(unwound.entry_function());
      }
      if (acyclic) {
        ++acyclic_ok;
      } else {
        problems += "; cycle " + name;
      }
      std::size_t nodes = 0;
      for (const auto* m : a.symbols->unit().all_modules()) nodes += count_division_nodes(m->root);
      const std::size_t asserts = pybmc::count_assertions(a.program, pybmc::PropertyClass::DivisionByZero);
      if (nodes == asserts) {
        ++div_ok;
      } else {
        problems += "; " + name + " has " + std::to_string(nodes) + " // and % but " + std::to_string(asserts) +
                    " checks";
      }
    }
  } catch (const std::exception& e) {
    problems += std::string("; error: ") + e.what();
  }
  l.pass = traces == cases.size() && ssa_ok == traces && acyclic_ok == traces && div_ok == traces;
  l.detail = "SSA " + std::to_string(ssa_ok) + "/" + std::to_string(cases.size()) + ", acyclic at k=1,5,10 " +
             std::to_string(acyclic_ok) + "/" + std::to_string(cases.size()) + ", division checks " +
             std::to_string(div_ok) + "/" + std::to_string(cases.size()) + problems;
  return l;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to pybmc> [random programs]\n";
    return 2;
  }
  const std::string binary = argv[1];
  const int programs = argc > 2 ? std::stoi(argv[2]) : 100;

  SuiteRun suite;
  try {
    pybmc::BenchOptions options;
    options.verifier = binary;
    options.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    suite.report = pybmc::run_suite(fixtures::suite_dir().string(), options);
    std::cout << pybmc::render_bench(suite.report) << '\n';
  } catch (const std::exception& e) {
    suite.error = e.what();
  }
  std::vector<fixtures::SuiteCase> cases;
  try {
    cases = fixtures::suite_cases();
  } catch (const std::exception& e) {
    std::cerr << "cannot read the suite: " << e.what() << '\n';
  }

  std::vector<Line> lines;
  auto check = [&](const char* title, auto&& fn) {
    try {
      lines.push_back(fn());
    } catch (const std::exception& e) {
      lines.push_back(Line{title, false, std::string("error: ") + e.what()});
    }
  };
  check("factorial end-to-end", [&] { return factorial_end_to_end(binary); });
  check("factorial dual", [&] { return factorial_dual(binary); });
  check("integer_squareroot", [&] { return squareroot_bug(binary); });
  check("suite soundness", [&] { return suite_soundness(suite); });
  check("oracle/solver agreement", [&] { return agreement(cases, programs); });
  check("performance", [&] { return performance(suite); });
  check("structure", [&] { return structure(cases); });

  bool all = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::cout << (lines[i].pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << lines[i].title << " -- "
              << lines[i].detail << '\n';
    all = all && lines[i].pass;
  }
  return all ? 0 : 1;
}
