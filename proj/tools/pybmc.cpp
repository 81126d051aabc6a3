#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "pybmc/bench.hpp"
#include "pybmc/error.hpp"
#include "pybmc/pipeline.hpp"

namespace {

std::string self_path(const char* argv0) {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::string(argv0) : p.string();
}

}  // namespace

int main(int argc, char** argv) {
  pybmc::RunConfig config;
  CLI::App app{"Bounded model checker for statically typed Python programs"};
  app.set_version_flag("--version", std::string("pybmc ") + pybmc::kVersion);

  app.add_option("input", config.input, "Program to verify: JSON AST (or Python source with a dumper)");
  app.add_option("--unwind", config.unwind, "Loop and recursion bound k")->check(CLI::PositiveNumber);
  app.add_option("--function", config.function, "Verify this function alone with nondeterministic arguments");
  app.add_flag("--parse-tree-too", config.parse_tree, "Print the parse tree");
  app.add_flag("--dump-annotated", config.dump_annotated, "Print the annotated AST as JSON");
  app.add_flag("--show-symbol-table", config.show_symbol_table, "Print the symbol table");
  app.add_flag("--show-goto", config.show_goto, "Print the instrumented GOTO program");
  app.add_flag("--show-ssa", config.show_ssa, "Print the simplified SSA trace");
  app.add_option("--smt-lib-out", config.smt_lib_out, "Write the SMT-LIB queries to this file");
  app.add_option("--solver", config.solver, "Solver command line, or 'oracle' for exhaustive enumeration");
  app.add_option("--int-width", config.int_width, "Width of unannotated int values")->check(CLI::IsMember({32u, 64u}));
  app.add_flag("--overflow-check", config.overflow_check, "Check signed arithmetic overflow");
  bool no_unwinding = false;
  app.add_flag("--no-unwinding-assertions", no_unwinding, "Assume instead of assert the unwinding bound");
  app.add_option("--timeout", config.timeout_seconds, "Solver timeout in seconds")->check(CLI::PositiveNumber);
  std::string format = "text";
  app.add_option("--output", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--multi-property", config.multi_property, "Check every property in one solver session");

  auto* bench = app.add_subcommand("bench", "Run a test suite and print per-category results");
  std::string suite_dir;
  pybmc::BenchOptions bench_options;
  bench->add_option("dir", suite_dir, "Suite directory")->required();
  bench->add_option("--jobs", bench_options.jobs, "Parallel verifier processes")->check(CLI::PositiveNumber);
  bench->add_option("--test-timeout", bench_options.timeout_seconds, "Per-test wall-clock limit in seconds")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*bench) {
    bench_options.verifier = self_path(argv[0]);
    try {
      auto report = pybmc::run_suite(suite_dir, bench_options);
      std::cout << pybmc::render_bench(report);
      return report.all_match() ? 0 : 1;
    } catch (const pybmc::Error& e) {
      std::cerr << "ERROR: " << pybmc::error_code_name(e.code()) << ": " << e.what() << '\n';
      return 2;
    }
  }

  if (config.input.empty()) {
    std::cerr << app.help();
    return 2;
  }
  config.unwinding_assertions = !no_unwinding;
  config.output = format == "json" ? pybmc::OutputFormat::Json : pybmc::OutputFormat::Text;
  return pybmc::run(config, std::cout, std::cerr);
}
