#include <doctest.h>

#include <random>

#include "agreement.hpp"
#include "fixtures.hpp"
#include "random_program.hpp"

using namespace pybmc;

namespace {

Artifacts artifacts_of(const std::string& cat, const std::string& name, std::vector<std::string> flags = {}) {
  return build_artifacts(fixtures::config_for(fixtures::suite_test(cat, name).string(), flags));
}

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("SMT-LIB scripts are complete and pick the logic") {
  auto a = artifacts_of("functions", "factorial_fails", {"--unwind", "5"});
  REQUIRE(a.vcs.size() >= 1);
  const std::string script = emit_smtlib(a.vcs.back());
  CHECK(script.find("(set-logic QF_BV)") != std::string::npos);
  CHECK(script.find("(check-sat)") != std::string::npos);
  CHECK(script.find("(get-value (") != std::string::npos);
  CHECK(script.find("(declare-fun |main@n!") != std::string::npos);

  auto f = artifacts_of("non-determinism", "nondet_float_range");
  std::size_t with_fp = 0;
  for (const auto& vc : f.vcs) {
    const bool fp = std::any_of(vc.symbols.begin(), vc.symbols.end(), [](const Expr& s) { return s.sort().is_fp(); });
    with_fp += fp;
    CHECK(smt_logic(vc) == (fp ? "QF_BVFP" : "QF_BV"));
  }
  CHECK(with_fp > 0);
}

TEST_CASE("model parsing") {
  const Expr a = Expr::symbol("main@a", Sort::bitvec(32), 0);
  const Expr b = Expr::symbol("main@b", Sort::boolean(), 1);
  const Model m = parse_model("((|main@a!0| #x00000005)\n (|main@b!1| true))", {a, b});
  CHECK(m.at("main@a!0") == Value::from_integer(32, 5));
  CHECK(m.at("main@b!1") == Value::boolean(true));
  const Model bin = parse_model("((|main@a!0| #b11111111111111111111111111111111) (|main@b!1| false))", {a, b});
  CHECK(bin.at("main@a!0").as_signed() == -1);
  CHECK(error_of([&] { parse_model("((|main@a!0| #x5", {a}); }) == ErrorCode::ModelParseError);
}

TEST_CASE("z3 finds the factorial counterexample") {
  auto a = artifacts_of("functions", "factorial_fails", {"--unwind", "5"});
  const Vc& vc = a.vcs.back();
  const Verdict v = solve_external(vc, kDefaultSolver, 60);
  REQUIRE(v.status == SolverStatus::Sat);
  CHECK(evaluate_query(vc, v.model));
}

TEST_CASE("a crashing solver command is an error") {
  auto a = artifacts_of("functions", "factorial_fails", {"--unwind", "5"});
  CHECK(error_of([&] { solve_external(a.vcs.back(), "/nonexistent/solver", 10); }) == ErrorCode::SolverCrashed);
}

TEST_CASE("oracle domains narrow on assumption bounds") {
  auto a = artifacts_of("functions", "factorial_fails", {"--unwind", "5"});
  const auto d = oracle_domains(a.vcs.back());
  REQUIRE(d.size() == 1);
  CHECK(d[0].lo == 1);
  CHECK(d[0].hi == 5);
  const Verdict v = solve_oracle(a.vcs.back());
  REQUIRE(v.status == SolverStatus::Sat);
  CHECK(v.model.begin()->second.as_signed() == 5);
}

TEST_CASE("the oracle refuses unbounded and floating-point inputs") {
  auto unbounded = artifacts_of("type_annotation", "inferred_return");
  REQUIRE_FALSE(unbounded.vcs.empty());
  CHECK(error_of([&] { oracle_domains(unbounded.vcs.front()); }) == ErrorCode::DomainTooLarge);
  auto fp = artifacts_of("non-determinism", "nondet_float_range");
  bool saw_fp = false;
  for (const auto& vc : fp.vcs) {
    for (const auto& in : vc.inputs) saw_fp = saw_fp || in.sort().is_fp();
    if (saw_fp) {
      CHECK(error_of([&] { oracle_domains(vc); }) == ErrorCode::UnsupportedSortForOracle);
      break;
    }
  }
  CHECK(saw_fp);
}

TEST_CASE("serial and parallel enumeration return the same first witness") {
  std::mt19937_64 rng(7);
  fixtures::TempDir dir;
  std::size_t sat = 0;
  for (int i = 0; i < 30; ++i) {
    const auto p = oracle::generate_program(rng, 1 << 14);
    RunConfig config;
    config.input = dir.write_json("main", p.ast);
    for (const auto& vc : build_artifacts(config).vcs) {
      const Verdict serial = solve_oracle(vc);
      for (int threads : {1, 2, 4}) {
        const Verdict parallel = solve_oracle_parallel(vc, threads);
        CHECK(parallel.status == serial.status);
        CHECK(parallel.model == serial.model);
      }
      sat += serial.status == SolverStatus::Sat;
    }
  }
  CHECK(sat > 0);
}

TEST_CASE("oracle and solver agree on random programs") {
  std::mt19937_64 rng(11);
  fixtures::TempDir dir;
  oracle::Agreement total;
  for (int i = 0; i < 15; ++i) {
    const auto p = oracle::generate_program(rng);
    RunConfig config;
    config.input = dir.write_json("main", p.ast);
    for (const auto& vc : build_artifacts(config).vcs) total.merge(oracle::compare_solvers(vc, kDefaultSolver));
  }
  CAPTURE(total.first_problem);
  CHECK(total.ok());
  CHECK(total.skipped == 0);
  CHECK(total.checked > 0);
}

TEST_CASE("evaluate_query rejects a non-witness") {
  auto a = artifacts_of("functions", "factorial_fails", {"--unwind", "5"});
  const Vc& vc = a.vcs.back();
  Model m;
  m[ssa_name(vc.inputs.front())] = Value::from_integer(32, 4);
  CHECK_FALSE(evaluate_query(vc, m));
  m[ssa_name(vc.inputs.front())] = Value::from_integer(32, 5);
  CHECK(evaluate_query(vc, m));
}
