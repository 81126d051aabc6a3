#include "pybmc/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "pybmc/annotate.hpp"
#include "pybmc/ast.hpp"

namespace pybmc {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (unwind < 1) throw Error(ErrorCode::InvalidConfig, "--unwind must be at least 1");
  if (!(timeout_seconds > 0)) throw Error(ErrorCode::InvalidConfig, "--timeout must be positive");
  if (int_width != 32 && int_width != 64) throw Error(ErrorCode::InvalidConfig, "--int-width must be 32 or 64");
  if (solver.empty()) throw Error(ErrorCode::InvalidConfig, "--solver must name a command");
}

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(std::vector<StageTiming>* sink) : sink_(sink) {}
  template <typename F>
  auto time(const char* stage, F&& f) {
    auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
      if (!sink_) return;
      std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
      sink_->push_back({stage, d.count()});
    };
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      finish();
    } else {
      auto r = f();
      finish();
      return r;
    }
  }

 private:
  std::vector<StageTiming>* sink_;
};

void write_scripts(const std::string& path, const std::vector<Vc>& vcs) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path);
  for (std::size_t i = 0; i < vcs.size(); ++i) {
    if (i) os << "(reset)\n";
    os << "; " << property_class_name(vcs[i].property_class) << ": " << vcs[i].text << " at "
       << vcs[i].loc.to_string() << '\n'
       << emit_smtlib(vcs[i]);
  }
}

}  // namespace

Artifacts build_artifacts(const RunConfig& config, std::vector<StageTiming>* timings, std::ostream* dumps) {
  config.validate();
  Stopwatch watch(timings);
  Artifacts a;
  TypingOptions typing{config.int_width};

  ast::ProgramUnit unit = watch.time("parse", [&] {
    ast::ProgramUnit u = ast::load_program(config.input);
    u = ast::resolve_imports(std::move(u), fs::path(config.input).parent_path().string());
    if (config.function) u = ast::isolate_function(std::move(u), *config.function);
    return u;
  });
  if (dumps && config.parse_tree) *dumps << ast::render_parse_tree(unit) << '\n';

  unit = watch.time("annotate", [&] { return infer_and_annotate(std::move(unit), typing); });
  if (dumps && config.dump_annotated) *dumps << annotated_json(unit).dump(2) << '\n';

  watch.time("goto", [&] {
    a.symbols = build_symbol_table(std::move(unit), typing);
    synthesize_entry(*a.symbols);
    a.program = instrument_properties(lower_to_goto(*a.symbols), CheckOptions{config.overflow_check});
  });
  if (dumps && config.show_symbol_table) *dumps << a.symbols->render() << '\n';
  if (dumps && config.show_goto) *dumps << render_goto(a.program) << '\n';

  watch.time("unwind", [&] { a.unwound = unwind(a.program, config.unwind, config.unwinding_assertions); });

  watch.time("symex", [&] {
    a.trace = simplify(execute(a.unwound));
    const auto steps = assertion_steps(a.trace);
    a.vcs_total = count_assertions(a.unwound, PropertyClass::UserAssertion) +
                  count_assertions(a.unwound, PropertyClass::DivisionByZero) +
                  count_assertions(a.unwound, PropertyClass::Overflow) +
                  count_assertions(a.unwound, PropertyClass::Bounds) +
                  count_assertions(a.unwound, PropertyClass::Unwinding);
    for (std::size_t i = 0; i < steps.size(); ++i) {
      Vc vc = generate_vc(a.trace, i);
      // An assertion that folds to true can never fail.
      if (simplify_expr(vc.property).is_true()) continue;
      a.vcs.push_back(std::move(vc));
    }
  });
  if (dumps && config.show_ssa) *dumps << render_ssa(a.trace) << '\n';
  if (config.smt_lib_out) write_scripts(*config.smt_lib_out, a.vcs);
  return a;
}

VerificationResult verify(const RunConfig& config, std::ostream* dumps) {
  VerificationResult result;
  result.source_name = fs::path(config.input).filename().replace_extension(".py").string();
  result.solver = config.solver;
  auto fail = [&](const Error& e) {
    result.outcome = Outcome::Error;
    result.error = e.code();
    result.diagnostic = e.detail();
    result.error_location = e.location();
    result.violations.clear();
  };
  Artifacts a;
  try {
    a = build_artifacts(config, &result.timings, dumps);
  } catch (const Error& e) {
    fail(e);
    return result;
  }
  result.vcs_total = a.vcs_total;
  result.vcs_checked = a.vcs.size();

  const bool oracle = config.solver == kOracleSolver;
  auto start = std::chrono::steady_clock::now();
  std::vector<std::string> undecided;
  try {
    auto consider = [&](const Vc& vc, const Verdict& v) {
      switch (v.status) {
        case SolverStatus::Sat:
          result.violations.push_back(build_trace(v.model, a.trace, vc.step, oracle ? std::vector<Expr>{} : vc.inputs));
          break;
        case SolverStatus::Unsat: break;
        case SolverStatus::Unknown:
        case SolverStatus::Timeout:
          undecided.push_back(std::string(solver_status_name(v.status)) + " on " + vc.text + " at " +
                              vc.loc.to_string() + (v.reason.empty() ? "" : ": " + v.reason));
          break;
      }
    };
    if (config.multi_property && !oracle) {
      auto verdicts = solve_external_batch(a.vcs, config.solver, config.timeout_seconds);
      for (std::size_t i = 0; i < a.vcs.size(); ++i) consider(a.vcs[i], verdicts[i]);
    } else {
      for (const auto& vc : a.vcs) {
        consider(vc, oracle ? solve_oracle_parallel(vc) : solve_external(vc, config.solver, config.timeout_seconds));
        if (!result.violations.empty() && !config.multi_property) break;
      }
    }
  } catch (const Error& e) {
    fail(e);
  }
  std::chrono::duration<double> solving = std::chrono::steady_clock::now() - start;
  result.timings.push_back({"solve", solving.count()});
  if (result.outcome == Outcome::Error) return result;

  if (!result.violations.empty()) {
    result.outcome = Outcome::Failed;
  } else if (!undecided.empty()) {
    result.outcome = Outcome::Unknown;
    for (const auto& u : undecided) result.diagnostic += (result.diagnostic.empty() ? "" : "\n") + u;
  } else {
    result.outcome = Outcome::Successful;
  }
  return result;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::ostream& dumps = config.output == OutputFormat::Json ? err : out;
  VerificationResult result = verify(config, &dumps);
  if (config.output == OutputFormat::Json) {
    out << render_json(result).dump(2) << '\n';
  } else {
    std::string text = render_text(result);
    (result.outcome == Outcome::Error ? err : out) << text;
  }
  return exit_code(result);
}

}  // namespace pybmc
