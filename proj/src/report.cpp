#include "pybmc/report.hpp"

#include <iomanip>
#include <sstream>

namespace pybmc {

std::map<std::string, Value> replay(const Model& model, const SsaTrace& trace, std::size_t upto) {
  std::map<std::string, Value> values;
  auto lookup = [&](const Expr& s) {
    auto it = values.find(ssa_name(s));
    return it != values.end() ? it->second : zero_value(s.sort());
  };
  for (std::size_t i = 0; i < upto && i < trace.steps.size(); ++i) {
    const SsaStep& step = trace.steps[i];
    if (step.kind != StepKind::Assignment && step.kind != StepKind::Phi) continue;
    const std::string name = ssa_name(step.lhs);
    if (step.input) {
      auto it = model.find(name);
      values[name] = it != model.end() ? it->second : zero_value(step.lhs.sort());
    } else {
      values[name] = evaluate(step.rhs, lookup);
    }
  }
  return values;
}

Violation build_trace(const Model& model, const SsaTrace& trace, std::size_t assertion_step,
                      const std::vector<Expr>& required) {
  for (const auto& s : required) {
    if (!model.count(ssa_name(s))) throw Error(ErrorCode::IncompleteModel, "model has no value for " + ssa_name(s));
  }
  Violation v;
  v.model = model;
  std::map<std::string, Value> values;
  auto lookup = [&](const Expr& s) {
    auto it = values.find(ssa_name(s));
    return it != values.end() ? it->second : zero_value(s.sort());
  };
  auto holds = [&](const Expr& e) { return !e || evaluate(e, lookup).b; };
  int ordinal = 0;
  for (std::size_t i = 0; i < assertion_step && i < trace.steps.size(); ++i) {
    const SsaStep& step = trace.steps[i];
    if (step.kind == StepKind::Assignment || step.kind == StepKind::Phi) {
      const std::string name = ssa_name(step.lhs);
      if (step.input) {
        auto it = model.find(name);
        values[name] = it != model.end() ? it->second : zero_value(step.lhs.sort());
      } else {
        values[name] = evaluate(step.rhs, lookup);
      }
    }
    if (!holds(step.guard)) continue;
    const bool visible_assignment = step.kind == StepKind::Assignment && !step.hidden && !step.decl;
    const bool printed = visible_assignment && step.input;
    const bool counted =
        printed || (step.depth == 0 && (visible_assignment || step.kind == StepKind::Assumption ||
                                        step.kind == StepKind::Assertion));
    if (counted) ++ordinal;
    if (!printed) continue;
    CounterexampleState state;
    state.ordinal = ordinal;
    state.loc = step.loc;
    const Value& value = values.at(ssa_name(step.lhs));
    bool is_signed = true;
    if (auto t = trace.types.find(step.lhs.name()); t != trace.types.end() && t->second.is(VerifierType::Kind::Int)) {
      is_signed = t->second.is_signed();
    }
    state.assignments.push_back({display_name(step.lhs.name()), format_decimal(value, is_signed), format_binary(value)});
    v.states.push_back(std::move(state));
  }
  const SsaStep& assertion = trace.steps.at(assertion_step);
  v.property_class = assertion.property;
  v.text = assertion.text;
  v.loc = assertion.loc;
  v.ordinal = ordinal + 1;
  return v;
}

int exit_code(const VerificationResult& result) {
  switch (result.outcome) {
    case Outcome::Successful: return 0;
    case Outcome::Failed: return 1;
    case Outcome::Unknown: return 3;
    case Outcome::Error: return result.error && !is_frontend_error(*result.error) ? 3 : 2;
  }
  return 2;
}

namespace {

std::string seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << s << "s";
  return os.str();
}

std::string location_line(const SourceLocation& loc) {
  return "file " + loc.file + " line " + std::to_string(loc.line) + " column " + std::to_string(loc.column);
}

}  // namespace

std::string render_text(const VerificationResult& result) {
  std::ostringstream os;
  os << "pybmc version " << kVersion << " 64-bit\n";
  for (const auto& t : result.timings) {
    if (t.stage == "parse") {
      os << "Parsing " << result.source_name << "\n";
    } else if (t.stage == "annotate") {
      os << "Converting\n";
    } else if (t.stage == "goto") {
      os << "Generating GOTO Program\nGOTO program creation time: " << seconds(t.seconds) << "\n";
    } else if (t.stage == "unwind") {
      os << "GOTO program processing time: " << seconds(t.seconds) << "\n";
    } else if (t.stage == "symex") {
      os << "Symex completed in: " << seconds(t.seconds) << "\n";
      os << "Generated " << result.vcs_total << " VCC(s), " << result.vcs_checked
         << " remaining after simplification\n";
    } else if (t.stage == "solve") {
      os << "Solving with solver " << result.solver << "\n";
      os << "Runtime decision procedure: " << seconds(t.seconds) << "\n";
    }
  }
  switch (result.outcome) {
    case Outcome::Successful:
      os << "\nVERIFICATION SUCCESSFUL\n";
      break;
    case Outcome::Failed:
      os << "Building error trace\n";
      for (const auto& v : result.violations) {
        os << "\n[Counterexample]\n\n";
        for (const auto& s : v.states) {
          os << "State " << s.ordinal << " " << location_line(s.loc) << " thread " << s.thread << "\n";
          os << "-------------------------------------------\n";
          for (const auto& a : s.assignments) os << a.name << " = " << a.decimal << " (" << a.binary << ")\n";
          os << "\n";
        }
        os << "State " << v.ordinal << "  thread 0\n";
        os << "-------------------------------------------\n";
        os << "Violated property:\n";
        os << "  " << location_line(v.loc) << "\n";
        os << "  " << property_class_words(v.property_class) << "\n";
        os << "  " << v.text << "\n";
      }
      os << "\nVERIFICATION FAILED\n";
      break;
    case Outcome::Unknown:
      os << "\n" << result.diagnostic << "\nVERIFICATION UNKNOWN\n";
      break;
    case Outcome::Error:
      os << "ERROR: " << error_code_name(result.error.value_or(ErrorCode::Internal)) << ": " << result.diagnostic;
      if (result.error_location.valid()) os << " at " << result.error_location.to_string();
      os << "\n";
      break;
  }
  return os.str();
}

nlohmann::json render_json(const VerificationResult& result) {
  using nlohmann::json;
  json out;
  static const char* names[] = {"SUCCESSFUL", "FAILED", "UNKNOWN", "ERROR"};
  out["outcome"] = names[static_cast<int>(result.outcome)];
  out["exit_code"] = exit_code(result);
  out["source"] = result.source_name;
  out["version"] = kVersion;
  out["solver"] = result.solver;
  out["vcs"] = {{"generated", result.vcs_total}, {"checked", result.vcs_checked}};
  json timings = json::object();
  for (const auto& t : result.timings) timings[t.stage] = t.seconds;
  out["timings"] = timings;
  json violations = json::array();
  auto loc_json = [](const SourceLocation& l) { return json{{"file", l.file}, {"line", l.line}, {"column", l.column}}; };
  for (const auto& v : result.violations) {
    json states = json::array();
    for (const auto& s : v.states) {
      json assignments = json::array();
      for (const auto& a : s.assignments) {
        assignments.push_back({{"name", a.name}, {"value", a.decimal}, {"binary", a.binary}});
      }
      states.push_back({{"ordinal", s.ordinal}, {"location", loc_json(s.loc)}, {"thread", s.thread},
                        {"assignments", assignments}});
    }
    violations.push_back({{"property_class", std::string(property_class_name(v.property_class))},
                          {"message", v.text},
                          {"location", loc_json(v.loc)},
                          {"ordinal", v.ordinal},
                          {"states", states}});
  }
  out["violations"] = violations;
  if (result.outcome == Outcome::Error || result.outcome == Outcome::Unknown) {
    json err = {{"message", result.diagnostic}};
    if (result.error) err["code"] = std::string(error_code_name(*result.error));
    if (result.error_location.valid()) err["location"] = loc_json(result.error_location);
    out["error"] = err;
  }
  return out;
}

}  // namespace pybmc
