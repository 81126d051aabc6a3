#pragma once

// Reference interpreter working directly on the AST. It shares no code with
// lowering, symbolic execution or the bit-vector helpers: integers are
// unbounded and reduced to their declared width after every operation.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pybmc/ast.hpp"

namespace oracle {

using boost::multiprecision::cpp_int;

struct IntType {
  unsigned width = 32;
  bool is_signed = true;
};

struct PyValue {
  enum class Kind { None, Int, Bool, Float };
  Kind kind = Kind::None;
  cpp_int i;
  IntType type;
  bool literal = false;  // untyped integer literal, adopts the other operand's type
  bool b = false;
  double f = 0.0;

  static PyValue none() { return {}; }
  static PyValue integer(cpp_int v, IntType t, bool literal = false);
  static PyValue boolean(bool v);
  static PyValue real(double v);
  bool truthy() const;
};

struct Outcome {
  enum class Status { Completed, AssertionFailed, DivisionByZero, AssumptionViolated, StepLimit };
  Status status = Status::Completed;
  int line = 0;
  std::string text;  // failing assertion source
  bool violated() const { return status == Status::AssertionFailed || status == Status::DivisionByZero; }
};

// Supplies the value of the ordinal-th nondet call of the given kind
// ("int", "bool", "uint64", ...).
using Inputs = std::function<PyValue(const std::string& kind, std::size_t ordinal)>;

// Inputs from a fixed list, in call order.
Inputs from_list(std::vector<PyValue> values);

// Runs the module top level, or `function` with `args` when given.
Outcome interpret(const pybmc::ast::AstNode& module, const Inputs& inputs, const std::string& function = "",
                  const std::vector<PyValue>& args = {}, std::size_t step_limit = 1000000);

// Result of calling `function` on `args` (Completed with the value in `result`).
Outcome call(const pybmc::ast::AstNode& module, const std::string& function, const std::vector<PyValue>& args,
             PyValue* result);

std::optional<IntType> int_type_named(const std::string& name);

}  // namespace oracle
