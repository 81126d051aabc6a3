#pragma once

// Random loop-free programs over at most three small nondeterministic inputs,
// emitted both as Python source and as a JSON AST document.

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace oracle {

struct RandomInput {
  std::string name;
  bool is_bool = false;
  long lo = 0;  // inclusive range for ints
  long hi = 0;
  unsigned long long size() const { return is_bool ? 2 : static_cast<unsigned long long>(hi - lo + 1); }
};

struct RandomProgram {
  std::string source;
  nlohmann::json ast;
  std::vector<RandomInput> inputs;  // in nondet call order
  unsigned long long domain() const;
};

// Keeps the product of the input domains at or below `max_domain`.
RandomProgram generate_program(std::mt19937_64& rng, unsigned long long max_domain = 1ull << 20);

}  // namespace oracle
