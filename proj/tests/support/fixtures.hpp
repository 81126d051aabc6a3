#pragma once

// Paths and helpers shared by the unit tests and the acceptance binary.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pybmc/bench.hpp"
#include "pybmc/pipeline.hpp"

namespace fixtures {

std::filesystem::path source_dir();
std::filesystem::path suite_dir();
std::filesystem::path suite_test(const std::string& category, const std::string& name);

// Fresh directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  // Writes `doc` as `<name>.json` and returns its path.
  std::string write_json(const std::string& name, const nlohmann::json& doc) const;

 private:
  std::filesystem::path path_;
};

// Run configuration for `input` with the flags of an `expect` file.
pybmc::RunConfig config_for(const std::string& input, const std::vector<std::string>& flags);

// Every suite test with its configuration.
struct SuiteCase {
  pybmc::BenchTest test;
  pybmc::RunConfig config;
};
std::vector<SuiteCase> suite_cases();

}  // namespace fixtures
