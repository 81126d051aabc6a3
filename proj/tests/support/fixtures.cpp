#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

namespace fixtures {

namespace fs = std::filesystem;

fs::path source_dir() { return fs::path(PYBMC_SOURCE_DIR); }
fs::path suite_dir() { return source_dir() / "suite"; }
fs::path suite_test(const std::string& category, const std::string& name) {
  return suite_dir() / category / name / "main.json";
}

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    fs::path p = fs::temp_directory_path() / ("pybmc-test-" + std::to_string(rd()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string TempDir::write_json(const std::string& name, const nlohmann::json& doc) const {
  const fs::path p = path_ / (name + ".json");
  std::ofstream(p) << doc.dump(2) << '\n';
  return p.string();
}

pybmc::RunConfig config_for(const std::string& input, const std::vector<std::string>& flags) {
  pybmc::RunConfig c;
  c.input = input;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const std::string& f = flags[i];
    auto value = [&]() -> const std::string& {
      if (i + 1 >= flags.size()) throw std::runtime_error(f + " needs a value");
      return flags[++i];
    };
    if (f == "--unwind") {
      c.unwind = static_cast<unsigned>(std::stoul(value()));
    } else if (f == "--function") {
      c.function = value();
    } else if (f == "--int-width") {
      c.int_width = static_cast<unsigned>(std::stoul(value()));
    } else if (f == "--overflow-check") {
      c.overflow_check = true;
    } else if (f == "--no-unwinding-assertions") {
      c.unwinding_assertions = false;
    } else {
      throw std::runtime_error("unsupported suite flag " + f);
    }
  }
  return c;
}

std::vector<SuiteCase> suite_cases() {
  std::vector<SuiteCase> out;
  for (auto& t : pybmc::discover_suite(suite_dir().string())) {
    SuiteCase c{t, config_for(t.input, t.expected.flags)};
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace fixtures
