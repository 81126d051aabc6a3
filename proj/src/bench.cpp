#include "pybmc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "pybmc/error.hpp"
#include "pybmc/process.hpp"

namespace pybmc {

namespace fs = std::filesystem;

Expectation read_expectation(const std::string& test_dir) {
  const fs::path path = fs::path(test_dir) / "expect";
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingExpectation, "no expect file in " + test_dir);
  Expectation e;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    lines.push_back(line);
  }
  if (lines.empty() || (lines[0] != "FAILED" && lines[0] != "SUCCESSFUL") || lines.size() > 2) {
    throw Error(ErrorCode::MissingExpectation,
                path.string() + " must hold FAILED or SUCCESSFUL and at most one flags line");
  }
  e.verdict = lines[0];
  if (lines.size() == 2) e.flags = split_command(lines[1]);
  return e;
}

bool BenchReport::all_match() const {
  return std::all_of(tests.begin(), tests.end(), [](const BenchTest& t) { return t.matches(); });
}

std::string category_display_name(const std::string& directory) {
  std::string s = directory;
  std::replace(s.begin(), s.end(), '_', ' ');
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::vector<BenchTest> discover_suite(const std::string& suite_dir) {
  if (!fs::is_directory(suite_dir)) throw Error(ErrorCode::Io, "suite directory not found: " + suite_dir);
  std::vector<BenchTest> tests;
  for (const auto& category : fs::directory_iterator(suite_dir)) {
    if (!category.is_directory()) continue;
    for (const auto& test : fs::directory_iterator(category.path())) {
      if (!test.is_directory()) continue;
      BenchTest t;
      t.category = category.path().filename().string();
      t.name = test.path().filename().string();
      if (fs::exists(test.path() / "main.json")) {
        t.input = (test.path() / "main.json").string();
      } else if (fs::exists(test.path() / "main.py")) {
        t.input = (test.path() / "main.py").string();
      } else {
        continue;
      }
      t.expected = read_expectation(test.path().string());
      tests.push_back(std::move(t));
    }
  }
  std::sort(tests.begin(), tests.end(), [](const BenchTest& a, const BenchTest& b) {
    return std::tie(a.category, a.name) < std::tie(b.category, b.name);
  });
  return tests;
}

namespace {

void run_one(BenchTest& t, const BenchOptions& options) {
  std::vector<std::string> argv{options.verifier, t.input};
  argv.insert(argv.end(), t.expected.flags.begin(), t.expected.flags.end());
  argv.insert(argv.end(), options.extra_args.begin(), options.extra_args.end());
  ProcessResult r = run_process(argv, "", options.timeout_seconds);
  t.exit_code = r.exit_code;
  t.wall_seconds = r.wall_seconds;
  t.peak_rss_kb = r.peak_rss_kb;
  t.output = r.out + r.err;
  if (r.timed_out) {
    t.actual = "TIMEOUT";
  } else if (r.term_signal != 0) {
    t.actual = "ERROR";
  } else {
    switch (r.exit_code) {
      case 0: t.actual = "SUCCESSFUL"; break;
      case 1: t.actual = "FAILED"; break;
      case 3: t.actual = "UNKNOWN"; break;
      default: t.actual = "ERROR"; break;
    }
  }
}

}  // namespace

BenchReport run_suite(const std::string& suite_dir, const BenchOptions& options) {
  BenchReport report;
  report.tests = discover_suite(suite_dir);
  const int jobs = std::max(1, options.jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < report.tests.size();) run_one(report.tests[i], options);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (const auto& t : report.tests) {
    const std::string name = category_display_name(t.category);
    if (report.categories.empty() || report.categories.back().name != name) report.categories.push_back({name});
    BenchCategory& c = report.categories.back();
    ++c.tests;
    c.mean_memory_bytes += static_cast<double>(t.peak_rss_kb) * 1024.0;
    c.mean_seconds += t.wall_seconds;
    if (!t.matches()) ++c.mismatches;
  }
  for (auto& c : report.categories) {
    c.mean_memory_bytes /= static_cast<double>(c.tests);
    c.mean_seconds /= static_cast<double>(c.tests);
  }
  return report;
}

std::string render_bench(const BenchReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(22) << "Category" << std::right << std::setw(7) << "Tests" << std::setw(14)
     << "Memory (MB)" << std::setw(12) << "Time (ms)" << std::setw(10) << "Correct" << '\n';
  os << std::string(65, '-') << '\n';
  std::size_t total = 0, correct = 0;
  for (const auto& c : report.categories) {
    total += c.tests;
    correct += c.tests - c.mismatches;
    os << std::left << std::setw(22) << c.name << std::right << std::setw(7) << c.tests << std::fixed
       << std::setprecision(2) << std::setw(14) << c.mean_memory_bytes / (1024.0 * 1024.0) << std::setprecision(1)
       << std::setw(12) << c.mean_seconds * 1000.0 << std::setw(10)
       << (std::to_string(c.tests - c.mismatches) + "/" + std::to_string(c.tests)) << '\n';
  }
  os << std::string(65, '-') << '\n';
  os << std::left << std::setw(22) << "Total" << std::right << std::setw(7) << total << std::setw(36)
     << (std::to_string(correct) + "/" + std::to_string(total)) << "\n\n";
  for (const auto& t : report.tests) {
    os << (t.matches() ? "ok   " : "FAIL ") << t.category << '/' << t.name << ": expected " << t.expected.verdict
       << ", got " << t.actual << std::fixed << std::setprecision(1) << " (" << t.wall_seconds * 1000.0 << " ms, "
       << t.peak_rss_kb / 1024.0 << " MB)\n";
  }
  return os.str();
}

}  // namespace pybmc
