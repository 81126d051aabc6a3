#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pybmc {

struct ProcessResult {
  int exit_code = -1;      // valid when the process exited normally
  int term_signal = 0;     // nonzero when killed by a signal
  bool timed_out = false;
  std::string out;
  std::string err;
  double wall_seconds = 0.0;
  long peak_rss_kb = 0;    // ru_maxrss of the child
};

// Spawns argv[0] (PATH lookup), feeds `input` on stdin, collects both output
// streams. A non-positive timeout disables the deadline.
ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input,
                          double timeout_seconds);

std::optional<std::string> find_executable(std::string_view name);

// Whitespace split with single/double quote grouping; no shell expansion.
std::vector<std::string> split_command(std::string_view command);

}  // namespace pybmc
