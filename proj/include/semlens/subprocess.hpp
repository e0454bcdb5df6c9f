// Minimal POSIX process runner with wall-clock timeout and output capture.
#pragma once

#include <string>
#include <vector>

namespace semlens {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
  std::string out;
  std::string err;
};

// Runs argv[0] with the given arguments, feeding `stdin_data` and killing the
// whole process group after `timeout_ms`.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& stdin_data, int timeout_ms);

}  // namespace semlens
