#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <sys/resource.h>

namespace rtheta {

struct ChildOptions {
  /// File connected to the child's standard input; /dev/null when empty.
  std::optional<std::filesystem::path> stdin_path;
  std::chrono::milliseconds timeout{60'000};
};

struct ChildResult {
  /// Exit status, 128+signal when killed by a signal, kTimeoutExitCode on timeout.
  int exit_code = 0;
  bool timed_out = false;
  double wall_seconds = 0.0;
  rusage usage{};
  std::chrono::steady_clock::time_point started;
  std::chrono::steady_clock::time_point finished;
};

/// Runs argv[0] (looked up in PATH) to completion with stdout and stderr
/// discarded. Throws SpawnError if the program cannot be executed.
ChildResult run_child(const std::vector<std::string>& argv, const ChildOptions& options = {});

/// Looks a program up in PATH (or accepts a path containing '/').
std::optional<std::filesystem::path> find_executable(const std::string& name);

}  // namespace rtheta
