#pragma once

// Runs target programs over their input suites and records metric readings.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rtheta/metrics.hpp"
#include "rtheta/profile_record.hpp"

namespace rtheta {

enum class InputMode { stdin_redirect, argv_file };

struct ManifestEntry {
  std::string input_id;
  std::filesystem::path path;
  std::int64_t size_n = 1;
  int repetitions = 1;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct InputManifest {
  std::string problem_id;
  std::vector<ManifestEntry> entries;
  InputMode input_mode = InputMode::stdin_redirect;

  friend bool operator==(const InputManifest&, const InputManifest&) = default;
};

/// Reads a JSON manifest. Relative entry paths resolve against the
/// manifest's directory. Throws MalformedFile / IOError.
InputManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const InputManifest& manifest, const std::filesystem::path& path);

/// Throws MalformedFile unless ids are present, sizes positive, repetitions
/// positive and at least 3 distinct sizes are listed.
void validate_manifest(const InputManifest& manifest);

struct RunIdentity {
  std::string program_id;
  std::string problem_id;
  std::string input_id;
};

struct HarnessOptions {
  std::string perf_path = "perf";
  char separator = ',';
  std::chrono::milliseconds timeout{60'000};
  InputMode input_mode = InputMode::stdin_redirect;
  /// Empty means "detect from the running machine".
  std::string arch_tag;
};

/// "<machine>/<cpu model>" of the running host.
std::string detect_arch_tag();

/// One run under the profiler in stat mode. Throws ProfilerUnavailable when
/// the profiler is missing or produced no counters, ParseError on an
/// unrecognized counter line.
ProfileRecord profile_run(const std::filesystem::path& binary, const std::filesystem::path& input,
                          std::int64_t size_n, std::span<const Metric> events,
                          const RunIdentity& identity, const HarnessOptions& options = {});

/// One run measured through process accounting only: task-clock,
/// context-switches and page-faults. Hardware counters stay null.
ProfileRecord fallback_sample(const std::filesystem::path& binary,
                              const std::filesystem::path& input, std::int64_t size_n,
                              const RunIdentity& identity, const HarnessOptions& options = {});

struct SamplingPlan {
  Sampler sampler = Sampler::perf;
  /// Events requested from the profiler; ignored by the fallback sampler.
  std::vector<Metric> events{kAllMetrics.begin(), kAllMetrics.end()};
};

/// Called once per finished child with its steady-clock start and stop.
using RunObserver = std::function<void(const ProfileRecord&, std::chrono::steady_clock::time_point,
                                       std::chrono::steady_clock::time_point)>;

/// Every (entry x repetition) in manifest order, one child at a time.
/// Records are appended to `store` (when given) as they complete.
std::vector<ProfileRecord> run_suite(const std::filesystem::path& binary,
                                     const InputManifest& manifest, const SamplingPlan& plan,
                                     const std::string& program_id, const ProfileStore* store,
                                     const HarnessOptions& options = {},
                                     const RunObserver& observer = {});

}  // namespace rtheta
