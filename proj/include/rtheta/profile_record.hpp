#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rtheta/metrics.hpp"

namespace rtheta {

enum class Sampler { perf, fallback };

std::string_view to_string(Sampler s) noexcept;

/// exit_code written for a run killed by the wall-clock timeout.
inline constexpr int kTimeoutExitCode = -1;

/// Metric readings of one execution of one program on one input.
struct ProfileRecord {
  std::string program_id;
  std::string problem_id;
  std::string input_id;
  std::int64_t size_n = 1;
  MetricValues metrics{};
  int exit_code = 0;
  double wall_seconds = 0.0;
  std::string arch_tag;
  std::chrono::system_clock::time_point timestamp{};
  Sampler sampler = Sampler::perf;

  friend bool operator==(const ProfileRecord&, const ProfileRecord&) = default;
};

/// One self-contained JSON object, no trailing newline.
std::string to_json_line(const ProfileRecord& record);

/// Throws MalformedFile on invalid input.
ProfileRecord record_from_json_line(std::string_view line);

/// ISO-8601 UTC with millisecond precision, e.g. 2024-05-01T12:00:00.123Z.
std::string format_timestamp(std::chrono::system_clock::time_point t);
std::chrono::system_clock::time_point parse_timestamp(std::string_view text);

/// Append-only line-delimited record store. One writer at a time.
class ProfileStore {
 public:
  explicit ProfileStore(std::filesystem::path path) : path_(std::move(path)) {}

  const std::filesystem::path& path() const noexcept { return path_; }

  /// Writes one line and flushes it. Throws IOError.
  void append(const ProfileRecord& record) const;

  /// Every record in file order; a missing file reads as empty.
  std::vector<ProfileRecord> read_all() const;

  std::size_t count() const;

 private:
  std::filesystem::path path_;
};

}  // namespace rtheta
