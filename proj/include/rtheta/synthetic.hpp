#pragma once

// Generated programs whose work grows with a known complexity class. They
// are the ground-truth corpus for end-to-end checks of the pipeline.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtheta/harness.hpp"

namespace rtheta {

enum class SyntheticKind { constant, log, linear, quadratic, cubic, exponential, factorial };

inline constexpr std::size_t kSyntheticKindCount = 7;

std::string_view to_string(SyntheticKind kind) noexcept;
/// Throws DomainError on unknown names.
SyntheticKind synthetic_kind_from_string(std::string_view name);

struct SyntheticWorkloadSpec {
  SyntheticKind kind = SyntheticKind::linear;
  /// Work multiplier applied to every unit of work.
  int scale = 1;
  /// Varies the branch pattern and nudges the default size ladder.
  std::uint64_t seed = 0;
  /// Overrides the default size ladder when non-empty.
  std::vector<std::int64_t> sizes;
  int repetitions = 1;
};

struct SyntheticWorkload {
  std::filesystem::path binary;
  std::filesystem::path manifest_path;
  InputManifest manifest;
};

/// The default size ladder for a kind: 10 sizes spanning at least a decade,
/// chosen so the largest run takes tens of milliseconds.
std::vector<std::int64_t> default_sizes(SyntheticKind kind, std::uint64_t seed = 0);

/// C source of the workload program.
std::string synthetic_source(const SyntheticWorkloadSpec& spec);

/// Writes source, binary, inputs and manifest.json into out_dir. Uses $CC,
/// then cc, gcc, clang. Throws CompilerUnavailable if none works.
SyntheticWorkload generate_synthetic_workload(const SyntheticWorkloadSpec& spec,
                                              const std::filesystem::path& out_dir);

}  // namespace rtheta
