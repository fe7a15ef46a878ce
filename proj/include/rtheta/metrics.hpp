#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace rtheta {

/// The nine profiled metrics, in canonical (alphabetical) order.
enum class Metric : int {
  BranchMisses = 0,
  Branches,
  ContextSwitches,
  CpuMigrations,
  Cycles,
  Instructions,
  PageFaults,
  StalledCyclesFrontend,
  TaskClock,
};

inline constexpr std::size_t kMetricCount = 9;

inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::BranchMisses, Metric::Branches,     Metric::ContextSwitches,
    Metric::CpuMigrations, Metric::Cycles,      Metric::Instructions,
    Metric::PageFaults,   Metric::StalledCyclesFrontend, Metric::TaskClock,
};

/// Metrics the portable sampler can observe without hardware counters.
inline constexpr std::array<Metric, 3> kFallbackMetrics = {
    Metric::ContextSwitches, Metric::PageFaults, Metric::TaskClock};

constexpr std::size_t index_of(Metric m) noexcept { return static_cast<std::size_t>(m); }

/// Profiler event name, e.g. "branch-misses".
std::string_view to_string(Metric m) noexcept;

/// Accepts the canonical names plus the spellings the profiler prints
/// (mixed case, ":u"/":k" modifiers, "pmu/event/" wrappers).
std::optional<Metric> metric_from_string(std::string_view name) noexcept;

/// One reading per metric; nullopt means not measured.
using MetricValues = std::array<std::optional<double>, kMetricCount>;

}  // namespace rtheta
