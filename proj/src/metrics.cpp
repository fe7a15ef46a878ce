#include "rtheta/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace rtheta {

namespace {

constexpr std::array<std::string_view, kMetricCount> kNames = {
    "branch-misses", "branches",     "context-switches",        "cpu-migrations", "cycles",
    "instructions",  "page-faults",  "stalled-cycles-frontend", "task-clock",
};

}  // namespace

std::string_view to_string(Metric m) noexcept { return kNames[index_of(m)]; }

std::optional<Metric> metric_from_string(std::string_view name) noexcept {
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.remove_prefix(1);
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.remove_suffix(1);

  // cpu_core/instructions/  ->  instructions
  if (!name.empty() && name.back() == '/') {
    name.remove_suffix(1);
    if (auto slash = name.find('/'); slash != std::string_view::npos) name.remove_prefix(slash + 1);
  }
  // instructions:u  ->  instructions
  if (auto colon = name.find(':'); colon != std::string_view::npos) name = name.substr(0, colon);

  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "migrations") lowered = "cpu-migrations";
  if (lowered == "cs") lowered = "context-switches";
  if (lowered == "faults") lowered = "page-faults";
  if (lowered == "idle-cycles-frontend") lowered = "stalled-cycles-frontend";

  for (std::size_t i = 0; i < kMetricCount; ++i)
    if (kNames[i] == lowered) return static_cast<Metric>(i);
  return std::nullopt;
}

}  // namespace rtheta
