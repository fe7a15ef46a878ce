#pragma once

// Parser for the profiler's machine-readable stat output:
//   value<SEP>unit<SEP>event-name[<SEP>run-time<SEP>percent...]
// "<not counted>" and "<not supported>" values become nulls.

#include <string_view>

#include "rtheta/metrics.hpp"

namespace rtheta {

struct PerfCounterLine {
  Metric metric;
  std::optional<double> value;
};

/// Parses one counter line. Returns nullopt for blank and '#' comment
/// lines. Throws ParseError (carrying the line verbatim) otherwise.
std::optional<PerfCounterLine> parse_perf_line(std::string_view line, char separator = ',');

/// Parses a whole output file. Repeated events (hybrid CPUs report one line
/// per core type) are summed; a null only survives if every line is null.
MetricValues parse_perf_output(std::string_view text, char separator = ',');

}  // namespace rtheta
