#include "rtheta/perf_parser.hpp"

#include <charconv>
#include <string>
#include <vector>

#include "rtheta/errors.hpp"

namespace rtheta {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

}  // namespace

std::optional<PerfCounterLine> parse_perf_line(std::string_view raw, char separator) {
  const std::string_view line = trim(raw);
  if (line.empty() || line.front() == '#') return std::nullopt;

  const auto fields = split(line, separator);
  if (fields.size() < 3) throw ParseError("counter line has fewer than 3 fields", std::string(raw));

  const auto metric = metric_from_string(fields[2]);
  if (!metric) throw ParseError("unrecognized event name", std::string(raw));

  const std::string_view value_text = trim(fields[0]);
  if (value_text == "<not counted>" || value_text == "<not supported>")
    return PerfCounterLine{*metric, std::nullopt};

  double value = 0.0;
  const auto [end, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
  if (ec != std::errc{} || end != value_text.data() + value_text.size() || value < 0)
    throw ParseError("counter value is not a nonnegative number", std::string(raw));
  return PerfCounterLine{*metric, value};
}

MetricValues parse_perf_output(std::string_view text, char separator) {
  MetricValues values{};
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto line = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
    if (auto parsed = parse_perf_line(line, separator); parsed && parsed->value) {
      auto& slot = values[index_of(parsed->metric)];
      slot = slot.value_or(0.0) + *parsed->value;
    }
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return values;
}

}  // namespace rtheta
