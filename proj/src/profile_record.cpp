#include "rtheta/profile_record.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rtheta/errors.hpp"

namespace rtheta {

using nlohmann::ordered_json;

std::string_view to_string(Sampler s) noexcept { return s == Sampler::perf ? "perf" : "fallback"; }

std::string format_timestamp(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms >= 0 ? ms / 1000 : (ms - 999) / 1000);
  const auto frac = static_cast<int>(ms - static_cast<long long>(secs) * 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

std::chrono::system_clock::time_point parse_timestamp(std::string_view text) {
  std::tm tm{};
  int ms = 0;
  const std::string s(text);
  const int got = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &tm.tm_year, &tm.tm_mon,
                              &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &ms);
  if (got != 7) throw MalformedFile("bad timestamp: " + s);
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const std::time_t secs = timegm(&tm);
  return std::chrono::system_clock::time_point{} + std::chrono::seconds(secs) +
         std::chrono::milliseconds(ms);
}

std::string to_json_line(const ProfileRecord& r) {
  ordered_json metrics = ordered_json::object();
  for (Metric m : kAllMetrics) {
    const auto& v = r.metrics[index_of(m)];
    metrics[std::string(to_string(m))] = v ? ordered_json(*v) : ordered_json(nullptr);
  }
  ordered_json j;
  j["program_id"] = r.program_id;
  j["problem_id"] = r.problem_id;
  j["input_id"] = r.input_id;
  j["size_n"] = r.size_n;
  j["metrics"] = std::move(metrics);
  j["exit_code"] = r.exit_code;
  j["wall_seconds"] = r.wall_seconds;
  j["arch_tag"] = r.arch_tag;
  j["timestamp"] = format_timestamp(r.timestamp);
  j["sampler"] = std::string(to_string(r.sampler));
  return j.dump();
}

ProfileRecord record_from_json_line(std::string_view line) {
  try {
    const auto j = ordered_json::parse(line);
    ProfileRecord r;
    r.program_id = j.at("program_id").get<std::string>();
    r.problem_id = j.at("problem_id").get<std::string>();
    r.input_id = j.at("input_id").get<std::string>();
    r.size_n = j.at("size_n").get<std::int64_t>();
    for (const auto& [name, value] : j.at("metrics").items()) {
      const auto metric = metric_from_string(name);
      if (!metric) throw MalformedFile("unknown metric in record: " + name);
      if (!value.is_null()) r.metrics[index_of(*metric)] = value.get<double>();
    }
    r.exit_code = j.at("exit_code").get<int>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.arch_tag = j.at("arch_tag").get<std::string>();
    r.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
    const auto sampler = j.at("sampler").get<std::string>();
    if (sampler != "perf" && sampler != "fallback") throw MalformedFile("unknown sampler: " + sampler);
    r.sampler = sampler == "perf" ? Sampler::perf : Sampler::fallback;
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(std::string("bad profile record: ") + e.what());
  }
}

void ProfileStore::append(const ProfileRecord& record) const {
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw IOError("cannot open store for append: " + path_.string());
  out << to_json_line(record) << '\n';
  out.flush();
  if (!out) throw IOError("write failed: " + path_.string());
}

std::vector<ProfileRecord> ProfileStore::read_all() const {
  std::vector<ProfileRecord> records;
  if (!std::filesystem::exists(path_)) return records;
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw IOError("cannot read store: " + path_.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json_line(line));
  }
  return records;
}

std::size_t ProfileStore::count() const { return read_all().size(); }

}  // namespace rtheta
