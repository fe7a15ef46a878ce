#include "rtheta/harness.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/utsname.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "rtheta/errors.hpp"
#include "rtheta/perf_parser.hpp"
#include "rtheta/process.hpp"

namespace rtheta {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// exit_code markers for runs that never produced a child status.
constexpr int kSpawnFailedExitCode = 127;
constexpr int kProfilerFailedExitCode = -2;

struct Measured {
  ProfileRecord record;
  std::chrono::steady_clock::time_point started;
  std::chrono::steady_clock::time_point finished;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_executable(const fs::path& binary) {
  if (::access(binary.c_str(), X_OK) != 0 || !fs::is_regular_file(binary))
    throw SpawnError("not an executable file: " + binary.string());
}

ProfileRecord base_record(const RunIdentity& id, std::int64_t size_n, Sampler sampler,
                          const HarnessOptions& options) {
  ProfileRecord r;
  r.program_id = id.program_id;
  r.problem_id = id.problem_id;
  r.input_id = id.input_id;
  r.size_n = size_n;
  r.sampler = sampler;
  r.arch_tag = options.arch_tag.empty() ? detect_arch_tag() : options.arch_tag;
  r.timestamp = std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
  return r;
}

std::vector<std::string> workload_argv(const fs::path& binary, const fs::path& input,
                                       InputMode mode) {
  std::vector<std::string> argv{binary.string()};
  if (mode == InputMode::argv_file) argv.push_back(input.string());
  return argv;
}

ChildOptions workload_child_options(const fs::path& input, const HarnessOptions& options) {
  ChildOptions child;
  child.timeout = options.timeout;
  if (options.input_mode == InputMode::stdin_redirect) child.stdin_path = input;
  return child;
}

class TempFile {
 public:
  TempFile() {
    std::string tmpl = (fs::temp_directory_path() / "rtheta-perf-XXXXXX").string();
    const int fd = ::mkstemp(tmpl.data());
    if (fd < 0) throw IOError("cannot create temporary file");
    ::close(fd);
    path_ = tmpl;
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

Measured measure_with_perf(const fs::path& binary, const fs::path& input, std::int64_t size_n,
                           std::span<const Metric> events, const RunIdentity& identity,
                           const HarnessOptions& options) {
  require_executable(binary);
  const auto perf = find_executable(options.perf_path);
  if (!perf) throw ProfilerUnavailable("profiler not found: " + options.perf_path);

  std::string event_list;
  for (Metric m : events) {
    if (!event_list.empty()) event_list += ',';
    event_list += to_string(m);
  }

  TempFile out;
  std::vector<std::string> argv{perf->string(), "stat", "-x", std::string(1, options.separator),
                                "-o", out.path().string()};
  if (!event_list.empty()) {
    argv.push_back("-e");
    argv.push_back(event_list);
  }
  argv.push_back("--");
  for (auto& a : workload_argv(binary, input, options.input_mode)) argv.push_back(std::move(a));

  ProfileRecord record = base_record(identity, size_n, Sampler::perf, options);
  ChildResult child;
  try {
    child = run_child(argv, workload_child_options(input, options));
  } catch (const SpawnError& e) {
    throw ProfilerUnavailable(e.what());
  }
  record.exit_code = child.exit_code;
  record.wall_seconds = child.wall_seconds;
  if (child.timed_out) return {record, child.started, child.finished};

  const std::string text = read_file(out.path());
  std::size_t counter_lines = 0;
  {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line))
      if (parse_perf_line(line, options.separator)) ++counter_lines;
  }
  if (counter_lines == 0)
    throw ProfilerUnavailable("profiler produced no counters (exit " +
                              std::to_string(child.exit_code) + "): " + text);

  const MetricValues parsed = parse_perf_output(text, options.separator);
  for (Metric m : events) record.metrics[index_of(m)] = parsed[index_of(m)];
  return {record, child.started, child.finished};
}

Measured measure_fallback(const fs::path& binary, const fs::path& input, std::int64_t size_n,
                          const RunIdentity& identity, const HarnessOptions& options) {
  require_executable(binary);
  ProfileRecord record = base_record(identity, size_n, Sampler::fallback, options);
  const ChildResult child =
      run_child(workload_argv(binary, input, options.input_mode), workload_child_options(input, options));
  record.exit_code = child.exit_code;
  record.wall_seconds = child.wall_seconds;
  const rusage& ru = child.usage;
  const double cpu_ms = (static_cast<double>(ru.ru_utime.tv_sec) + static_cast<double>(ru.ru_stime.tv_sec)) * 1e3 +
                        (static_cast<double>(ru.ru_utime.tv_usec) + static_cast<double>(ru.ru_stime.tv_usec)) / 1e3;
  record.metrics[index_of(Metric::TaskClock)] = cpu_ms;
  record.metrics[index_of(Metric::ContextSwitches)] = static_cast<double>(ru.ru_nvcsw + ru.ru_nivcsw);
  record.metrics[index_of(Metric::PageFaults)] = static_cast<double>(ru.ru_minflt + ru.ru_majflt);
  return {record, child.started, child.finished};
}

}  // namespace

std::string detect_arch_tag() {
  utsname u{};
  std::string tag = ::uname(&u) == 0 ? u.machine : "unknown";
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("model name", 0) == 0) {
      if (auto colon = line.find(':'); colon != std::string::npos) {
        auto model = line.substr(colon + 1);
        model.erase(0, model.find_first_not_of(' '));
        tag += "/" + model;
      }
      break;
    }
  }
  return tag;
}

InputManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read manifest: " + path.string());
  try {
    const auto j = ordered_json::parse(in);
    InputManifest m;
    m.problem_id = j.at("problem_id").get<std::string>();
    const auto mode = j.value("input_mode", std::string("stdin"));
    if (mode != "stdin" && mode != "argv") throw MalformedFile("unknown input_mode: " + mode);
    m.input_mode = mode == "stdin" ? InputMode::stdin_redirect : InputMode::argv_file;
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.input_id = e.at("input_id").get<std::string>();
      entry.path = e.at("path").get<std::string>();
      if (entry.path.is_relative()) entry.path = path.parent_path() / entry.path;
      entry.size_n = e.at("size_n").get<std::int64_t>();
      entry.repetitions = e.value("repetitions", 1);
      m.entries.push_back(std::move(entry));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile("bad manifest " + path.string() + ": " + e.what());
  }
}

void save_manifest(const InputManifest& manifest, const fs::path& path) {
  ordered_json j;
  j["problem_id"] = manifest.problem_id;
  j["input_mode"] = manifest.input_mode == InputMode::stdin_redirect ? "stdin" : "argv";
  j["entries"] = ordered_json::array();
  const auto base = path.parent_path();
  for (const auto& e : manifest.entries) {
    ordered_json entry;
    entry["input_id"] = e.input_id;
    const auto rel = e.path.lexically_relative(base.empty() ? fs::path(".") : base);
    entry["path"] = (rel.empty() || *rel.begin() == "..") ? e.path.string() : rel.string();
    entry["size_n"] = e.size_n;
    entry["repetitions"] = e.repetitions;
    j["entries"].push_back(std::move(entry));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write manifest: " + path.string());
  out << j.dump(2) << '\n';
}

void validate_manifest(const InputManifest& manifest) {
  if (manifest.problem_id.empty()) throw MalformedFile("manifest has no problem_id");
  std::set<std::int64_t> sizes;
  for (const auto& e : manifest.entries) {
    if (e.input_id.empty()) throw MalformedFile("manifest entry without input_id");
    if (e.size_n < 1) throw MalformedFile("size_n must be positive for " + e.input_id);
    if (e.repetitions < 1) throw MalformedFile("repetitions must be positive for " + e.input_id);
    sizes.insert(e.size_n);
  }
  if (sizes.size() < 3)
    throw MalformedFile("manifest " + manifest.problem_id + " lists fewer than 3 distinct sizes");
}

ProfileRecord profile_run(const fs::path& binary, const fs::path& input, std::int64_t size_n,
                          std::span<const Metric> events, const RunIdentity& identity,
                          const HarnessOptions& options) {
  return measure_with_perf(binary, input, size_n, events, identity, options).record;
}

ProfileRecord fallback_sample(const fs::path& binary, const fs::path& input, std::int64_t size_n,
                              const RunIdentity& identity, const HarnessOptions& options) {
  return measure_fallback(binary, input, size_n, identity, options).record;
}

std::vector<ProfileRecord> run_suite(const fs::path& binary, const InputManifest& manifest,
                                     const SamplingPlan& plan, const std::string& program_id,
                                     const ProfileStore* store, const HarnessOptions& options,
                                     const RunObserver& observer) {
  HarnessOptions opts = options;
  opts.input_mode = manifest.input_mode;
  if (opts.arch_tag.empty()) opts.arch_tag = detect_arch_tag();

  std::vector<ProfileRecord> records;
  for (const auto& entry : manifest.entries) {
    const RunIdentity identity{program_id, manifest.problem_id, entry.input_id};
    for (int rep = 0; rep < entry.repetitions; ++rep) {
      Measured m;
      try {
        m = plan.sampler == Sampler::perf
                ? measure_with_perf(binary, entry.path, entry.size_n, plan.events, identity, opts)
                : measure_fallback(binary, entry.path, entry.size_n, identity, opts);
      } catch (const ProfilerUnavailable&) {
        if (records.empty()) throw;
        m.record = base_record(identity, entry.size_n, plan.sampler, opts);
        m.record.exit_code = kProfilerFailedExitCode;
        m.started = m.finished = std::chrono::steady_clock::now();
      } catch (const SpawnError&) {
        m.record = base_record(identity, entry.size_n, plan.sampler, opts);
        m.record.exit_code = kSpawnFailedExitCode;
        m.started = m.finished = std::chrono::steady_clock::now();
      }
      if (store) store->append(m.record);
      if (observer) observer(m.record, m.started, m.finished);
      records.push_back(std::move(m.record));
    }
  }
  return records;
}

}  // namespace rtheta
