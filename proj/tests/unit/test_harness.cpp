#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>

#include "rtheta/errors.hpp"
#include "rtheta/harness.hpp"
#include "rtheta/process.hpp"
#include "support/temp_dir.hpp"

using namespace rtheta;
using testing_support::TempDir;
using testing_support::write_file;
using testing_support::write_script;
namespace fs = std::filesystem;

namespace {

const char* kCounters =
    "# fake capture\n"
    "0.50,msec,task-clock,500000,100.00,0.8,CPUs utilized\n"
    "1,,context-switches,500000,100.00,,\n"
    "0,,cpu-migrations,500000,100.00,,\n"
    "60,,page-faults,500000,100.00,,\n"
    "1700000,,cycles,500000,100.00,,\n"
    "<not supported>,,stalled-cycles-frontend,0,100.00,,\n"
    "1300000,,instructions,500000,100.00,,\n"
    "250000,,branches,500000,100.00,,\n"
    "9000,,branch-misses,500000,100.00,,\n";

// A C program built once per test binary; returns empty when no compiler.
fs::path compile(const TempDir& dir, const std::string& name, const std::string& source) {
  const auto src = dir / (name + ".c");
  const auto bin = dir / name;
  write_file(src, source);
  const std::string cmd = "cc -O0 -o '" + bin.string() + "' '" + src.string() + "' 2>/dev/null";
  if (std::system(cmd.c_str()) != 0) return {};
  return bin;
}

InputManifest manifest_of(const TempDir& dir, std::initializer_list<std::int64_t> sizes, int reps) {
  InputManifest m;
  m.problem_id = "demo";
  for (auto n : sizes) {
    const auto p = dir / ("in" + std::to_string(n) + ".txt");
    write_file(p, std::to_string(n) + "\n");
    m.entries.push_back({"n" + std::to_string(n), p, n, reps});
  }
  return m;
}

HarnessOptions fast_options() {
  HarnessOptions o;
  o.arch_tag = "test";
  o.timeout = std::chrono::milliseconds(10'000);
  return o;
}

}  // namespace

TEST(Manifest, RoundTripWithRelativePaths) {
  TempDir dir("manifest");
  auto m = manifest_of(dir, {10, 20, 40}, 2);
  m.input_mode = InputMode::argv_file;
  save_manifest(m, dir / "m.json");
  const auto text = testing_support::read_file(dir / "m.json");
  EXPECT_NE(text.find("\"path\": \"in10.txt\""), std::string::npos) << text;
  EXPECT_NE(text.find("\"input_mode\": \"argv\""), std::string::npos);
  EXPECT_EQ(load_manifest(dir / "m.json"), m);
}

TEST(Manifest, DefaultsAndErrors) {
  TempDir dir("manifest-defaults");
  write_file(dir / "m.json", R"({"problem_id":"p","entries":[{"input_id":"a","path":"x","size_n":3}]})");
  const auto m = load_manifest(dir / "m.json");
  EXPECT_EQ(m.entries.at(0).repetitions, 1);
  EXPECT_EQ(m.input_mode, InputMode::stdin_redirect);
  EXPECT_EQ(m.entries.at(0).path, dir / "x");
  EXPECT_THROW(validate_manifest(m), MalformedFile);

  write_file(dir / "bad.json", R"({"entries":[]})");
  EXPECT_THROW(load_manifest(dir / "bad.json"), MalformedFile);
  EXPECT_THROW(load_manifest(dir / "missing.json"), IOError);

  auto ok = manifest_of(dir, {1, 2, 3}, 1);
  EXPECT_NO_THROW(validate_manifest(ok));
  ok.entries[0].repetitions = 0;
  EXPECT_THROW(validate_manifest(ok), MalformedFile);
}

TEST(Process, ExitCodesSignalsAndTimeout) {
  TempDir dir("process");
  const auto exit3 = write_script(dir / "exit3", "exit 3\n");
  EXPECT_EQ(run_child({exit3.string()}).exit_code, 3);
  const auto segv = write_script(dir / "segv", "kill -SEGV $$\n");
  EXPECT_EQ(run_child({segv.string()}).exit_code, 128 + SIGSEGV);
  const auto sleeper = write_script(dir / "sleeper", "sleep 30\n");
  ChildOptions o;
  o.timeout = std::chrono::milliseconds(200);
  const auto r = run_child({sleeper.string()}, o);
  EXPECT_TRUE(r.timed_out);
  EXPECT_EQ(r.exit_code, kTimeoutExitCode);
  EXPECT_LT(r.wall_seconds, 5.0);
  EXPECT_THROW(run_child({(dir / "nope").string()}), SpawnError);
}

TEST(Process, StdinRedirect) {
  TempDir dir("stdin");
  write_file(dir / "in.txt", "42\n");
  const auto check = write_script(dir / "check", "read v; [ \"$v\" = 42 ] && exit 0; exit 9\n");
  ChildOptions o;
  o.stdin_path = dir / "in.txt";
  EXPECT_EQ(run_child({check.string()}, o).exit_code, 0);
  EXPECT_EQ(run_child({check.string()}).exit_code, 9);
}

TEST(FallbackSample, InstantExit) {
  TempDir dir("fallback-instant");
  const auto bin = compile(dir, "noop", "int main(void) { return 0; }\n");
  if (bin.empty()) GTEST_SKIP() << "no C compiler";
  write_file(dir / "in.txt", "1\n");
  const auto r = fallback_sample(bin, dir / "in.txt", 1, {"p", "q", "i"}, fast_options());
  EXPECT_EQ(r.sampler, Sampler::fallback);
  EXPECT_EQ(r.exit_code, 0);
  ASSERT_TRUE(r.metrics[index_of(Metric::TaskClock)]);
  EXPECT_LT(*r.metrics[index_of(Metric::TaskClock)], 50.0);
  EXPECT_TRUE(r.metrics[index_of(Metric::PageFaults)]);
  EXPECT_TRUE(r.metrics[index_of(Metric::ContextSwitches)]);
  for (auto m : {Metric::BranchMisses, Metric::Branches, Metric::CpuMigrations, Metric::Cycles, Metric::Instructions,
                 Metric::StalledCyclesFrontend})
    EXPECT_FALSE(r.metrics[index_of(m)]) << to_string(m);
}

TEST(FallbackSample, BusyLoop) {
  TempDir dir("fallback-busy");
  const auto bin = compile(dir, "busy",
                           "#include <time.h>\n"
                           "int main(void) { volatile unsigned long x = 0;\n"
                           "  while (clock() < CLOCKS_PER_SEC / 5) ++x; return 0; }\n");
  if (bin.empty()) GTEST_SKIP() << "no C compiler";
  write_file(dir / "in.txt", "1\n");
  const auto r = fallback_sample(bin, dir / "in.txt", 1, {"p", "q", "i"}, fast_options());
  const double ms = r.metrics[index_of(Metric::TaskClock)].value_or(-1);
  EXPECT_GE(ms, 100.0);
  EXPECT_LE(ms, 400.0);
}

TEST(FallbackSample, ExitCodePassthrough) {
  TempDir dir("fallback-exit");
  const auto bin = write_script(dir / "exit3", "exit 3\n");
  write_file(dir / "in.txt", "1\n");
  EXPECT_EQ(fallback_sample(bin, dir / "in.txt", 1, {"p", "q", "i"}, fast_options()).exit_code, 3);
  EXPECT_THROW(fallback_sample(dir / "missing", dir / "in.txt", 1, {}, fast_options()), SpawnError);
}

TEST(ProfileRun, FakeProfiler) {
  TempDir dir("fake-perf");
  HarnessOptions o = fast_options();
  o.perf_path = testing_support::write_fake_perf(dir / "perf", kCounters).string();
  const auto bin = write_script(dir / "exit3", "exit 3\n");
  write_file(dir / "in.txt", "1\n");
  const auto r = profile_run(bin, dir / "in.txt", 7, kAllMetrics, {"prog", "prob", "in"}, o);
  EXPECT_EQ(r.sampler, Sampler::perf);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(r.size_n, 7);
  EXPECT_EQ(r.program_id, "prog");
  EXPECT_EQ(r.metrics[index_of(Metric::Instructions)], 1300000.0);
  EXPECT_EQ(r.metrics[index_of(Metric::TaskClock)], 0.5);
  EXPECT_EQ(r.metrics[index_of(Metric::CpuMigrations)], 0.0);
  EXPECT_FALSE(r.metrics[index_of(Metric::StalledCyclesFrontend)]);

  // Only requested events are kept.
  const Metric two[] = {Metric::Cycles, Metric::Branches};
  const auto partial = profile_run(bin, dir / "in.txt", 7, two, {"prog", "prob", "in"}, o);
  EXPECT_EQ(partial.metrics[index_of(Metric::Cycles)], 1700000.0);
  EXPECT_FALSE(partial.metrics[index_of(Metric::Instructions)]);
}

TEST(ProfileRun, ProfilerMissingOrSilent) {
  TempDir dir("no-perf");
  const auto bin = write_script(dir / "ok", "exit 0\n");
  write_file(dir / "in.txt", "1\n");
  HarnessOptions o = fast_options();
  o.perf_path = (dir / "no-such-perf").string();
  EXPECT_THROW(profile_run(bin, dir / "in.txt", 1, kAllMetrics, {}, o), ProfilerUnavailable);
  o.perf_path = write_script(dir / "denied", "echo 'Access to performance monitoring is restricted' >&2\nexit 255\n").string();
  EXPECT_THROW(profile_run(bin, dir / "in.txt", 1, kAllMetrics, {}, o), ProfilerUnavailable);
}

TEST(ProfileRun, UnknownCounterLineIsParseError) {
  TempDir dir("bad-perf");
  HarnessOptions o = fast_options();
  o.perf_path = testing_support::write_fake_perf(dir / "perf", "12,,l2-misses,1,100.00,,\n").string();
  const auto bin = write_script(dir / "ok", "exit 0\n");
  write_file(dir / "in.txt", "1\n");
  try {
    profile_run(bin, dir / "in.txt", 1, kAllMetrics, {}, o);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), "12,,l2-misses,1,100.00,,");
  }
}

TEST(ProfileRun, RealProfilerNoop) {
  const auto perf = find_executable("perf");
  if (!perf) GTEST_SKIP() << "perf is not installed";
  TempDir dir("real-perf");
  const auto bin = compile(dir, "noop", "int main(void) { return 0; }\n");
  if (bin.empty()) GTEST_SKIP() << "no C compiler";
  write_file(dir / "in.txt", "1\n");
  ProfileRecord r;
  try {
    r = profile_run(bin, dir / "in.txt", 1, kAllMetrics, {"noop", "noop", "in"}, fast_options());
  } catch (const ProfilerUnavailable& e) {
    GTEST_SKIP() << e.what();
  }
  EXPECT_EQ(r.exit_code, 0);
  if (!r.metrics[index_of(Metric::Instructions)]) GTEST_SKIP() << "instructions not counted on this host";
  EXPECT_GT(*r.metrics[index_of(Metric::Instructions)], 0.0);
}

TEST(RunSuite, CardinalityOrderAndStore) {
  TempDir dir("suite");
  const auto bin = write_script(dir / "ok", "read n; exit 0\n");
  const auto m = manifest_of(dir, {10, 20, 30}, 2);
  const ProfileStore store(dir / "store.jsonl");
  std::vector<std::pair<std::chrono::steady_clock::time_point, std::chrono::steady_clock::time_point>> spans;
  SamplingPlan plan;
  plan.sampler = Sampler::fallback;
  const auto records = run_suite(bin, m, plan, "prog", &store, fast_options(),
                                 [&](const ProfileRecord&, auto start, auto stop) { spans.emplace_back(start, stop); });
  ASSERT_EQ(records.size(), 6u);
  EXPECT_EQ(store.count(), 6u);
  const std::vector<std::string> order{"n10", "n10", "n20", "n20", "n30", "n30"};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(records[i].input_id, order[i]);
    EXPECT_EQ(records[i].problem_id, "demo");
    EXPECT_EQ(records[i].program_id, "prog");
  }
  EXPECT_EQ(store.read_all(), records);
  ASSERT_EQ(spans.size(), 6u);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    EXPECT_LE(spans[i].first, spans[i].second);
    if (i > 0) EXPECT_LE(spans[i - 1].second, spans[i].first) << "children overlapped";
  }
}

TEST(RunSuite, FailureIsolation) {
  TempDir dir("suite-crash");
  const auto bin = write_script(dir / "crashy", "read n; [ \"$n\" = 20 ] && kill -SEGV $$; exit 0\n");
  const auto m = manifest_of(dir, {10, 20, 30}, 2);
  SamplingPlan plan;
  plan.sampler = Sampler::fallback;
  const auto records = run_suite(bin, m, plan, "prog", nullptr, fast_options());
  ASSERT_EQ(records.size(), 6u);
  EXPECT_EQ(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.exit_code != 0; }), 2);
  EXPECT_EQ(records[2].exit_code, 128 + SIGSEGV);
}

TEST(RunSuite, TimeoutMarker) {
  TempDir dir("suite-timeout");
  const auto bin = write_script(dir / "slow", "read n; [ \"$n\" = 30 ] && sleep 30; exit 0\n");
  const auto m = manifest_of(dir, {10, 20, 30}, 1);
  SamplingPlan plan;
  plan.sampler = Sampler::fallback;
  auto o = fast_options();
  o.timeout = std::chrono::milliseconds(300);
  const auto records = run_suite(bin, m, plan, "prog", nullptr, o);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[2].exit_code, kTimeoutExitCode);
}

TEST(RunSuite, EmptyManifest) {
  TempDir dir("suite-empty");
  const auto bin = write_script(dir / "ok", "exit 0\n");
  InputManifest m;
  m.problem_id = "demo";
  EXPECT_TRUE(run_suite(bin, m, {}, "prog", nullptr, fast_options()).empty());
}

TEST(RunSuite, ProfilerUnavailableBeforeAnyRecord) {
  TempDir dir("suite-noperf");
  const auto bin = write_script(dir / "ok", "exit 0\n");
  const auto m = manifest_of(dir, {10, 20, 30}, 1);
  const ProfileStore store(dir / "store.jsonl");
  auto o = fast_options();
  o.perf_path = (dir / "absent-perf").string();
  EXPECT_THROW(run_suite(bin, m, {}, "prog", &store, o), ProfilerUnavailable);
  EXPECT_FALSE(fs::exists(store.path()));
}

TEST(RunSuite, FakeProfilerAllMetrics) {
  TempDir dir("suite-fake");
  const auto bin = write_script(dir / "ok", "read n; exit 0\n");
  const auto m = manifest_of(dir, {10, 20, 30}, 1);
  auto o = fast_options();
  o.perf_path = testing_support::write_fake_perf(dir / "perf", kCounters).string();
  const auto records = run_suite(bin, m, {}, "prog", nullptr, o);
  ASSERT_EQ(records.size(), 3u);
  for (const auto& r : records) {
    EXPECT_EQ(r.sampler, Sampler::perf);
    EXPECT_EQ(r.metrics[index_of(Metric::Branches)], 250000.0);
  }
}

TEST(RunSuite, ArgvMode) {
  TempDir dir("suite-argv");
  const auto bin = write_script(dir / "argv", "[ -f \"$1\" ] && exit 0; exit 4\n");
  auto m = manifest_of(dir, {10, 20, 30}, 1);
  SamplingPlan plan;
  plan.sampler = Sampler::fallback;
  for (const auto& r : run_suite(bin, m, plan, "p", nullptr, fast_options())) EXPECT_EQ(r.exit_code, 4);
  m.input_mode = InputMode::argv_file;
  for (const auto& r : run_suite(bin, m, plan, "p", nullptr, fast_options())) EXPECT_EQ(r.exit_code, 0);
}
