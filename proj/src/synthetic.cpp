#include "rtheta/synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rtheta/errors.hpp"
#include "rtheta/process.hpp"

namespace rtheta {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, kSyntheticKindCount> kNames = {
    "constant", "log", "linear", "quadratic", "cubic", "exponential", "factorial"};

// Inner-loop iterations of one work unit, per kind, so that the top of each
// default ladder costs roughly 1e7 iterations.
long unit_iterations(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::constant: return 2'000'000;
    case SyntheticKind::log: return 400'000;
    case SyntheticKind::linear: return 10;
    case SyntheticKind::quadratic: return 1;
    case SyntheticKind::cubic: return 1;
    case SyntheticKind::exponential: return 8;
    case SyntheticKind::factorial: return 30;
  }
  return 1;
}

std::string work_body(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::constant:
      return "  (void)n;\n  for (long s = 0; s < SCALE; ++s) unit();\n";
    case SyntheticKind::log:
      return "  long units = (long)(SCALE * log2((double)n) * 16.0);\n"
             "  for (long k = 0; k < units; ++k) unit_frac();\n";
    case SyntheticKind::linear:
      return "  for (long s = 0; s < SCALE; ++s)\n"
             "    for (long i = 0; i < n; ++i) unit();\n";
    case SyntheticKind::quadratic:
      return "  for (long s = 0; s < SCALE; ++s)\n"
             "    for (long i = 0; i < n; ++i)\n"
             "      for (long j = 0; j < n; ++j) unit();\n";
    case SyntheticKind::cubic:
      return "  for (long s = 0; s < SCALE; ++s)\n"
             "    for (long i = 0; i < n; ++i)\n"
             "      for (long j = 0; j < n; ++j)\n"
             "        for (long k = 0; k < n; ++k) unit();\n";
    case SyntheticKind::exponential:
      return "  for (long s = 0; s < SCALE; ++s) binary_tree(n);\n";
    case SyntheticKind::factorial:
      // Gamma(n) = (n-1)! leaves.
      return "  for (long s = 0; s < SCALE; ++s) permute(n - 1);\n";
  }
  return {};
}

std::vector<std::string> compiler_candidates() {
  std::vector<std::string> out;
  if (const char* cc = std::getenv("CC"); cc && *cc) out.emplace_back(cc);
  for (const char* c : {"cc", "gcc", "clang"}) out.emplace_back(c);
  return out;
}

}  // namespace

std::string_view to_string(SyntheticKind kind) noexcept { return kNames[static_cast<std::size_t>(kind)]; }

SyntheticKind synthetic_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<SyntheticKind>(i);
  throw DomainError("unknown synthetic workload kind: " + std::string(name));
}

std::vector<std::int64_t> default_sizes(SyntheticKind kind, std::uint64_t seed) {
  // Geometric ladders; the seed shifts the bottom rung by up to ~20%.
  const double jitter = 1.0 + 0.2 * static_cast<double>(seed % 5) / 4.0;
  auto ladder = [&](double lo, double hi) {
    std::vector<std::int64_t> sizes;
    const double first = lo * jitter;
    for (int i = 0; i < 10; ++i) {
      const double v = first * std::pow(hi / first, i / 9.0);
      const auto n = static_cast<std::int64_t>(std::llround(v));
      if (sizes.empty() || n > sizes.back()) sizes.push_back(n);
    }
    return sizes;
  };
  switch (kind) {
    case SyntheticKind::constant: return ladder(10, 100'000);
    case SyntheticKind::log: return ladder(4, 1 << 20);
    case SyntheticKind::linear: return ladder(20'000, 1'000'000);
    case SyntheticKind::quadratic: return ladder(250, 3'000);
    case SyntheticKind::cubic: return ladder(16, 260);
    case SyntheticKind::exponential: {
      std::vector<std::int64_t> sizes;
      const auto start = static_cast<std::int64_t>(1 + seed % 2);
      for (std::int64_t n = start; sizes.size() < 10; n += 2) sizes.push_back(n);
      return sizes;
    }
    case SyntheticKind::factorial: {
      std::vector<std::int64_t> sizes;
      for (std::int64_t n = 1; n <= 10; ++n) sizes.push_back(n);
      return sizes;
    }
  }
  return {};
}

std::string synthetic_source(const SyntheticWorkloadSpec& spec) {
  const std::uint64_t seed = spec.seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull;
  std::ostringstream src;
  src << "/* generated workload: " << to_string(spec.kind) << " scale=" << spec.scale
      << " seed=" << spec.seed << " */\n"
      << "#include <math.h>\n#include <stdio.h>\n#include <stdlib.h>\n\n"
      << "#define SCALE " << spec.scale << "L\n"
      << "#define UNIT " << unit_iterations(spec.kind) << "L\n\n"
      << "static volatile unsigned long long sink;\n"
      << "static unsigned long long state = " << seed << "ULL;\n\n"
      << "static void unit(void) {\n"
      << "  for (long i = 0; i < UNIT; ++i) {\n"
      << "    state = state * 6364136223846793005ULL + 1442695040888963407ULL;\n"
      << "    if ((state >> 33) & 1ULL) sink += state; else sink ^= state >> 7;\n"
      << "  }\n}\n\n"
      << "static void unit_frac(void) {\n"
      << "  for (long i = 0; i < UNIT / 16; ++i) {\n"
      << "    state = state * 6364136223846793005ULL + 1442695040888963407ULL;\n"
      << "    if ((state >> 33) & 1ULL) sink += state; else sink ^= state >> 7;\n"
      << "  }\n}\n\n"
      << "static void binary_tree(long depth) {\n"
      << "  if (depth <= 0) { unit(); return; }\n"
      << "  binary_tree(depth - 1);\n  binary_tree(depth - 1);\n}\n\n"
      << "static void permute(long k) {\n"
      << "  if (k <= 1) { unit(); return; }\n"
      << "  for (long i = 0; i < k; ++i) permute(k - 1);\n}\n\n"
      << "static void work(long n) {\n"
      << work_body(spec.kind) << "}\n\n"
      << "int main(int argc, char** argv) {\n"
      << "  FILE* in = argc > 1 ? fopen(argv[1], \"r\") : stdin;\n"
      << "  long n = 0;\n"
      << "  if (!in || fscanf(in, \"%ld\", &n) != 1 || n < 1) return 2;\n"
      << "  (void)binary_tree; (void)permute; (void)unit_frac;\n"
      << "  work(n);\n"
      << "  printf(\"%llu\\n\", sink);\n"
      << "  return 0;\n}\n";
  return src.str();
}

SyntheticWorkload generate_synthetic_workload(const SyntheticWorkloadSpec& spec,
                                              const fs::path& out_dir) {
  fs::create_directories(out_dir / "inputs");
  const fs::path source = out_dir / "workload.c";
  {
    std::ofstream out(source, std::ios::binary);
    if (!out) throw IOError("cannot write " + source.string());
    out << synthetic_source(spec);
  }

  const fs::path binary = out_dir / "workload";
  bool built = false;
  std::string tried;
  for (const auto& cc : compiler_candidates()) {
    if (!find_executable(cc)) continue;
    tried += cc + " ";
    try {
      const auto result = run_child({cc, "-O1", "-o", binary.string(), source.string(), "-lm"});
      if (result.exit_code == 0) {
        built = true;
        break;
      }
    } catch (const SpawnError&) {
    }
  }
  if (!built)
    throw CompilerUnavailable(tried.empty() ? "no C compiler found" : "compilation failed with: " + tried);

  SyntheticWorkload w;
  w.binary = binary;
  w.manifest.problem_id = std::string(to_string(spec.kind));
  const auto sizes = spec.sizes.empty() ? default_sizes(spec.kind, spec.seed) : spec.sizes;
  for (std::int64_t n : sizes) {
    const std::string id = "n" + std::to_string(n);
    const fs::path input = out_dir / "inputs" / (id + ".txt");
    std::ofstream(input, std::ios::binary) << n << '\n';
    w.manifest.entries.push_back({id, input, n, spec.repetitions});
  }
  w.manifest_path = out_dir / "manifest.json";
  save_manifest(w.manifest, w.manifest_path);
  return w;
}

}  // namespace rtheta
