#pragma once

// The staged pipeline behind the command line: profile -> embed -> dataset
// -> train -> eval. Every stage reads files written by the previous one and
// writes to fresh paths.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtheta/classify/evaluate.hpp"
#include "rtheta/classify/multilabel.hpp"
#include "rtheta/dataset.hpp"
#include "rtheta/embedding.hpp"
#include "rtheta/harness.hpp"

namespace rtheta {

struct ProgramSpec {
  std::string program_id;
  std::filesystem::path binary;
  std::filesystem::path manifest;
};

enum class TaskKind { multilabel, binary };

struct PipelineConfig {
  std::uint64_t seed = 0;
  Sampler events = Sampler::perf;
  bool impute = false;
  std::int64_t timeout_ms = 60'000;
  std::string perf_path = "perf";

  std::filesystem::path store;
  std::filesystem::path embeddings;
  std::filesystem::path labels;
  std::filesystem::path dataset;
  std::filesystem::path models;
  std::filesystem::path reports;
  std::vector<ProgramSpec> programs;

  double train_fraction = 0.66;
  std::optional<std::string> stratify_on;
  bool group_by_problem = false;

  TaskKind task = TaskKind::multilabel;
  std::string binary_label = "math";
  std::vector<classify::BaseLearner> classifiers{classify::BaseLearner::tree};
  classify::LearnerParams params;

  /// Paths as written (before resolution); echoed into reports.
  nlohmann::ordered_json as_written = nlohmann::ordered_json::object();
};

/// Parses a config document. Relative paths resolve against `base_dir`.
/// Throws MalformedFile.
PipelineConfig parse_config(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// The configuration as echoed into reports: relative paths as written, seed
/// and learner parameters after overrides.
nlohmann::ordered_json provenance(const PipelineConfig& config);

struct ProfileSummary {
  std::vector<std::pair<std::string, std::size_t>> per_program;
  std::size_t total = 0;
};

/// Runs every configured program over its manifest. All binaries and
/// manifests are checked before the first child starts.
ProfileSummary cmd_profile(const PipelineConfig& config);

struct EmbedSummary {
  std::vector<EmbeddingTableRow> rows;
  std::vector<std::pair<std::string, std::string>> skipped;
};

/// Builds one embedding per program in the store, ordered by program id.
EmbedSummary cmd_embed(const PipelineConfig& config);

/// Joins the embedding table with the label map into the dataset file.
std::size_t cmd_dataset(const PipelineConfig& config);

struct TrainSummary {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<std::filesystem::path> model_files;
  /// Classes whose training side had no positive (constant-negative model).
  std::vector<std::string> degenerate;
};

/// Splits the dataset once and trains every requested classifier on the same
/// training side.
TrainSummary cmd_train(const PipelineConfig& config);

struct EvalSummary {
  std::vector<std::pair<classify::BaseLearner, classify::EvalReport>> reports;
  std::vector<std::filesystem::path> report_files;
};

/// Scores every trained classifier on the held-out side.
EvalSummary cmd_eval(const PipelineConfig& config);

}  // namespace rtheta
