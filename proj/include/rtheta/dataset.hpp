#pragma once

// Labeled embedding datasets: label ingestion, splitting, persistence.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtheta/embedding.hpp"

namespace rtheta {

inline constexpr std::size_t kLabelCount = 11;

/// Algorithm labels, in report order.
inline constexpr std::array<std::string_view, kLabelCount> kLabelCatalog = {
    "strings", "implementation", "greedy", "brute force", "dp", "divide and conquer",
    "graphs",  "binary search",  "math",   "sortings",    "shortest paths"};

/// Bit i set means kLabelCatalog[i] applies.
using LabelMask = std::uint16_t;

std::optional<std::size_t> label_index(std::string_view name) noexcept;
std::vector<std::string> label_names(LabelMask mask);

struct LabelMap {
  std::map<std::string, LabelMask> by_problem;
  /// Labels dropped because they are not in the catalog.
  std::size_t dropped = 0;
};

/// Reads {"problem": ["label", ...], ...}. An empty file is an empty map.
/// Throws MalformedFile / IOError.
LabelMap ingest_labels(const std::filesystem::path& path);
LabelMap parse_labels(std::string_view json_text);
void save_labels(const LabelMap& labels, const std::filesystem::path& path);

struct LabeledRow {
  std::string program_id;
  std::string problem_id;
  CodeEmbedding embedding;
  LabelMask labels = 0;

  friend bool operator==(const LabeledRow&, const LabeledRow&) = default;
};

struct SplitSpec {
  double train_fraction = 0.66;
  std::uint64_t seed = 0;
  /// Catalog index of the label whose ratio must be kept on both sides.
  std::optional<std::size_t> stratify_on;
  /// Keep all rows of a problem on the same side.
  bool group_by_problem = false;
};

/// Row indices, each side sorted ascending.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded split of rows. Throws InsufficientData for fewer than 10 rows,
/// DegenerateStratum when a stratum holds fewer than 2 rows.
SplitIndices split(std::span<const LabeledRow> rows, const SplitSpec& spec);

/// Same, over bare row counts. `stratum` (optional) marks positives,
/// `groups` (optional) carries the grouping key per row.
SplitIndices split_indices(std::size_t n_rows, const SplitSpec& spec,
                           std::span<const bool> stratum = {},
                           std::span<const std::string> groups = {});

/// Dataset file: version line, header line, one CSV row per program. A
/// sidecar "<path>.labels.json" holds the problem -> labels map.
void save_dataset(std::span<const LabeledRow> rows, const std::filesystem::path& path);
/// Throws SchemaMismatch, MalformedFile, IOError. A missing or empty file
/// loads as an empty dataset only if it exists and is empty.
std::vector<LabeledRow> load_dataset(const std::filesystem::path& path);

/// Joins embeddings with the label map on problem_id; programs whose
/// problem has no labels are skipped.
struct EmbeddingTableRow {
  std::string problem_id;
  CodeEmbedding embedding;
  friend bool operator==(const EmbeddingTableRow&, const EmbeddingTableRow&) = default;
};
std::vector<LabeledRow> join_labels(std::span<const EmbeddingTableRow> table, const LabelMap& labels);

/// Embedding table: header line "program_id,problem_id,<36 columns>", then
/// one row per program.
std::string format_embedding_table(std::span<const EmbeddingTableRow> rows);
void save_embedding_table(std::span<const EmbeddingTableRow> rows, const std::filesystem::path& path);
std::vector<EmbeddingTableRow> load_embedding_table(const std::filesystem::path& path);

}  // namespace rtheta
