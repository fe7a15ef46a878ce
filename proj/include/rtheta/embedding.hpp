#pragma once

// The 36-long code embedding: one fitted quadruple per metric.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rtheta/fitter.hpp"
#include "rtheta/metrics.hpp"
#include "rtheta/profile_record.hpp"

namespace rtheta {

inline constexpr std::size_t kSlotsPerMetric = 4;
inline constexpr std::size_t kEmbeddingSize = kMetricCount * kSlotsPerMetric;  // 36

/// Slot names inside one metric's quadruple.
inline constexpr std::array<std::string_view, kSlotsPerMetric> kSlotNames = {
    "feature_type", "feature_config", "intercept", "r_val"};

/// Written as feature_type for metrics that could not be fitted.
inline constexpr double kMissingFeatureType = -1.0;

struct CodeEmbedding {
  std::string program_id;
  std::array<double, kEmbeddingSize> values{};

  friend bool operator==(const CodeEmbedding&, const CodeEmbedding&) = default;
};

/// Index of (metric, slot) inside CodeEmbedding::values.
constexpr std::size_t embedding_index(Metric m, std::size_t slot) noexcept {
  return index_of(m) * kSlotsPerMetric + slot;
}

struct EmbeddingOptions {
  /// Sentinel (-1, 0, 0, 0) for unfittable metrics instead of failing.
  bool impute = false;
  SelectOptions select;
};

/// Fits every metric of one program's records. Runs with a non-zero
/// exit_code are ignored. Throws EmptyInput for no usable records,
/// InsufficientData in strict mode when a metric has < 3 distinct sizes,
/// std::invalid_argument when records mix program ids.
CodeEmbedding build_embedding(std::span<const ProfileRecord> records,
                              const EmbeddingOptions& options = {});

/// The fit that went into one metric's slots.
FitQuadruple quadruple_of(const CodeEmbedding& e, Metric m) noexcept;

/// "<metric>.<slot>" for all 36 columns in layout order.
const std::array<std::string, kEmbeddingSize>& embedding_header();

struct EmbeddingRow {
  std::array<std::string, kEmbeddingSize> header;
  std::array<double, kEmbeddingSize> values;
};

EmbeddingRow embedding_to_row(const CodeEmbedding& e);
CodeEmbedding embedding_from_row(std::string program_id, std::span<const double> values);

/// Shortest text that parses back to the same double.
std::string format_double(double v);
/// Throws MalformedFile on anything but a complete number.
double parse_double(std::string_view text);

}  // namespace rtheta
