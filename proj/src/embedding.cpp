#include "rtheta/embedding.hpp"

#include <charconv>
#include <set>
#include <stdexcept>

#include "rtheta/errors.hpp"

namespace rtheta {

CodeEmbedding build_embedding(std::span<const ProfileRecord> records, const EmbeddingOptions& options) {
  if (records.empty()) throw EmptyInput("no profile records");
  const std::string& program_id = records.front().program_id;
  for (const auto& r : records)
    if (r.program_id != program_id)
      throw std::invalid_argument("records mix programs '" + program_id + "' and '" + r.program_id + "'");

  std::vector<const ProfileRecord*> usable;
  for (const auto& r : records)
    if (r.exit_code == 0) usable.push_back(&r);
  if (usable.empty()) throw EmptyInput("no successful runs for " + program_id);

  std::set<std::int64_t> sizes;
  for (const auto* r : usable) sizes.insert(r->size_n);
  if (sizes.size() < 3 && !options.impute)
    throw InsufficientData(program_id + ": only " + std::to_string(sizes.size()) + " distinct sizes");

  CodeEmbedding e;
  e.program_id = program_id;
  for (Metric m : kAllMetrics) {
    std::vector<Sample> samples;
    for (const auto* r : usable)
      if (const auto& v = r->metrics[index_of(m)]) samples.push_back({r->size_n, *v});
    const auto aggregated = aggregate_repeats(samples);

    const std::size_t base = embedding_index(m, 0);
    if (aggregated.size() < 3) {
      if (!options.impute)
        throw InsufficientData(program_id + ": metric " + std::string(to_string(m)) + " has " +
                               std::to_string(aggregated.size()) + " usable sizes");
      e.values[base] = kMissingFeatureType;
      e.values[base + 1] = e.values[base + 2] = e.values[base + 3] = 0.0;
      continue;
    }
    const FitQuadruple q = select_best(aggregated, options.select).quadruple;
    e.values[base] = encode_feature_type(q.feature_type);
    e.values[base + 1] = q.feature_config;
    e.values[base + 2] = q.intercept;
    e.values[base + 3] = q.r_val;
  }
  return e;
}

FitQuadruple quadruple_of(const CodeEmbedding& e, Metric m) noexcept {
  const std::size_t base = embedding_index(m, 0);
  FitQuadruple q;
  q.feature_type = static_cast<FamilyKind>(static_cast<int>(e.values[base]));
  q.feature_config = e.values[base + 1];
  q.intercept = e.values[base + 2];
  q.r_val = e.values[base + 3];
  return q;
}

const std::array<std::string, kEmbeddingSize>& embedding_header() {
  static const auto header = [] {
    std::array<std::string, kEmbeddingSize> h;
    for (Metric m : kAllMetrics)
      for (std::size_t s = 0; s < kSlotsPerMetric; ++s)
        h[embedding_index(m, s)] = std::string(to_string(m)) + "." + std::string(kSlotNames[s]);
    return h;
  }();
  return header;
}

EmbeddingRow embedding_to_row(const CodeEmbedding& e) { return {embedding_header(), e.values}; }

CodeEmbedding embedding_from_row(std::string program_id, std::span<const double> values) {
  if (values.size() != kEmbeddingSize)
    throw SchemaMismatch("embedding row has " + std::to_string(values.size()) + " values, expected " +
                         std::to_string(kEmbeddingSize));
  CodeEmbedding e;
  e.program_id = std::move(program_id);
  std::copy(values.begin(), values.end(), e.values.begin());
  return e;
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw MalformedFile("not a number: '" + std::string(text) + "'");
  return v;
}

}  // namespace rtheta
