#include "rtheta/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rtheta/errors.hpp"

namespace rtheta {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kDatasetVersion = "# rtheta-dataset v1";

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void check_id(const std::string& id) {
  if (id.find_first_of(",\n\r") != std::string::npos)
    throw MalformedFile("identifier contains a separator: '" + id + "'");
}

std::size_t train_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path.string());
  out << text;
  if (!out) throw IOError("write failed: " + path.string());
}

}  // namespace

std::optional<std::size_t> label_index(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kLabelCount; ++i)
    if (kLabelCatalog[i] == name) return i;
  return std::nullopt;
}

std::vector<std::string> label_names(LabelMask mask) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < kLabelCount; ++i)
    if (mask & (1u << i)) names.emplace_back(kLabelCatalog[i]);
  return names;
}

LabelMap parse_labels(std::string_view text) {
  LabelMap out;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return out;
  try {
    const auto j = ordered_json::parse(text);
    if (!j.is_object()) throw MalformedFile("label map must be a JSON object");
    for (const auto& [problem, labels] : j.items()) {
      if (!labels.is_array()) throw MalformedFile("labels of " + problem + " are not a list");
      LabelMask mask = 0;
      for (const auto& l : labels) {
        if (auto idx = label_index(l.get<std::string>()))
          mask |= static_cast<LabelMask>(1u << *idx);
        else
          ++out.dropped;
      }
      out.by_problem[problem] = mask;
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(std::string("bad label map: ") + e.what());
  }
  return out;
}

LabelMap ingest_labels(const fs::path& path) { return parse_labels(slurp(path)); }

void save_labels(const LabelMap& labels, const fs::path& path) {
  ordered_json j = ordered_json::object();
  for (const auto& [problem, mask] : labels.by_problem) j[problem] = label_names(mask);
  write_file(path, j.dump(2) + "\n");
}

SplitIndices split_indices(std::size_t n_rows, const SplitSpec& spec, std::span<const bool> stratum,
                           std::span<const std::string> groups) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  if (n_rows < 10) throw InsufficientData("split needs at least 10 rows, got " + std::to_string(n_rows));
  std::mt19937_64 rng(spec.seed);
  SplitIndices out;
  const std::size_t n_train = train_count(n_rows, spec.train_fraction);

  if (!groups.empty()) {
    std::vector<std::string> keys(groups.begin(), groups.end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::shuffle(keys.begin(), keys.end(), rng);
    std::set<std::string> train_groups;
    std::size_t taken = 0;
    for (const auto& k : keys) {
      if (taken >= n_train) break;
      train_groups.insert(k);
      taken += static_cast<std::size_t>(std::count(groups.begin(), groups.end(), k));
    }
    for (std::size_t i = 0; i < n_rows; ++i)
      (train_groups.count(groups[i]) ? out.train : out.test).push_back(i);
    return out;
  }

  if (stratum.empty()) {
    std::vector<std::size_t> order(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  } else {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n_rows; ++i) (stratum[i] ? pos : neg).push_back(i);
    if (pos.size() < 2 || neg.size() < 2)
      throw DegenerateStratum("stratum sizes " + std::to_string(pos.size()) + "/" +
                              std::to_string(neg.size()) + " leave a side with fewer than 2 rows");
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    auto pos_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(pos.size())));
    pos_train = std::min(pos_train, n_train);
    const std::size_t neg_train = std::min(n_train - pos_train, neg.size());
    out.train.insert(out.train.end(), pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(pos_train));
    out.train.insert(out.train.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(neg_train));
    out.test.insert(out.test.end(), pos.begin() + static_cast<std::ptrdiff_t>(pos_train), pos.end());
    out.test.insert(out.test.end(), neg.begin() + static_cast<std::ptrdiff_t>(neg_train), neg.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

SplitIndices split(std::span<const LabeledRow> rows, const SplitSpec& spec) {
  std::vector<std::string> groups;
  if (spec.group_by_problem)
    for (const auto& r : rows) groups.push_back(r.problem_id);
  std::unique_ptr<bool[]> stratum;
  std::span<const bool> stratum_view;
  if (spec.stratify_on && !spec.group_by_problem) {
    if (*spec.stratify_on >= kLabelCount) throw std::invalid_argument("stratify label out of range");
    stratum = std::make_unique<bool[]>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      stratum[i] = (rows[i].labels >> *spec.stratify_on) & 1u;
    stratum_view = {stratum.get(), rows.size()};
  }
  return split_indices(rows.size(), spec, stratum_view, groups);
}

void save_dataset(std::span<const LabeledRow> rows, const fs::path& path) {
  std::string text(kDatasetVersion);
  text += "\nprogram_id,problem_id,labels";
  for (const auto& h : embedding_header()) text += "," + h;
  text += '\n';
  LabelMap sidecar;
  for (const auto& r : rows) {
    check_id(r.program_id);
    check_id(r.problem_id);
    text += r.program_id + "," + r.problem_id + "," + std::to_string(r.labels);
    for (double v : r.embedding.values) text += "," + format_double(v);
    text += '\n';
    sidecar.by_problem[r.problem_id] = r.labels;
  }
  write_file(path, text);
  save_labels(sidecar, fs::path(path.string() + ".labels.json"));
}

std::vector<LabeledRow> load_dataset(const fs::path& path) {
  const std::string text = slurp(path);
  std::vector<LabeledRow> rows;
  if (text.empty()) return rows;

  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != kDatasetVersion) throw SchemaMismatch("unsupported dataset version line: '" + line + "'");
  std::getline(in, line);
  const auto header = split_csv(line);
  if (header.size() != 3 + kEmbeddingSize)
    throw SchemaMismatch("dataset header has " + std::to_string(header.size()) + " columns");
  for (std::size_t i = 0; i < kEmbeddingSize; ++i)
    if (header[3 + i] != embedding_header()[i]) throw SchemaMismatch("unexpected column " + header[3 + i]);

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 3 + kEmbeddingSize)
      throw SchemaMismatch("row for '" + (f.empty() ? std::string() : f[0]) + "' has " +
                           std::to_string(f.size() >= 3 ? f.size() - 3 : 0) + " embedding columns");
    LabeledRow r;
    r.program_id = f[0];
    r.problem_id = f[1];
    const double mask = parse_double(f[2]);
    if (mask < 0 || mask >= (1u << kLabelCount) || mask != std::floor(mask))
      throw MalformedFile("bad label mask " + f[2]);
    r.labels = static_cast<LabelMask>(mask);
    r.embedding.program_id = r.program_id;
    for (std::size_t i = 0; i < kEmbeddingSize; ++i) r.embedding.values[i] = parse_double(f[3 + i]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<LabeledRow> join_labels(std::span<const EmbeddingTableRow> table, const LabelMap& labels) {
  std::vector<LabeledRow> rows;
  for (const auto& t : table) {
    const auto it = labels.by_problem.find(t.problem_id);
    if (it == labels.by_problem.end()) continue;
    rows.push_back({t.embedding.program_id, t.problem_id, t.embedding, it->second});
  }
  return rows;
}

std::string format_embedding_table(std::span<const EmbeddingTableRow> rows) {
  std::string text = "program_id,problem_id";
  for (const auto& h : embedding_header()) text += "," + h;
  text += '\n';
  for (const auto& r : rows) {
    check_id(r.embedding.program_id);
    check_id(r.problem_id);
    text += r.embedding.program_id + "," + r.problem_id;
    for (double v : r.embedding.values) text += "," + format_double(v);
    text += '\n';
  }
  return text;
}

void save_embedding_table(std::span<const EmbeddingTableRow> rows, const fs::path& path) {
  write_file(path, format_embedding_table(rows));
}

std::vector<EmbeddingTableRow> load_embedding_table(const fs::path& path) {
  const std::string text = slurp(path);
  std::vector<EmbeddingTableRow> rows;
  if (text.empty()) return rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (split_csv(line).size() != 2 + kEmbeddingSize)
    throw SchemaMismatch("embedding table header has the wrong column count");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 2 + kEmbeddingSize)
      throw SchemaMismatch("embedding row has " + std::to_string(f.size()) + " columns");
    EmbeddingTableRow r;
    r.problem_id = f[1];
    r.embedding.program_id = f[0];
    for (std::size_t i = 0; i < kEmbeddingSize; ++i) r.embedding.values[i] = parse_double(f[2 + i]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace rtheta
