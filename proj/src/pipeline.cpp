#include "rtheta/pipeline.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "rtheta/classify/model_io.hpp"
#include "rtheta/errors.hpp"

namespace rtheta {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using classify::BaseLearner;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void require_fresh(const fs::path& path) {
  if (fs::exists(path)) throw IOError("refusing to overwrite existing output " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path.string());
  out << text;
}

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(path.string() + ": " + e.what());
  }
}

std::string task_name(TaskKind t) { return t == TaskKind::multilabel ? "multilabel" : "binary"; }

std::size_t require_label(const std::string& name) {
  const auto idx = label_index(name);
  if (!idx) throw MalformedFile("unknown label '" + name + "'");
  return *idx;
}

classify::Matrix features_of(std::span<const LabeledRow> rows, std::span<const std::size_t> idx) {
  classify::Matrix m;
  m.n_features = kEmbeddingSize;
  for (std::size_t i : idx) m.push_row(rows[i].embedding.values);
  return m;
}

fs::path model_file(const PipelineConfig& c, BaseLearner b) {
  return c.models / (std::string(classify::to_string(b)) + ".json");
}

}  // namespace

PipelineConfig parse_config(const ordered_json& j, const fs::path& base_dir) {
  try {
    PipelineConfig c;
    c.as_written = j;
    c.seed = j.value("seed", std::uint64_t{0});
    const auto events = j.value("events", std::string("perf"));
    if (events == "perf" || events == "all")
      c.events = Sampler::perf;
    else if (events == "fallback")
      c.events = Sampler::fallback;
    else
      throw MalformedFile("events must be perf|all|fallback, got " + events);
    c.impute = j.value("impute", false);
    c.timeout_ms = j.value("timeout_ms", std::int64_t{60'000});
    c.perf_path = j.value("perf_path", std::string("perf"));

    const auto paths = j.value("paths", ordered_json::object());
    auto path_of = [&](const char* key) {
      return paths.contains(key) ? resolve(base_dir, paths.at(key).get<std::string>()) : fs::path();
    };
    c.store = path_of("store");
    c.embeddings = path_of("embeddings");
    c.labels = path_of("labels");
    c.dataset = path_of("dataset");
    c.models = path_of("models");
    c.reports = path_of("reports");

    for (const auto& p : j.value("programs", ordered_json::array())) {
      ProgramSpec spec;
      spec.binary = resolve(base_dir, p.at("binary").get<std::string>());
      spec.manifest = resolve(base_dir, p.at("manifest").get<std::string>());
      spec.program_id = p.value("program_id", spec.binary.stem().string());
      c.programs.push_back(std::move(spec));
    }

    const auto split = j.value("split", ordered_json::object());
    c.train_fraction = split.value("train_fraction", 0.66);
    if (split.contains("stratify_on") && !split.at("stratify_on").is_null())
      c.stratify_on = split.at("stratify_on").get<std::string>();
    c.group_by_problem = split.value("group_by_problem", false);

    const auto task = j.value("task", std::string("multilabel"));
    if (task != "multilabel" && task != "binary") throw MalformedFile("task must be multilabel|binary");
    c.task = task == "binary" ? TaskKind::binary : TaskKind::multilabel;
    c.binary_label = j.value("binary_label", std::string("math"));

    if (j.contains("classifiers")) {
      c.classifiers.clear();
      for (const auto& name : j.at("classifiers"))
        c.classifiers.push_back(classify::base_learner_from_string(name.get<std::string>()));
    }

    const auto tree = j.value("tree", ordered_json::object());
    c.params.tree.max_depth = tree.value("max_depth", 16);
    c.params.tree.min_samples_leaf = tree.value("min_samples_leaf", 1);
    const auto forest = j.value("forest", ordered_json::object());
    c.params.forest.n_trees = forest.value("n_trees", 100);
    c.params.forest.feature_subsample = forest.value("feature_subsample", 6);
    c.params.forest.bootstrap = forest.value("bootstrap", true);
    c.params.forest.tree = c.params.tree;
    const auto boosted = j.value("boosted", ordered_json::object());
    c.params.boost.rounds = boosted.value("rounds", 200);
    c.params.boost.max_depth = boosted.value("max_depth", 6);
    c.params.boost.learning_rate = boosted.value("learning_rate", 0.1);
    c.params.boost.lambda = boosted.value("lambda", 1.0);
    c.params.boost.min_child_weight = boosted.value("min_child_weight", 1.0);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(std::string("bad pipeline config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw MalformedFile(std::string("bad pipeline config: ") + e.what());
  }
}

PipelineConfig load_config(const fs::path& path) { return parse_config(read_json(path), path.parent_path()); }

ordered_json provenance(const PipelineConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["events"] = std::string(to_string(c.events));
  j["impute"] = c.impute;
  j["paths"] = c.as_written.value("paths", ordered_json::object());
  j["split"] = {{"train_fraction", c.train_fraction},
                {"stratify_on", c.stratify_on ? ordered_json(*c.stratify_on) : ordered_json(nullptr)},
                {"group_by_problem", c.group_by_problem}};
  j["task"] = task_name(c.task);
  if (c.task == TaskKind::binary) j["binary_label"] = c.binary_label;
  j["classifiers"] = ordered_json::array();
  for (auto b : c.classifiers) j["classifiers"].push_back(std::string(classify::to_string(b)));
  j["tree"] = {{"max_depth", c.params.tree.max_depth}, {"min_samples_leaf", c.params.tree.min_samples_leaf}};
  j["forest"] = {{"n_trees", c.params.forest.n_trees},
                 {"feature_subsample", c.params.forest.feature_subsample},
                 {"bootstrap", c.params.forest.bootstrap}};
  j["boosted"] = {{"rounds", c.params.boost.rounds},
                  {"max_depth", c.params.boost.max_depth},
                  {"learning_rate", c.params.boost.learning_rate},
                  {"lambda", c.params.boost.lambda},
                  {"min_child_weight", c.params.boost.min_child_weight}};
  return j;
}

ProfileSummary cmd_profile(const PipelineConfig& config) {
  if (config.store.empty()) throw MalformedFile("no profile store path configured");
  std::vector<InputManifest> manifests;
  for (const auto& p : config.programs) {
    if (!fs::exists(p.manifest)) throw IOError("manifest not found: " + p.manifest.string());
    if (!fs::exists(p.binary)) throw IOError("binary not found: " + p.binary.string());
    manifests.push_back(load_manifest(p.manifest));
    validate_manifest(manifests.back());
    for (const auto& e : manifests.back().entries)
      if (!fs::exists(e.path)) throw IOError("input not found: " + e.path.string());
  }

  HarnessOptions options;
  options.perf_path = config.perf_path;
  options.timeout = std::chrono::milliseconds(config.timeout_ms);
  options.arch_tag = detect_arch_tag();
  SamplingPlan plan;
  plan.sampler = config.events;

  if (config.store.has_parent_path()) fs::create_directories(config.store.parent_path());
  const ProfileStore store(config.store);
  ProfileSummary summary;
  for (std::size_t i = 0; i < config.programs.size(); ++i) {
    const auto& p = config.programs[i];
    const auto records = run_suite(p.binary, manifests[i], plan, p.program_id, &store, options);
    summary.per_program.emplace_back(p.program_id, records.size());
    summary.total += records.size();
  }
  return summary;
}

EmbedSummary cmd_embed(const PipelineConfig& config) {
  require_fresh(config.embeddings);
  const auto records = ProfileStore(config.store).read_all();
  if (records.empty()) throw EmptyInput("profile store is empty: " + config.store.string());

  std::map<std::string, std::vector<ProfileRecord>> by_program;
  for (const auto& r : records) by_program[r.program_id].push_back(r);

  EmbeddingOptions options;
  options.impute = config.impute;
  EmbedSummary summary;
  for (const auto& [program, recs] : by_program) {
    try {
      summary.rows.push_back({recs.front().problem_id, build_embedding(recs, options)});
    } catch (const InsufficientData& e) {
      summary.skipped.emplace_back(program, e.what());
    } catch (const EmptyInput& e) {
      summary.skipped.emplace_back(program, e.what());
    }
  }
  if (config.embeddings.has_parent_path()) fs::create_directories(config.embeddings.parent_path());
  save_embedding_table(summary.rows, config.embeddings);
  return summary;
}

std::size_t cmd_dataset(const PipelineConfig& config) {
  require_fresh(config.dataset);
  const auto table = load_embedding_table(config.embeddings);
  const auto labels = ingest_labels(config.labels);
  const auto rows = join_labels(table, labels);
  if (config.dataset.has_parent_path()) fs::create_directories(config.dataset.parent_path());
  save_dataset(rows, config.dataset);
  return rows.size();
}

TrainSummary cmd_train(const PipelineConfig& config) {
  const auto rows = load_dataset(config.dataset);
  for (auto b : config.classifiers) require_fresh(model_file(config, b));
  require_fresh(config.models / "split.json");

  SplitSpec spec;
  spec.train_fraction = config.train_fraction;
  spec.seed = config.seed;
  spec.group_by_problem = config.group_by_problem;
  if (config.stratify_on)
    spec.stratify_on = require_label(*config.stratify_on);
  else if (config.task == TaskKind::binary)
    spec.stratify_on = require_label(config.binary_label);
  const SplitIndices parts = split(rows, spec);

  TrainSummary summary;
  for (auto i : parts.train) summary.train_ids.push_back(rows[i].program_id);
  for (auto i : parts.test) summary.test_ids.push_back(rows[i].program_id);
  fs::create_directories(config.models);
  ordered_json split_json;
  split_json["seed"] = config.seed;
  split_json["train"] = summary.train_ids;
  split_json["test"] = summary.test_ids;
  write_text(config.models / "split.json", split_json.dump(2) + "\n");

  const auto x = features_of(rows, parts.train);
  classify::LearnerParams params = config.params;
  params.forest.seed = config.seed;

  for (auto base : config.classifiers) {
    ordered_json model_json;
    if (config.task == TaskKind::multilabel) {
      std::vector<std::uint32_t> masks;
      for (auto i : parts.train) masks.push_back(rows[i].labels);
      const auto model = classify::train_multilabel(x.view(), masks, kLabelCount, base, params);
      for (std::size_t c = 0; c < kLabelCount; ++c)
        if (model.empty_class[c])
          summary.degenerate.push_back(std::string(classify::to_string(base)) + ":" + std::string(kLabelCatalog[c]));
      model_json = classify::to_json(model);
    } else {
      const std::size_t bit = require_label(config.binary_label);
      std::vector<int> y;
      for (auto i : parts.train) y.push_back((rows[i].labels >> bit) & 1u);
      const auto model = classify::train_binary(x.view(), y, base, params);
      if (model.degenerate())
        summary.degenerate.push_back(std::string(classify::to_string(base)) + ":" + config.binary_label);
      model_json = classify::to_json(model);
    }
    const auto path = model_file(config, base);
    write_text(path, model_json.dump() + "\n");
    summary.model_files.push_back(path);
  }
  return summary;
}

EvalSummary cmd_eval(const PipelineConfig& config) {
  const auto rows = load_dataset(config.dataset);
  const auto split_json = read_json(config.models / "split.json");
  const auto train_ids = split_json.at("train").get<std::vector<std::string>>();
  const auto test_ids = split_json.at("test").get<std::vector<std::string>>();

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < rows.size(); ++i) index[rows[i].program_id] = i;
  std::vector<std::size_t> test;
  for (const auto& id : test_ids) {
    const auto it = index.find(id);
    if (it == index.end()) throw SchemaMismatch("test row " + id + " missing from dataset");
    test.push_back(it->second);
  }

  EvalSummary summary;
  fs::create_directories(config.reports);
  for (auto base : config.classifiers) {
    const auto name = std::string(classify::to_string(base));
    const auto json_path = config.reports / (name + ".json");
    const auto text_path = config.reports / (name + ".txt");
    require_fresh(json_path);
    require_fresh(text_path);
    const auto model_json = read_json(model_file(config, base));

    classify::EvalReport report;
    if (config.task == TaskKind::multilabel) {
      const auto model = classify::multilabel_from_json(model_json);
      std::vector<std::uint32_t> pred, truth;
      for (auto i : test) {
        pred.push_back(model.predict(rows[i].embedding.values));
        truth.push_back(rows[i].labels);
      }
      const std::vector<std::string> names(kLabelCatalog.begin(), kLabelCatalog.end());
      report = classify::evaluate(pred, truth, names);
    } else {
      const auto model = classify::binary_classifier_from_json(model_json);
      const std::size_t bit = require_label(config.binary_label);
      std::vector<int> pred, truth;
      for (auto i : test) {
        pred.push_back(model.predict(rows[i].embedding.values) ? 1 : 0);
        truth.push_back((rows[i].labels >> bit) & 1u);
      }
      report = classify::evaluate_binary(pred, truth, "non-" + config.binary_label, config.binary_label);
    }

    ordered_json out;
    out["schema"] = classify::kReportSchema;
    out["classifier"] = name;
    out["task"] = task_name(config.task);
    out["config"] = provenance(config);
    out["train_ids"] = train_ids;
    out["test_ids"] = test_ids;
    out["report"] = classify::to_json(report);
    write_text(json_path, out.dump(2) + "\n");
    write_text(text_path, classify::format_report_table(report));
    summary.report_files.push_back(json_path);
    summary.report_files.push_back(text_path);
    summary.reports.emplace_back(base, std::move(report));
  }
  return summary;
}

}  // namespace rtheta
