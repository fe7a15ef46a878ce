// rtheta: profile programs, fit complexity embeddings, train and score
// label classifiers.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "rtheta/classify/model_io.hpp"
#include "rtheta/errors.hpp"
#include "rtheta/pipeline.hpp"
#include "rtheta/synthetic.hpp"

namespace fs = std::filesystem;
using namespace rtheta;

namespace {

enum Exit { kOk = 0, kUsage = 1, kEnvironment = 2, kData = 3 };

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string events;
  bool impute = false;
  std::map<std::string, std::string> paths;
};

void set_path(PipelineConfig& c, const std::string& key, const std::string& value) {
  const fs::path p(value);
  if (key == "store") c.store = p;
  else if (key == "embeddings") c.embeddings = p;
  else if (key == "labels") c.labels = p;
  else if (key == "dataset") c.dataset = p;
  else if (key == "models") c.models = p;
  else if (key == "reports") c.reports = p;
  else return;
  if (!c.as_written.contains("paths")) c.as_written["paths"] = nlohmann::ordered_json::object();
  c.as_written["paths"][key] = value;
}

PipelineConfig resolve_config(const Overrides& o) {
  PipelineConfig c = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.events == "fallback")
    c.events = Sampler::fallback;
  else if (o.events == "perf" || o.events == "all")
    c.events = Sampler::perf;
  if (o.impute) c.impute = true;
  for (const auto& [k, v] : o.paths)
    if (!v.empty()) set_path(c, k, v);
  return c;
}

void require_path(const fs::path& p, const char* what) {
  if (p.empty()) throw CLI::ValidationError(std::string("no ") + what + " path; pass it or set it in --config");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical complexity embeddings for programs"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Seed for splits and forests");
  app.add_option("--events", o.events, "Counter source")->check(CLI::IsMember({"all", "perf", "fallback"}));
  app.add_flag("--impute", o.impute, "Fill unfittable metrics with the sentinel quadruple");

  auto* profile = app.add_subcommand("profile", "Run programs over their input manifests");
  std::string binary, manifest, program_id;
  profile->add_option("--binary", binary, "Program to profile");
  profile->add_option("--manifest", manifest, "Input manifest for --binary");
  profile->add_option("--program-id", program_id, "Id recorded for --binary (default: file stem)");
  profile->add_option("--out", o.paths["store"], "Profile store (JSONL, appended)");
  profile->add_option("--timeout-ms", o.paths["timeout_ms"], "Per-run timeout");
  profile->add_option("--perf", o.paths["perf"], "perf executable");

  auto* embed = app.add_subcommand("embed", "Fit every metric of every program into an embedding table");
  embed->add_option("--store", o.paths["store"], "Profile store");
  embed->add_option("--out", o.paths["embeddings"], "Embedding table (CSV)");

  auto* dataset = app.add_subcommand("dataset", "Join embeddings with problem labels");
  dataset->add_option("--embeddings", o.paths["embeddings"], "Embedding table");
  dataset->add_option("--labels", o.paths["labels"], "Label map (JSON)");
  dataset->add_option("--out", o.paths["dataset"], "Dataset file");

  std::vector<std::string> classifiers;
  std::string task, label;
  auto add_learning = [&](CLI::App* sub) {
    sub->add_option("--dataset", o.paths["dataset"], "Dataset file");
    sub->add_option("--models", o.paths["models"], "Model directory");
    sub->add_option("--classifier", classifiers, "tree, forest or boosted (repeatable)")
        ->check(CLI::IsMember({"tree", "forest", "boosted"}));
    sub->add_option("--task", task, "multilabel or binary")->check(CLI::IsMember({"multilabel", "binary"}));
    sub->add_option("--label", label, "Positive label for the binary task");
  };
  auto* train = app.add_subcommand("train", "Split the dataset and train classifiers");
  add_learning(train);
  auto* eval = app.add_subcommand("eval", "Score trained classifiers on the held-out side");
  add_learning(eval);
  eval->add_option("--reports", o.paths["reports"], "Report directory");

  auto* report = app.add_subcommand("report", "Print saved evaluation reports as tables");
  std::vector<std::string> report_files;
  report->add_option("files", report_files, "Report JSON files")->required()->check(CLI::ExistingFile);
  int digits = 2;
  report->add_option("--digits", digits, "Decimal places");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic workload of known growth");
  std::string kind, synth_out;
  int scale = 1, repetitions = 1;
  synth->add_option("--kind", kind, "constant, log, linear, quadratic, cubic, exponential, factorial")->required();
  synth->add_option("--scale", scale, "Work multiplier")->check(CLI::PositiveNumber);
  synth->add_option("--repetitions", repetitions, "Runs per input")->check(CLI::PositiveNumber);
  synth->add_option("--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    PipelineConfig c = resolve_config(o);
    if (!task.empty()) c.task = task == "binary" ? TaskKind::binary : TaskKind::multilabel;
    if (!label.empty()) c.binary_label = label;
    if (!classifiers.empty()) {
      c.classifiers.clear();
      for (const auto& name : classifiers) c.classifiers.push_back(classify::base_learner_from_string(name));
    }

    if (profile->parsed()) {
      if (!o.paths["timeout_ms"].empty()) c.timeout_ms = std::stoll(o.paths["timeout_ms"]);
      if (!o.paths["perf"].empty()) c.perf_path = o.paths["perf"];
      if (!binary.empty() || !manifest.empty()) {
        if (binary.empty() || manifest.empty()) throw CLI::ValidationError("--binary and --manifest go together");
        ProgramSpec p{program_id.empty() ? fs::path(binary).stem().string() : program_id, binary, manifest};
        c.programs = {p};
      }
      require_path(c.store, "store");
      if (c.programs.empty()) throw CLI::ValidationError("no programs; pass --binary/--manifest or list them in --config");
      const auto summary = cmd_profile(c);
      for (const auto& [id, count] : summary.per_program) std::cout << id << ": " << count << " records\n";
      std::cout << summary.total << " records\n";
    } else if (embed->parsed()) {
      require_path(c.store, "store");
      require_path(c.embeddings, "embeddings");
      const auto summary = cmd_embed(c);
      for (const auto& skip : summary.skipped) std::cerr << "skipped " << skip.second << "\n";
      std::cout << summary.rows.size() << " rows x " << kEmbeddingSize << " columns -> " << c.embeddings.string()
                << "\n";
    } else if (dataset->parsed()) {
      require_path(c.embeddings, "embeddings");
      require_path(c.labels, "labels");
      require_path(c.dataset, "dataset");
      const auto rows = cmd_dataset(c);
      std::cout << rows << " labelled rows -> " << c.dataset.string() << "\n";
    } else if (train->parsed()) {
      require_path(c.dataset, "dataset");
      require_path(c.models, "models");
      const auto summary = cmd_train(c);
      for (const auto& d : summary.degenerate) std::cerr << "degenerate labels: " << d << " has no positive\n";
      std::cout << summary.train_ids.size() << " train / " << summary.test_ids.size() << " test\n";
      for (const auto& f : summary.model_files) std::cout << f.string() << "\n";
    } else if (eval->parsed()) {
      require_path(c.dataset, "dataset");
      require_path(c.models, "models");
      require_path(c.reports, "reports");
      const auto summary = cmd_eval(c);
      for (const auto& [base, rep] : summary.reports)
        std::cout << classify::to_string(base) << "\n" << classify::format_report_table(rep) << "\n";
    } else if (report->parsed()) {
      for (const auto& file : report_files) {
        const auto j = nlohmann::ordered_json::parse(read_file(file));
        if (j.value("schema", "") != classify::kReportSchema) throw SchemaMismatch(file + ": not a report");
        std::cout << j.value("classifier", file) << "\n"
                  << classify::format_report_table(classify::report_from_json(j.at("report")), digits) << "\n";
      }
    } else if (synth->parsed()) {
      SyntheticWorkloadSpec spec;
      spec.kind = synthetic_kind_from_string(kind);
      spec.scale = scale;
      spec.seed = c.seed;
      spec.repetitions = repetitions;
      const auto w = generate_synthetic_workload(spec, synth_out);
      std::cout << w.binary.string() << "\n" << w.manifest_path.string() << "\n";
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const ProfilerUnavailable& e) {
    std::cerr << "environment: " << e.what() << "\n";
    return kEnvironment;
  } catch (const CompilerUnavailable& e) {
    std::cerr << "environment: " << e.what() << "\n";
    return kEnvironment;
  } catch (const SpawnError& e) {
    std::cerr << "environment: " << e.what() << "\n";
    return kEnvironment;
  } catch (const Error& e) {
    std::cerr << "data: " << e.what() << "\n";
    return kData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "data: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
