#include "rtheta/classify/model_io.hpp"

#include <string>

#include "rtheta/errors.hpp"

namespace rtheta::classify {

using nlohmann::ordered_json;

namespace {

ordered_json nodes_to_json(const std::vector<TreeNode>& nodes) {
  ordered_json arr = ordered_json::array();
  for (const auto& n : nodes) {
    ordered_json j;
    if (!n.is_leaf()) {
      j["feature"] = n.feature;
      j["threshold"] = n.threshold;
      j["left"] = n.left;
      j["right"] = n.right;
    }
    if (!n.class_counts.empty()) j["counts"] = n.class_counts;
    j["value"] = n.value;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<TreeNode> nodes_from_json(const ordered_json& arr) {
  std::vector<TreeNode> nodes;
  for (const auto& j : arr) {
    TreeNode n;
    if (j.contains("feature")) {
      n.feature = j.at("feature").get<int>();
      n.threshold = j.at("threshold").get<double>();
      n.left = j.at("left").get<int>();
      n.right = j.at("right").get<int>();
      if (n.left < 0 || n.right < 0 || static_cast<std::size_t>(n.left) >= arr.size() ||
          static_cast<std::size_t>(n.right) >= arr.size())
        throw MalformedFile("tree node child index out of range");
    }
    if (j.contains("counts")) n.class_counts = j.at("counts").get<std::vector<double>>();
    n.value = j.value("value", 0.0);
    nodes.push_back(std::move(n));
  }
  if (nodes.empty()) throw MalformedFile("tree without nodes");
  return nodes;
}

ordered_json tree_to_json(const TreeModel& t) {
  return {{"n_classes", t.n_classes}, {"n_features", t.n_features}, {"degenerate", t.degenerate},
          {"nodes", nodes_to_json(t.nodes)}};
}

TreeModel tree_from_json(const ordered_json& j) {
  TreeModel t;
  t.n_classes = j.at("n_classes").get<int>();
  t.n_features = j.at("n_features").get<std::size_t>();
  t.degenerate = j.at("degenerate").get<bool>();
  t.nodes = nodes_from_json(j.at("nodes"));
  return t;
}

ordered_json scores_to_json(const ClassScores& s) {
  return {{"name", s.name}, {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
          {"support", s.support}};
}

ClassScores scores_from_json(const ordered_json& j) {
  return {j.at("name").get<std::string>(), j.at("precision").get<double>(), j.at("recall").get<double>(),
          j.at("f1").get<double>(), j.at("support").get<std::size_t>()};
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(std::string("bad model file: ") + e.what());
  }
}

}  // namespace

ordered_json to_json(const BinaryClassifier& model) {
  ordered_json j;
  j["schema"] = kModelSchema;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, TreeModel>) {
          j["kind"] = "tree";
          j["tree"] = tree_to_json(m);
        } else if constexpr (std::is_same_v<M, ForestModel>) {
          j["kind"] = "forest";
          j["feature_subsample"] = m.feature_subsample;
          j["n_classes"] = m.n_classes;
          j["degenerate"] = m.degenerate;
          j["tree_seeds"] = m.tree_seeds;
          j["trees"] = ordered_json::array();
          for (const auto& t : m.trees) j["trees"].push_back(tree_to_json(t));
        } else {
          j["kind"] = "boosted";
          j["learning_rate"] = m.learning_rate;
          j["lambda"] = m.lambda;
          j["constant_class"] = m.constant_class ? ordered_json(*m.constant_class) : ordered_json(nullptr);
          j["trees"] = ordered_json::array();
          for (const auto& t : m.trees) j["trees"].push_back(nodes_to_json(t));
        }
      },
      model.model);
  return j;
}

BinaryClassifier binary_classifier_from_json(const ordered_json& j) {
  return guarded([&] {
    if (j.at("schema").get<std::string>() != kModelSchema) throw SchemaMismatch("unsupported model schema");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "tree") return BinaryClassifier{tree_from_json(j.at("tree"))};
    if (kind == "forest") {
      ForestModel f;
      f.feature_subsample = j.at("feature_subsample").get<int>();
      f.n_classes = j.at("n_classes").get<int>();
      f.degenerate = j.at("degenerate").get<bool>();
      f.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
      for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_json(t));
      return BinaryClassifier{std::move(f)};
    }
    if (kind == "boosted") {
      BoostedModel b;
      b.learning_rate = j.at("learning_rate").get<double>();
      b.lambda = j.at("lambda").get<double>();
      if (!j.at("constant_class").is_null()) b.constant_class = j.at("constant_class").get<int>();
      for (const auto& t : j.at("trees")) b.trees.push_back(nodes_from_json(t));
      return BinaryClassifier{std::move(b)};
    }
    throw MalformedFile("unknown model kind " + kind);
  });
}

ordered_json to_json(const MultiLabelModel& model) {
  ordered_json j;
  j["schema"] = kModelSchema;
  j["kind"] = "multilabel";
  j["base"] = to_string(model.base);
  j["empty_class"] = model.empty_class;
  j["models"] = ordered_json::array();
  for (const auto& m : model.per_class) j["models"].push_back(to_json(m));
  return j;
}

MultiLabelModel multilabel_from_json(const ordered_json& j) {
  return guarded([&] {
    if (j.at("schema").get<std::string>() != kModelSchema) throw SchemaMismatch("unsupported model schema");
    if (j.at("kind").get<std::string>() != "multilabel") throw MalformedFile("not a multi-label model");
    MultiLabelModel m;
    m.base = base_learner_from_string(j.at("base").get<std::string>());
    m.empty_class = j.at("empty_class").get<std::vector<bool>>();
    for (const auto& c : j.at("models")) m.per_class.push_back(binary_classifier_from_json(c));
    if (m.empty_class.size() != m.per_class.size()) throw MalformedFile("class count mismatch");
    return m;
  });
}

ordered_json to_json(const EvalReport& report) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["n_rows"] = report.n_rows;
  j["zero_division"] = report.zero_division;
  j["accuracy"] = report.accuracy ? ordered_json(*report.accuracy) : ordered_json(nullptr);
  j["classes"] = ordered_json::array();
  for (const auto& c : report.classes) j["classes"].push_back(scores_to_json(c));
  j["averages"] = ordered_json::array();
  for (const auto& a : report.averages) j["averages"].push_back(scores_to_json(a));
  return j;
}

EvalReport report_from_json(const ordered_json& j) {
  return guarded([&] {
    if (j.at("schema").get<std::string>() != kReportSchema) throw SchemaMismatch("unsupported report schema");
    EvalReport r;
    r.n_rows = j.at("n_rows").get<std::size_t>();
    r.zero_division = j.at("zero_division").get<std::size_t>();
    if (!j.at("accuracy").is_null()) r.accuracy = j.at("accuracy").get<double>();
    for (const auto& c : j.at("classes")) r.classes.push_back(scores_from_json(c));
    for (const auto& a : j.at("averages")) r.averages.push_back(scores_from_json(a));
    return r;
  });
}

}  // namespace rtheta::classify
