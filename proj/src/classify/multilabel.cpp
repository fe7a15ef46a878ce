#include "rtheta/classify/multilabel.hpp"

#include <stdexcept>
#include <string>

namespace rtheta::classify {

std::string_view to_string(BaseLearner b) noexcept {
  switch (b) {
    case BaseLearner::tree: return "tree";
    case BaseLearner::forest: return "forest";
    case BaseLearner::boosted: return "boosted";
  }
  return "tree";
}

BaseLearner base_learner_from_string(std::string_view name) {
  if (name == "tree") return BaseLearner::tree;
  if (name == "forest") return BaseLearner::forest;
  if (name == "boosted") return BaseLearner::boosted;
  throw std::invalid_argument("unknown classifier: " + std::string(name));
}

double BinaryClassifier::positive_probability(std::span<const double> row) const {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, BoostedModel>) {
          return m.predict_proba(row);
        } else {
          const auto p = m.predict_proba(row);
          return p.size() > 1 ? p[1] : 0.0;
        }
      },
      model);
}

bool BinaryClassifier::degenerate() const {
  return std::visit(
      [](const auto& m) -> bool {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, BoostedModel>)
          return m.constant_class.has_value();
        else
          return m.degenerate;
      },
      model);
}

BinaryClassifier train_binary(const DataView& x, std::span<const int> y, BaseLearner base,
                              const LearnerParams& params) {
  switch (base) {
    case BaseLearner::tree: return {train_tree(x, y, params.tree, 2)};
    case BaseLearner::forest: return {train_forest(x, y, params.forest, 2)};
    case BaseLearner::boosted: return {train_boosted(x, y, params.boost)};
  }
  throw std::invalid_argument("unknown base learner");
}

std::uint32_t MultiLabelModel::predict(std::span<const double> row) const {
  std::uint32_t mask = 0;
  for (std::size_t c = 0; c < per_class.size(); ++c)
    if (per_class[c].predict(row)) mask |= 1u << c;
  return mask;
}

MultiLabelModel train_multilabel(const DataView& x, std::span<const std::uint32_t> masks,
                                 std::size_t n_classes, BaseLearner base, const LearnerParams& params) {
  if (x.rows() != masks.size()) throw std::invalid_argument("feature and label row counts differ");
  if (n_classes == 0 || n_classes > 32) throw std::invalid_argument("n_classes must be in [1, 32]");
  MultiLabelModel model;
  model.base = base;
  std::vector<int> y(masks.size());
  for (std::size_t c = 0; c < n_classes; ++c) {
    bool any_positive = false;
    for (std::size_t i = 0; i < masks.size(); ++i) {
      y[i] = static_cast<int>((masks[i] >> c) & 1u);
      any_positive |= y[i] == 1;
    }
    model.empty_class.push_back(!any_positive);
    model.per_class.push_back(train_binary(x, y, base, params));
  }
  return model;
}

}  // namespace rtheta::classify
