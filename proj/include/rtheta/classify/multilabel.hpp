#pragma once

// One-vs-rest wrappers over the three binary learners.

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "rtheta/classify/boosted.hpp"
#include "rtheta/classify/forest.hpp"
#include "rtheta/classify/tree.hpp"

namespace rtheta::classify {

enum class BaseLearner { tree, forest, boosted };

std::string_view to_string(BaseLearner b) noexcept;
/// Throws std::invalid_argument on unknown names.
BaseLearner base_learner_from_string(std::string_view name);

struct LearnerParams {
  TreeParams tree;
  ForestParams forest;
  BoostParams boost;
};

/// A trained binary model of any kind.
struct BinaryClassifier {
  std::variant<TreeModel, ForestModel, BoostedModel> model;

  /// Probability of the positive class.
  double positive_probability(std::span<const double> row) const;
  /// positive_probability > 0.5.
  bool predict(std::span<const double> row) const { return positive_probability(row) > 0.5; }
  bool degenerate() const;

  friend bool operator==(const BinaryClassifier&, const BinaryClassifier&) = default;
};

/// Trains one binary model; y holds 0/1.
BinaryClassifier train_binary(const DataView& x, std::span<const int> y, BaseLearner base,
                              const LearnerParams& params);

struct MultiLabelModel {
  BaseLearner base = BaseLearner::tree;
  std::vector<BinaryClassifier> per_class;
  /// Classes without a positive training row; their model is constant-negative.
  std::vector<bool> empty_class;

  /// Union of the positive per-class decisions as a bit mask.
  std::uint32_t predict(std::span<const double> row) const;

  friend bool operator==(const MultiLabelModel&, const MultiLabelModel&) = default;
};

/// One-vs-rest over the low `n_classes` bits of each mask.
MultiLabelModel train_multilabel(const DataView& x, std::span<const std::uint32_t> masks,
                                 std::size_t n_classes, BaseLearner base, const LearnerParams& params);

}  // namespace rtheta::classify
