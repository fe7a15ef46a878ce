#pragma once

// Second-order gradient boosting of regression trees under logistic loss.

#include <optional>
#include <span>
#include <vector>

#include "rtheta/classify/tree.hpp"

namespace rtheta::classify {

struct BoostParams {
  int rounds = 200;
  int max_depth = 6;
  double learning_rate = 0.1;
  /// L2 penalty on leaf weights.
  double lambda = 1.0;
  /// Minimum hessian sum in each child of a split.
  double min_child_weight = 1.0;
};

struct BoostedModel {
  /// Leaves store the weight -G/(H+lambda) in TreeNode::value.
  std::vector<std::vector<TreeNode>> trees;
  double learning_rate = 0.1;
  double lambda = 1.0;
  /// Set when training saw a single class; predictions are then constant.
  std::optional<int> constant_class;

  /// learning_rate * sum of the leaf weights reached by `row`.
  double raw_score(std::span<const double> row) const;
  /// Logistic link of raw_score.
  double predict_proba(std::span<const double> row) const;
  int predict(std::span<const double> row) const { return predict_proba(row) > 0.5 ? 1 : 0; }

  friend bool operator==(const BoostedModel&, const BoostedModel&) = default;
};

/// Split gain 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)].
double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda) noexcept;

/// Gains within this relative distance of the best count as ties (lowest
/// feature, then lowest threshold wins).
inline constexpr double kGainTieTolerance = 1e-12;

/// Per-round callback with the round index and the training logistic loss
/// after that round.
using BoostObserver = std::function<void(int, double)>;

/// y must hold 0/1 labels.
BoostedModel train_boosted(const DataView& x, std::span<const int> y, const BoostParams& params = {},
                           const BoostObserver& observer = {});

/// Mean logistic loss of raw margins against 0/1 labels.
double logistic_loss(std::span<const double> margins, std::span<const int> y);

}  // namespace rtheta::classify
