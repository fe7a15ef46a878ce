#pragma once

// CART classification trees with Gini impurity.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rtheta/classify/data.hpp"

namespace rtheta::classify {

/// Internal nodes route x[feature] <= threshold to `left`. Leaves carry
/// class counts (classification) or a score (boosting).
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> class_counts;
  double value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Index of the leaf reached by `row`, starting at node 0.
std::size_t find_leaf(std::span<const TreeNode> nodes, std::span<const double> row) noexcept;

std::size_t tree_depth(std::span<const TreeNode> nodes) noexcept;

struct TreeParams {
  int max_depth = 16;
  int min_samples_leaf = 1;
};

struct TreeModel {
  int n_classes = 2;
  std::size_t n_features = 0;
  std::vector<TreeNode> nodes;
  /// Trained on a single class; the model is one leaf.
  bool degenerate = false;

  std::vector<double> predict_proba(std::span<const double> row) const;
  int predict(std::span<const double> row) const;
  std::size_t depth() const noexcept { return tree_depth(nodes); }

  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

/// Chooses the features a node may split on, given those that are not
/// constant inside the node (ascending). Must return an ascending subset.
using FeatureSampler = std::function<std::vector<std::size_t>(const std::vector<std::size_t>&)>;

/// Greedy CART. Splits minimise the weighted Gini impurity of the children
/// over midpoints between consecutive distinct values; ties go to the lowest
/// feature index, then the lowest threshold. `n_classes` of 0 means
/// max(y) + 1 (at least 2).
TreeModel train_tree(const DataView& x, std::span<const int> y, const TreeParams& params = {},
                     int n_classes = 0);

/// Same, over a multiset of row indices (bootstrap resamples) with an
/// optional per-node feature sampler.
TreeModel train_tree_on(const DataView& x, std::span<const int> y, std::vector<std::size_t> rows,
                        const TreeParams& params, int n_classes, const FeatureSampler& sampler);

}  // namespace rtheta::classify
