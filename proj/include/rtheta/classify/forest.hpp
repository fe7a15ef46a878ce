#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rtheta/classify/tree.hpp"

namespace rtheta::classify {

struct ForestParams {
  int n_trees = 100;
  /// Features drawn per node; ceil(sqrt(36)) for code embeddings.
  int feature_subsample = 6;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  TreeParams tree;
};

struct ForestModel {
  std::vector<TreeModel> trees;
  std::vector<std::uint64_t> tree_seeds;
  int feature_subsample = 6;
  int n_classes = 2;
  bool degenerate = false;

  /// Fraction of trees voting for each class.
  std::vector<double> predict_proba(std::span<const double> row) const;
  /// Majority vote; ties go to the lowest class.
  int predict(std::span<const double> row) const;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

/// Bagged CART trees with per-node random feature subsets. Deterministic in
/// (data, params).
ForestModel train_forest(const DataView& x, std::span<const int> y, const ForestParams& params = {},
                         int n_classes = 0);

}  // namespace rtheta::classify
