#include "rtheta/classify/forest.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rtheta::classify {

std::vector<double> ForestModel::predict_proba(std::span<const double> row) const {
  std::vector<double> votes(static_cast<std::size_t>(n_classes), 0.0);
  for (const auto& t : trees) votes[static_cast<std::size_t>(t.predict(row))] += 1.0;
  for (double& v : votes) v /= static_cast<double>(trees.size());
  return votes;
}

int ForestModel::predict(std::span<const double> row) const {
  const auto p = predict_proba(row);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

ForestModel train_forest(const DataView& x, std::span<const int> y, const ForestParams& params,
                         int n_classes) {
  if (params.n_trees < 1) throw std::invalid_argument("a forest needs at least one tree");
  if (params.feature_subsample < 1) throw std::invalid_argument("feature_subsample must be positive");
  if (x.rows() == 0) throw std::invalid_argument("cannot train a forest on zero rows");

  ForestModel forest;
  forest.feature_subsample = params.feature_subsample;
  std::mt19937_64 master(params.seed);
  for (int t = 0; t < params.n_trees; ++t) forest.tree_seeds.push_back(master());

  const std::size_t n = x.rows();
  for (std::uint64_t tree_seed : forest.tree_seeds) {
    std::mt19937_64 rng(tree_seed);
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows) r = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    const auto k = static_cast<std::size_t>(params.feature_subsample);
    FeatureSampler sampler = [&rng, k](const std::vector<std::size_t>& varying) {
      if (varying.size() <= k) return varying;
      std::vector<std::size_t> chosen;
      chosen.reserve(k);
      std::sample(varying.begin(), varying.end(), std::back_inserter(chosen), k, rng);
      return chosen;
    };
    forest.trees.push_back(train_tree_on(x, y, std::move(rows), params.tree, n_classes, sampler));
  }
  forest.n_classes = forest.trees.front().n_classes;
  forest.degenerate = std::all_of(y.begin(), y.end(), [&](int label) { return label == y.front(); });
  return forest;
}

}  // namespace rtheta::classify
