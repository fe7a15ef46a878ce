#include "rtheta/classify/tree.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace rtheta::classify {

namespace {

using u128 = unsigned __int128;

// Weighted child Gini is N - S with S = sum_k a_k^2/n_L + sum_k b_k^2/n_R,
// so the best split maximises S. S is kept as an exact fraction num/den.
struct SplitScore {
  u128 num = 0;
  u128 den = 0;  // 0 marks "no split yet"

  bool better_than(const SplitScore& other) const noexcept {
    if (other.den == 0) return true;
    return num * other.den > other.num * den;
  }
};

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  SplitScore score;
};

double midpoint_threshold(double lo, double hi) {
  const double mid = std::midpoint(lo, hi);
  return mid < hi ? mid : lo;
}

class Builder {
 public:
  Builder(const DataView& x, std::span<const int> y, int n_classes, const TreeParams& params,
          const FeatureSampler& sampler)
      : x_(x), y_(y), k_(static_cast<std::size_t>(n_classes)), params_(params), sampler_(sampler) {}

  std::vector<TreeNode> take() { return std::move(nodes_); }

  int build(std::vector<std::size_t>& rows, int depth) {
    std::vector<std::int64_t> counts(k_, 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(y_[r])];

    const int index = static_cast<int>(nodes_.size());
    TreeNode leaf;
    leaf.class_counts.assign(counts.begin(), counts.end());
    nodes_.push_back(std::move(leaf));

    const auto nonzero = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_samples_leaf));
    if (nonzero <= 1 || depth >= params_.max_depth || rows.size() < 2 * min_leaf) return index;

    std::vector<std::size_t> varying;
    for (std::size_t f = 0; f < x_.features(); ++f) {
      const double first = x_.at(rows.front(), f);
      if (std::any_of(rows.begin(), rows.end(), [&](std::size_t r) { return x_.at(r, f) != first; }))
        varying.push_back(f);
    }
    const std::vector<std::size_t> candidates = sampler_ ? sampler_(varying) : varying;

    std::optional<Split> best;
    for (std::size_t f : candidates) {
      if (auto s = best_split_on(rows, f, min_leaf); s && (!best || s->score.better_than(best->score)))
        best = s;
    }
    if (!best) return index;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (x_.at(r, best->feature) <= best->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = build(left, depth + 1);
    const int rr = build(right, depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(index)];
    node.feature = static_cast<int>(best->feature);
    node.threshold = best->threshold;
    node.left = l;
    node.right = rr;
    return index;
  }

 private:
  std::optional<Split> best_split_on(const std::vector<std::size_t>& rows, std::size_t f,
                                     std::size_t min_leaf) const {
    std::vector<std::size_t> order(rows);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x_.at(a, f) < x_.at(b, f); });

    std::vector<std::int64_t> left(k_, 0), right(k_, 0);
    for (std::size_t r : order) ++right[static_cast<std::size_t>(y_[r])];

    std::optional<Split> best;
    const std::size_t n = order.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto cls = static_cast<std::size_t>(y_[order[i]]);
      ++left[cls];
      --right[cls];
      const double lo = x_.at(order[i], f);
      const double hi = x_.at(order[i + 1], f);
      if (lo == hi) continue;
      const std::size_t n_left = i + 1, n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      u128 a = 0, b = 0;
      for (std::size_t c = 0; c < k_; ++c) {
        a += static_cast<u128>(left[c] * left[c]);
        b += static_cast<u128>(right[c] * right[c]);
      }
      const SplitScore score{a * n_right + b * n_left, static_cast<u128>(n_left) * n_right};
      if (!best || score.better_than(best->score)) best = Split{f, midpoint_threshold(lo, hi), score};
    }
    return best;
  }

  const DataView& x_;
  std::span<const int> y_;
  std::size_t k_;
  TreeParams params_;
  const FeatureSampler& sampler_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

std::size_t find_leaf(std::span<const TreeNode> nodes, std::span<const double> row) noexcept {
  std::size_t i = 0;
  while (!nodes[i].is_leaf())
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                                     ? nodes[i].left
                                     : nodes[i].right);
  return i;
}

std::size_t tree_depth(std::span<const TreeNode> nodes) noexcept {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> depth(nodes.size(), 0);
  std::size_t deepest = 0;
  // Children are always created after their parent.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes[i].right)] = depth[i] + 1;
    }
  }
  return deepest;
}

std::vector<double> TreeModel::predict_proba(std::span<const double> row) const {
  const auto& counts = nodes[find_leaf(nodes, row)].class_counts;
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> p(counts.size(), 0.0);
  if (total > 0)
    for (std::size_t c = 0; c < counts.size(); ++c) p[c] = counts[c] / total;
  return p;
}

int TreeModel::predict(std::span<const double> row) const {
  const auto& counts = nodes[find_leaf(nodes, row)].class_counts;
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

TreeModel train_tree_on(const DataView& x, std::span<const int> y, std::vector<std::size_t> rows,
                        const TreeParams& params, int n_classes, const FeatureSampler& sampler) {
  if (x.rows() != y.size()) throw std::invalid_argument("feature and label row counts differ");
  if (rows.empty()) throw std::invalid_argument("cannot train a tree on zero rows");
  int max_label = 0;
  for (int label : y) {
    if (label < 0) throw std::invalid_argument("class labels must be nonnegative");
    max_label = std::max(max_label, label);
  }
  if (n_classes <= 0) n_classes = std::max(2, max_label + 1);
  if (max_label >= n_classes) throw std::invalid_argument("class label exceeds n_classes");

  TreeModel model;
  model.n_classes = n_classes;
  model.n_features = x.features();
  const int first = y[rows.front()];
  model.degenerate = std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return y[r] == first; });

  Builder builder(x, y, n_classes, params, sampler);
  builder.build(rows, 0);
  model.nodes = builder.take();
  return model;
}

TreeModel train_tree(const DataView& x, std::span<const int> y, const TreeParams& params, int n_classes) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return train_tree_on(x, y, std::move(rows), params, n_classes, {});
}

}  // namespace rtheta::classify
