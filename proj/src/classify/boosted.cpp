#include "rtheta/classify/boosted.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rtheta::classify {

namespace {

double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

struct Candidate {
  std::size_t feature;
  double threshold;
  double gain;
};

class RegressionTreeBuilder {
 public:
  RegressionTreeBuilder(const DataView& x, std::span<const double> g, std::span<const double> h,
                        const BoostParams& params)
      : x_(x), g_(g), h_(h), params_(params) {}

  std::vector<TreeNode> build_tree() {
    std::vector<std::size_t> rows(x_.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    build(rows, 0);
    return std::move(nodes_);
  }

 private:
  int build(const std::vector<std::size_t>& rows, int depth) {
    double g_sum = 0, h_sum = 0;
    for (std::size_t r : rows) {
      g_sum += g_[r];
      h_sum += h_[r];
    }
    const int index = static_cast<int>(nodes_.size());
    TreeNode leaf;
    leaf.value = -g_sum / (h_sum + params_.lambda);
    nodes_.push_back(leaf);
    if (depth >= params_.max_depth || rows.size() < 2) return index;

    std::vector<Candidate> candidates;
    for (std::size_t f = 0; f < x_.features(); ++f) scan_feature(rows, f, g_sum, h_sum, candidates);
    if (candidates.empty()) return index;

    // Candidates arrive in (feature, threshold) order, so the first one
    // inside the tie band is the lowest feature and threshold.
    double best = candidates.front().gain;
    for (const auto& c : candidates) best = std::max(best, c.gain);
    if (!(best > 0)) return index;
    const double band = kGainTieTolerance * std::max(1.0, std::abs(best));
    const Candidate chosen =
        *std::find_if(candidates.begin(), candidates.end(), [&](const Candidate& c) { return c.gain >= best - band; });

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (x_.at(r, chosen.feature) <= chosen.threshold ? left : right).push_back(r);
    const int l = build(left, depth + 1);
    const int rr = build(right, depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(index)];
    node.feature = static_cast<int>(chosen.feature);
    node.threshold = chosen.threshold;
    node.left = l;
    node.right = rr;
    return index;
  }

  void scan_feature(const std::vector<std::size_t>& rows, std::size_t f, double g_sum, double h_sum,
                    std::vector<Candidate>& out) const {
    std::vector<std::size_t> order(rows);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x_.at(a, f) < x_.at(b, f); });
    double g_left = 0, h_left = 0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      g_left += g_[order[i]];
      h_left += h_[order[i]];
      const double lo = x_.at(order[i], f);
      const double hi = x_.at(order[i + 1], f);
      if (lo == hi) continue;
      const double h_right = h_sum - h_left;
      if (h_left < params_.min_child_weight || h_right < params_.min_child_weight) continue;
      const double mid = std::midpoint(lo, hi);
      out.push_back({f, mid < hi ? mid : lo,
                     split_gain(g_left, h_left, g_sum - g_left, h_right, params_.lambda)});
    }
  }

  const DataView& x_;
  std::span<const double> g_;
  std::span<const double> h_;
  BoostParams params_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda) noexcept {
  const double g = g_left + g_right;
  const double h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                g * g / (h + lambda));
}

double BoostedModel::raw_score(std::span<const double> row) const {
  double score = 0.0;
  for (const auto& tree : trees) score += learning_rate * tree[find_leaf(tree, row)].value;
  return score;
}

double BoostedModel::predict_proba(std::span<const double> row) const {
  if (constant_class) return *constant_class == 1 ? 1.0 : 0.0;
  return sigmoid(raw_score(row));
}

double logistic_loss(std::span<const double> margins, std::span<const int> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    // log(1 + e^m) - y*m, computed without overflow.
    const double m = margins[i];
    const double softplus = m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    total += softplus - y[i] * m;
  }
  return total / static_cast<double>(margins.size());
}

BoostedModel train_boosted(const DataView& x, std::span<const int> y, const BoostParams& params,
                           const BoostObserver& observer) {
  if (x.rows() != y.size()) throw std::invalid_argument("feature and label row counts differ");
  if (y.empty()) throw std::invalid_argument("cannot boost on zero rows");
  for (int label : y)
    if (label != 0 && label != 1) throw std::invalid_argument("boosting needs 0/1 labels");

  BoostedModel model;
  model.learning_rate = params.learning_rate;
  model.lambda = params.lambda;
  if (std::all_of(y.begin(), y.end(), [&](int label) { return label == y.front(); })) {
    model.constant_class = y.front();
    return model;
  }

  const std::size_t n = x.rows();
  std::vector<double> margin(n, 0.0), g(n), h(n);
  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      g[i] = p - y[i];
      h[i] = p * (1.0 - p);
    }
    auto tree = RegressionTreeBuilder(x, g, h, params).build_tree();
    for (std::size_t i = 0; i < n; ++i) margin[i] += params.learning_rate * tree[find_leaf(tree, x.row(i))].value;
    model.trees.push_back(std::move(tree));
    if (observer) observer(round, logistic_loss(margin, y));
  }
  return model;
}

}  // namespace rtheta::classify
