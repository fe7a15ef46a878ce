#include <gtest/gtest.h>

#include <cmath>

#include "rtheta/classify/boosted.hpp"
#include "support/cart_compare.hpp"

using namespace rtheta::classify;
using testing_support::random_set;

TEST(Boosted, GainFormula) {
  EXPECT_DOUBLE_EQ(split_gain(-2, 1, 2, 1, 1), 0.5 * (4.0 / 2 + 4.0 / 2 - 0));
  EXPECT_DOUBLE_EQ(split_gain(1, 1, 1, 1, 0), 0.5 * (1 + 1 - 2));
}

TEST(Boosted, BalancedRootLeafHasZeroWeight) {
  const std::vector<double> x{1, 1, 1, 1};
  const std::vector<int> y{0, 1, 0, 1};
  const auto m = train_boosted({x, 1}, y, {.rounds = 1});
  ASSERT_EQ(m.trees.size(), 1u);
  ASSERT_EQ(m.trees[0].size(), 1u);
  EXPECT_EQ(m.trees[0][0].value, 0.0);
  EXPECT_EQ(m.predict_proba(std::span(x).subspan(0, 1)), 0.5);
}

TEST(Boosted, StumpMatchesExhaustiveGain) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = random_set(seed, 20, 8);
    const auto m = train_boosted({s.flat, 8}, s.problem.y, {.rounds = 1, .max_depth = 1});
    std::vector<double> g, h;
    for (int label : s.problem.y) {
      g.push_back(0.5 - label);
      h.push_back(0.25);
    }
    const auto want = oracle::best_stump(s.problem.x, g, h, 1.0, 1.0);
    const auto& root = m.trees[0][0];
    EXPECT_EQ(root.feature, want.feature) << "seed " << seed;
    if (want.feature >= 0) EXPECT_EQ(root.threshold, want.threshold) << "seed " << seed;
  }
}

TEST(Boosted, LeafWeights) {
  const std::vector<double> x{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const std::vector<int> y{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  const auto m = train_boosted({x, 1}, y, {.rounds = 1, .max_depth = 1});
  const auto& t = m.trees[0];
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].threshold, 4.5);
  // Five rows with g = 0.5 and h = 0.25: -2.5 / (1.25 + 1).
  EXPECT_DOUBLE_EQ(t[static_cast<std::size_t>(t[0].left)].value, -2.5 / 2.25);
  EXPECT_DOUBLE_EQ(t[static_cast<std::size_t>(t[0].right)].value, 2.5 / 2.25);
}

TEST(Boosted, TrainingLossNonIncreasing) {
  const auto s = random_set(17, 50, 6);
  std::vector<double> losses;
  const auto m = train_boosted({s.flat, 6}, s.problem.y, {.rounds = 200, .learning_rate = 0.1},
                               [&](int, double loss) { losses.push_back(loss); });
  ASSERT_EQ(losses.size(), 200u);
  EXPECT_LT(losses.front(), std::log(2.0));
  for (std::size_t i = 1; i < losses.size(); ++i) EXPECT_LE(losses[i], losses[i - 1] + 1e-12) << i;
  std::vector<double> margins;
  for (std::size_t r = 0; r < 50; ++r) margins.push_back(m.raw_score(s.problem.x[r]));
  EXPECT_NEAR(logistic_loss(margins, s.problem.y), losses.back(), 1e-12);
}

TEST(Boosted, Deterministic) {
  const auto s = random_set(3, 30, 36);
  const BoostParams p{.rounds = 20};
  EXPECT_EQ(train_boosted({s.flat, 36}, s.problem.y, p), train_boosted({s.flat, 36}, s.problem.y, p));
}

TEST(Boosted, SingleClassAndErrors) {
  const std::vector<double> x{0, 1, 2};
  const auto m = train_boosted({x, 1}, std::vector<int>{1, 1, 1});
  EXPECT_EQ(m.constant_class, 1);
  EXPECT_EQ(m.predict(std::span(x).subspan(0, 1)), 1);
  EXPECT_THROW(train_boosted({x, 1}, std::vector<int>{0, 2, 1}), std::invalid_argument);
}
