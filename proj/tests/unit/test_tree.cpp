#include <gtest/gtest.h>

#include "rtheta/classify/tree.hpp"
#include "support/cart_compare.hpp"

using namespace rtheta::classify;
using testing_support::compare_with_oracle;
using testing_support::random_set;

TEST(Tree, SeparatingGapMidpoint) {
  const std::vector<double> x{1, 2, 9};
  const std::vector<int> y{0, 0, 1};
  const auto t = train_tree({x, 1}, y);
  ASSERT_EQ(t.nodes.size(), 3u);
  EXPECT_EQ(t.nodes[0].feature, 0);
  EXPECT_EQ(t.nodes[0].threshold, 5.5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(t.predict(std::span(x).subspan(i, 1)), y[i]);
  EXPECT_FALSE(t.degenerate);
  EXPECT_EQ(t.depth(), 1u);
}

TEST(Tree, PureChildren) {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<int> y{0, 0, 1, 1};
  const auto t = train_tree({x, 1}, y);
  EXPECT_EQ(t.nodes[0].threshold, 1.5);
  EXPECT_EQ(t.nodes[static_cast<std::size_t>(t.nodes[0].left)].class_counts, (std::vector<double>{2, 0}));
  EXPECT_EQ(t.nodes[static_cast<std::size_t>(t.nodes[0].right)].class_counts, (std::vector<double>{0, 2}));
}

TEST(Tree, SingleClassIsFlaggedLeaf) {
  const std::vector<double> x{0, 1, 2};
  const std::vector<int> y{1, 1, 1};
  const auto t = train_tree({x, 1}, y);
  EXPECT_TRUE(t.degenerate);
  ASSERT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(t.predict(std::span(x).subspan(0, 1)), 1);
}

TEST(Tree, TiesGoToLowestFeatureThenThreshold) {
  // Features 0 and 1 are identical; either threshold 0.5 or 2.5 isolates one
  // row of class 1 equally well.
  const std::vector<double> x{0, 0, 1, 1, 2, 2, 3, 3};
  const std::vector<int> y{1, 0, 0, 1};
  const auto t = train_tree({x, 2}, y, {.max_depth = 1});
  EXPECT_EQ(t.nodes[0].feature, 0);
  EXPECT_EQ(t.nodes[0].threshold, 0.5);
}

TEST(Tree, MatchesExhaustiveOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto s = random_set(seed, 20, 5);
    const auto t = train_tree({s.flat, 5}, s.problem.y);
    EXPECT_EQ(compare_with_oracle(t, s.problem), "") << "seed " << seed;
    for (std::size_t r = 0; r < s.problem.x.size(); ++r) {
      // Leaf probabilities sum to one.
      const auto proba = t.predict_proba(s.problem.x[r]);
      EXPECT_NEAR(proba[0] + proba[1], 1.0, 1e-15);
    }
  }
}

TEST(Tree, MatchesOracleWithLimits) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    auto s = random_set(seed, 30, 36, 3);
    s.problem.max_depth = 3;
    s.problem.min_samples_leaf = 3;
    const auto t = train_tree({s.flat, 36}, s.problem.y, {.max_depth = 3, .min_samples_leaf = 3}, 3);
    EXPECT_EQ(compare_with_oracle(t, s.problem), "") << "seed " << seed;
    EXPECT_LE(t.depth(), 3u);
  }
}

TEST(Tree, PositiveColumnScalingKeepsPredictions) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = random_set(seed, 25, 6);
    const auto base = train_tree({s.flat, 6}, s.problem.y);
    for (std::size_t f = 0; f < 6; ++f) {
      for (double c : {0.001, 3.0, 1e6}) {
        auto scaled = s.flat;
        for (std::size_t r = 0; r < 25; ++r) scaled[r * 6 + f] *= c;
        const auto t = train_tree({scaled, 6}, s.problem.y);
        for (std::size_t r = 0; r < 25; ++r)
          EXPECT_EQ(t.predict(std::span(scaled).subspan(r * 6, 6)), base.predict(std::span(s.flat).subspan(r * 6, 6)))
              << seed << " " << f << " " << c;
      }
    }
  }
}

TEST(Tree, FitsDistinctRowsExactly) {
  const auto s = random_set(5, 30, 36);
  const auto t = train_tree({s.flat, 36}, s.problem.y);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < 30; ++r) correct += t.predict(s.problem.x[r]) == s.problem.y[r];
  EXPECT_EQ(correct, 30u);  // the wide features make every row distinct
}

TEST(Tree, RejectsBadInput) {
  const std::vector<double> x{0, 1};
  EXPECT_THROW(train_tree({x, 1}, std::vector<int>{0}), std::invalid_argument);
  EXPECT_THROW(train_tree({x, 1}, std::vector<int>{0, -1}), std::invalid_argument);
  EXPECT_THROW(train_tree({x, 1}, std::vector<int>{0, 2}, {}, 2), std::invalid_argument);
  EXPECT_THROW(DataView(x, 3), std::invalid_argument);
}
