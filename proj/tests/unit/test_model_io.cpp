#include <gtest/gtest.h>

#include "rtheta/classify/model_io.hpp"
#include "rtheta/errors.hpp"
#include "support/cart_compare.hpp"
#include "support/metric_fixtures.hpp"

using namespace rtheta::classify;
using nlohmann::ordered_json;
using testing_support::random_set;

namespace {

// Through text, as on disk.
ordered_json reparse(const ordered_json& j) { return ordered_json::parse(j.dump(2)); }

}  // namespace

TEST(ModelIo, BinaryRoundTrip) {
  const auto s = random_set(8, 30, 36);
  const DataView x(s.flat, 36);
  LearnerParams p;
  p.forest.n_trees = 5;
  p.boost.rounds = 10;
  p.boost.learning_rate = 0.3;
  for (auto b : {BaseLearner::tree, BaseLearner::forest, BaseLearner::boosted}) {
    const auto model = train_binary(x, s.problem.y, b, p);
    const auto j = to_json(model);
    EXPECT_EQ(j["schema"], kModelSchema);
    EXPECT_EQ(j["kind"], to_string(b));
    const auto back = binary_classifier_from_json(reparse(j));
    EXPECT_EQ(back, model);
    EXPECT_EQ(to_json(back).dump(), j.dump());
  }
}

TEST(ModelIo, MultiLabelRoundTrip) {
  const auto s = random_set(9, 20, 4);
  std::vector<std::uint32_t> masks(s.problem.y.begin(), s.problem.y.end());
  const auto m = train_multilabel({s.flat, 4}, masks, 3, BaseLearner::boosted, {});
  EXPECT_EQ(multilabel_from_json(reparse(to_json(m))), m);
}

TEST(ModelIo, ReportRoundTrip) {
  const testing_support::ThreeRowFixture fx;
  const auto r = evaluate(fx.predicted, fx.truth, fx.names);
  EXPECT_EQ(report_from_json(reparse(to_json(r))), r);
  const auto b = evaluate_binary(std::vector<int>{1, 0}, std::vector<int>{1, 1}, "n", "p");
  EXPECT_EQ(report_from_json(reparse(to_json(b))), b);
}

TEST(ModelIo, Rejections) {
  const std::vector<double> x{0, 1, 2};
  auto j = to_json(train_binary({x, 1}, std::vector<int>{0, 1, 1}, BaseLearner::tree, {}));
  auto wrong = j;
  wrong["schema"] = "rtheta-model/0";
  EXPECT_THROW(binary_classifier_from_json(wrong), rtheta::SchemaMismatch);
  wrong = j;
  wrong["kind"] = "svm";
  EXPECT_THROW(binary_classifier_from_json(wrong), rtheta::MalformedFile);
  wrong = j;
  wrong["tree"]["nodes"][0]["left"] = 99;
  EXPECT_THROW(binary_classifier_from_json(wrong), rtheta::MalformedFile);
  wrong = j;
  wrong.erase("tree");
  EXPECT_THROW(binary_classifier_from_json(wrong), rtheta::MalformedFile);
  EXPECT_THROW(multilabel_from_json(j), rtheta::MalformedFile);
  EXPECT_THROW(report_from_json(j), rtheta::SchemaMismatch);
}
