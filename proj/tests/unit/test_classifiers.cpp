#include <doctest.h>

#include <cmath>

#include "../fixtures.hpp"
#include "bnet/classifiers.hpp"
#include "../expect.hpp"
#include "bnet/error.hpp"
#include "bnet/metrics.hpp"
#include "bnet/pipeline.hpp"

using namespace bnet;

namespace {

double test_accuracy(const Classifier& model, const DatasetTable& test) {
  const auto p = predict_proba(model, test);
  const auto y = encode(schema_of(model), test, true).y;
  return accuracy(confusion_at(p, y, 0.5));
}

}  // namespace

TEST_CASE("feature schema and encoding") {
  const auto t = fixture::separable(50, 1);
  const auto schema = FeatureSchema::from_table(t, "y");
  CHECK(schema.label_states == std::vector<std::string>{"no", "yes"});
  CHECK(schema.features.size() == 5);
  CHECK(logistic_width(schema) == 4 + 2 + 3 + 2 + 1);
  const auto e = encode(schema, t, true);
  CHECK(e.rows == 50);
  CHECK(e.cols == 5);
  CHECK(e.y.size() == 50);
  DatasetTable renamed({fixture::numeric("a", 4)});
  renamed.add_row(std::vector<int>{0});
  CHECK(kind_of([&] { encode(schema, renamed, false); }) == ErrorKind::SchemaMismatch);
  DatasetTable three({fixture::numeric("x", 2), fixture::numeric("y", 3)});
  three.add_row(std::vector<int>{0, 0});
  CHECK(kind_of([&] { FeatureSchema::from_table(three, "y"); }) == ErrorKind::NonBinaryLabel);
}

TEST_CASE("forest and boosted trees separate planted data") {
  const auto train = fixture::separable(1500, 2);
  const auto test = fixture::separable(500, 3);
  ForestParams fp;
  fp.trees = 60;
  const auto forest = fit_forest(train, "y", fp, 7);
  CHECK(test_accuracy(forest, test) >= 0.95);
  CHECK(forest.features_per_split == 2);  // floor(sqrt(5))
  // The noise columns carry the least importance.
  const auto& imp = forest.feature_importance;
  REQUIRE(imp.size() == 5);
  CHECK(std::max(imp[3], imp[4]) < std::min({imp[0], imp[1], imp[2]}));
  const auto boosted = fit_boosted(train, "y", BoostedParams{});
  CHECK(test_accuracy(boosted, test) >= 0.95);
  for (std::size_t i = 1; i < boosted.loss_trace.size(); ++i) {
    CHECK(boosted.loss_trace[i] <= boosted.loss_trace[i - 1] + 1e-12);
  }
}

TEST_CASE("trees respect depth and leaf limits") {
  const auto train = fixture::separable(400, 4);
  ForestParams fp;
  fp.trees = 5;
  fp.tree.max_depth = 2;
  fp.tree.min_leaf = 20;
  const auto forest = fit_forest(train, "y", fp, 1);
  for (const auto& tree : forest.trees) CHECK(tree.depth() <= 2);
  fp.tree.max_depth = 0;
  const auto stumps = fit_forest(train, "y", fp, 1);
  for (const auto& tree : stumps.trees) CHECK(tree.nodes.size() == 1);
}

TEST_CASE("forest training is deterministic per seed") {
  const auto train = fixture::separable(300, 5);
  ForestParams fp;
  fp.trees = 10;
  const auto a = classifier_to_json(fit_forest(train, "y", fp, 3));
  CHECK(dump(a) == dump(classifier_to_json(fit_forest(train, "y", fp, 3))));
  CHECK(dump(a) != dump(classifier_to_json(fit_forest(train, "y", fp, 4))));
}

TEST_CASE("logistic gradient matches central differences") {
  const auto t = fixture::separable(200, 6);
  const auto schema = FeatureSchema::from_table(t, "y");
  const auto data = encode(schema, t, true);
  Rng rng(1);
  std::vector<double> w(logistic_width(schema) + 1);
  for (double& x : w) x = rng.uniform() * 2 - 1;
  const double l2 = 0.05;
  const auto g = logistic_gradient(schema, data, w, l2);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double h = 1e-5;
    auto up = w, down = w;
    up[i] += h;
    down[i] -= h;
    const double fd = (logistic_objective(schema, data, up, l2) - logistic_objective(schema, data, down, l2)) / (2 * h);
    CHECK(std::abs(fd - g[i]) <= 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("logistic regression descends and predicts") {
  const auto train = fixture::separable(800, 7);
  LogisticParams lp;
  lp.learning_rate = 0.5;
  lp.epochs = 400;
  const auto m = fit_logistic(train, "y", lp);
  for (std::size_t i = 1; i < m.loss_trace.size(); ++i) CHECK(m.loss_trace[i] <= m.loss_trace[i - 1] + 1e-12);
  CHECK(test_accuracy(m, fixture::separable(300, 8)) >= 0.8);
}

TEST_CASE("classifier json round trip preserves predictions") {
  const auto train = fixture::separable(300, 9);
  const auto test = fixture::separable(100, 10);
  ForestParams fp;
  fp.trees = 8;
  LogisticParams lp;
  lp.epochs = 50;
  BoostedParams bp;
  bp.stages = 20;
  const std::vector<Classifier> models{fit_forest(train, "y", fp, 1), fit_logistic(train, "y", lp),
                                       fit_boosted(train, "y", bp)};
  for (const auto& m : models) {
    const std::string text = dump(classifier_to_json(m));
    const auto back = classifier_from_json(parse_json(text));
    CHECK(predict_proba(back, test) == predict_proba(m, test));
    CHECK(dump(classifier_to_json(back)) == text);
  }
  CHECK(kind_of([] { classifier_from_json(parse_json(R"({"kind":"svm"})")); }) == ErrorKind::Parse);
}

TEST_CASE("single-class training data is rejected") {
  auto t = fixture::separable(100, 11);
  std::vector<std::size_t> negatives;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (t.at(r, 5) == 0) negatives.push_back(r);
  }
  const auto only = t.select_rows(negatives);
  CHECK(kind_of([&] { fit_forest(only, "y", ForestParams{}, 1); }) == ErrorKind::SingleClassTrain);
  CHECK(kind_of([&] { fit_logistic(only, "y", LogisticParams{}); }) == ErrorKind::SingleClassTrain);
  CHECK(kind_of([&] { fit_boosted(only, "y", BoostedParams{}); }) == ErrorKind::SingleClassTrain);
}
