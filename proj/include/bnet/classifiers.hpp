#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "bnet/serialize.hpp"
#include "bnet/table.hpp"

namespace bnet {

// Binary-label feature layout captured at training time. The positive class
// is the label's second state.
struct FeatureSchema {
  std::string label;
  std::vector<std::string> label_states;
  std::vector<VariableSpec> features;

  // Every non-label column becomes a feature. Throws NonBinaryLabel.
  static FeatureSchema from_table(const DatasetTable& data, const std::string& label);
};

struct EncodedData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> x;  // row-major state indices
  std::vector<int> y;  // 0/1, empty when the label was not requested

  int at(std::size_t r, std::size_t c) const noexcept { return x[r * cols + c]; }
};

// Throws SchemaMismatch when a feature column is absent or its states differ,
// and InvalidArgument on missing cells.
EncodedData encode(const FeatureSchema& schema, const DatasetTable& data, bool with_label);

// Flat binary tree. A split sends rows with feature == state left and every
// other row right. Leaves carry class probabilities {p0, p1} for
// classification trees and a single value for regression trees.
struct TreeNode {
  int feature = -1;
  int state = -1;
  int left = -1;
  int right = -1;
  std::vector<double> leaf;

  bool is_leaf() const noexcept { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  const std::vector<double>& leaf_for(const EncodedData& data, std::size_t row) const;
  int depth() const;
};

struct TreeParams {
  int max_depth = 8;
  int min_leaf = 1;
  // Fraction of features drawn per split; <= 0 selects sqrt(m) features.
  double feature_fraction = 0.0;
};

struct ForestParams {
  int trees = 100;
  TreeParams tree;
};

struct ForestModel {
  FeatureSchema schema;
  ForestParams params;
  std::uint64_t seed = 0;
  int features_per_split = 0;
  std::vector<Tree> trees;
  // Mean Gini decrease per feature, averaged over trees.
  std::vector<double> feature_importance;
};

struct LogisticParams {
  double learning_rate = 0.1;
  int epochs = 1000;
  double l2 = 0.01;
};

// One-hot reference encoding: state 0 of each feature is the baseline.
struct LogisticModel {
  FeatureSchema schema;
  LogisticParams params;
  std::vector<double> weights;  // sum(|states| - 1) entries
  double intercept = 0.0;
  std::vector<double> loss_trace;  // objective before each epoch, then final
};

struct BoostedParams {
  int stages = 100;
  int max_depth = 3;
  int min_leaf = 1;
  double shrinkage = 0.1;
};

struct BoostedModel {
  FeatureSchema schema;
  BoostedParams params;
  double initial_log_odds = 0.0;
  std::vector<Tree> stages;
  std::vector<double> loss_trace;  // mean training log-loss after each stage (index 0 = initial)
};

using Classifier = std::variant<ForestModel, LogisticModel, BoostedModel>;

// Bootstrapped Gini trees with per-split feature subsampling; tree t draws
// its randomness from derive_seed(seed, t). Throws SingleClassTrain.
ForestModel fit_forest(const DatasetTable& train, const std::string& label, const ForestParams& params,
                       std::uint64_t seed);

// Full-batch gradient descent on mean log-loss + (l2/2)|w|^2 (intercept
// unpenalized). Throws SingleClassTrain.
LogisticModel fit_logistic(const DatasetTable& train, const std::string& label, const LogisticParams& params);

// Stage t fits a least-squares regression tree to the residuals y - p.
// Throws SingleClassTrain.
BoostedModel fit_boosted(const DatasetTable& train, const std::string& label, const BoostedParams& params);

std::size_t logistic_width(const FeatureSchema& schema);
// Parameters are laid out as [intercept, weights...].
double logistic_objective(const FeatureSchema& schema, const EncodedData& data,
                          const std::vector<double>& parameters, double l2);
std::vector<double> logistic_gradient(const FeatureSchema& schema, const EncodedData& data,
                                      const std::vector<double>& parameters, double l2);

// Positive-class probability per row. Throws SchemaMismatch.
std::vector<double> predict_proba(const Classifier& model, const DatasetTable& rows);
const FeatureSchema& schema_of(const Classifier& model);

inline constexpr int kModelFormatVersion = 1;
Json classifier_to_json(const Classifier& model);
Classifier classifier_from_json(const Json& doc);

}  // namespace bnet
