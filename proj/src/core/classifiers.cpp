#include "bnet/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bnet/error.hpp"
#include "bnet/random.hpp"

namespace bnet {

FeatureSchema FeatureSchema::from_table(const DatasetTable& data, const std::string& label) {
  const std::size_t lc = data.column_index(label);
  if (data.column(lc).cardinality() != 2) {
    fail(ErrorKind::NonBinaryLabel, "label '" + label + "' must have exactly two states");
  }
  FeatureSchema schema;
  schema.label = label;
  schema.label_states = data.column(lc).states;
  for (std::size_t c = 0; c < data.cols(); ++c) {
    if (c != lc) schema.features.push_back(data.column(c));
  }
  return schema;
}

EncodedData encode(const FeatureSchema& schema, const DatasetTable& data, bool with_label) {
  EncodedData out;
  out.rows = data.rows();
  out.cols = schema.features.size();
  std::vector<std::size_t> source(out.cols);
  for (std::size_t f = 0; f < out.cols; ++f) {
    const auto& feature = schema.features[f];
    auto c = data.find_column(feature.name);
    if (!c) fail(ErrorKind::SchemaMismatch, "feature '" + feature.name + "' missing from input");
    if (data.column(*c).states != feature.states) {
      fail(ErrorKind::SchemaMismatch, "feature '" + feature.name + "' has different states than at training");
    }
    source[f] = *c;
  }
  out.x.resize(out.rows * out.cols);
  for (std::size_t r = 0; r < out.rows; ++r) {
    for (std::size_t f = 0; f < out.cols; ++f) {
      const int s = data.at(r, source[f]);
      if (s == kMissing) fail(ErrorKind::InvalidArgument, "missing feature value; impute before predicting");
      out.x[r * out.cols + f] = s;
    }
  }
  if (with_label) {
    auto lc = data.find_column(schema.label);
    if (!lc) fail(ErrorKind::SchemaMismatch, "label '" + schema.label + "' missing from input");
    if (data.column(*lc).states != schema.label_states) {
      fail(ErrorKind::SchemaMismatch, "label '" + schema.label + "' has different states than at training");
    }
    out.y.resize(out.rows);
    for (std::size_t r = 0; r < out.rows; ++r) {
      const int s = data.at(r, *lc);
      if (s == kMissing) fail(ErrorKind::InvalidArgument, "missing label value");
      out.y[r] = s;
    }
  }
  return out;
}

const std::vector<double>& Tree::leaf_for(const EncodedData& data, std::size_t row) const {
  int node = 0;
  while (!nodes[node].is_leaf()) {
    const auto& n = nodes[node];
    node = data.at(row, n.feature) == n.state ? n.left : n.right;
  }
  return nodes[node].leaf;
}

int Tree::depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, depth[i]);
    if (!nodes[i].is_leaf()) {
      depth[nodes[i].left] = depth[i] + 1;
      depth[nodes[i].right] = depth[i] + 1;
    }
  }
  return best;
}

namespace {

constexpr double kMinGain = 1e-12;

// Sufficient statistics for a set of rows: count, sum and sum of squares of
// the target (for 0/1 class targets the sum is the positive count).
struct Stats {
  double n = 0, sum = 0, sum_sq = 0;

  void add(double y) {
    n += 1;
    sum += y;
    sum_sq += y * y;
  }
  Stats minus(const Stats& o) const { return {n - o.n, sum - o.sum, sum_sq - o.sum_sq}; }
};

// n times the node impurity: Gini for classification, variance for regression.
double weighted_impurity(const Stats& s, bool classification) {
  if (s.n <= 0) return 0.0;
  if (classification) {
    const double pos = s.sum, neg = s.n - s.sum;
    return s.n - (pos * pos + neg * neg) / s.n;
  }
  return std::max(0.0, s.sum_sq - s.sum * s.sum / s.n);
}

class TreeBuilder {
 public:
  TreeBuilder(const EncodedData& data, const std::vector<int>& cards, const std::vector<double>& target,
              const TreeParams& params, bool classification, int features_per_split, Rng* rng,
              std::vector<double>* importance)
      : data_(data), cards_(cards), target_(target), params_(params), classification_(classification),
        features_per_split_(features_per_split), rng_(rng), importance_(importance) {}

  Tree build(std::vector<std::size_t> rows) {
    Tree tree;
    root_n_ = static_cast<double>(rows.size());
    grow(tree, rows, 0);
    return tree;
  }

 private:
  int grow(Tree& tree, const std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    Stats total;
    for (std::size_t r : rows) total.add(target_[r]);
    const double parent = weighted_impurity(total, classification_);

    int best_feature = -1, best_state = -1;
    double best_gain = kMinGain;
    if (depth < params_.max_depth && total.n >= 2.0 * params_.min_leaf && parent > kMinGain) {
      for (int f : candidate_features()) {
        std::vector<Stats> by_state(cards_[f]);
        for (std::size_t r : rows) by_state[data_.at(r, f)].add(target_[r]);
        for (int s = 0; s < cards_[f]; ++s) {
          const Stats& left = by_state[s];
          const Stats right = total.minus(left);
          if (left.n < params_.min_leaf || right.n < params_.min_leaf) continue;
          const double gain = parent - weighted_impurity(left, classification_) -
                              weighted_impurity(right, classification_);
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = f;
            best_state = s;
          }
        }
      }
    }

    if (best_feature < 0) {
      if (classification_) {
        const double p1 = total.n > 0 ? total.sum / total.n : 0.5;
        tree.nodes[id].leaf = {1.0 - p1, p1};
      } else {
        tree.nodes[id].leaf = {total.n > 0 ? total.sum / total.n : 0.0};
      }
      return id;
    }

    if (importance_) (*importance_)[best_feature] += best_gain / root_n_;
    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (data_.at(r, best_feature) == best_state ? left : right).push_back(r);
    tree.nodes[id].feature = best_feature;
    tree.nodes[id].state = best_state;
    const int l = grow(tree, left, depth + 1);
    const int rr = grow(tree, right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = rr;
    return id;
  }

  std::vector<int> candidate_features() {
    const int m = static_cast<int>(cards_.size());
    std::vector<int> all(m);
    std::iota(all.begin(), all.end(), 0);
    if (features_per_split_ >= m || !rng_) return all;
    for (int i = 0; i < features_per_split_; ++i) {
      std::swap(all[i], all[i + rng_->below(m - i)]);
    }
    all.resize(features_per_split_);
    std::sort(all.begin(), all.end());
    return all;
  }

  const EncodedData& data_;
  const std::vector<int>& cards_;
  const std::vector<double>& target_;
  TreeParams params_;
  bool classification_;
  int features_per_split_;
  Rng* rng_;
  std::vector<double>* importance_;
  double root_n_ = 1.0;
};

std::vector<int> cardinalities(const FeatureSchema& schema) {
  std::vector<int> cards;
  for (const auto& f : schema.features) cards.push_back(f.cardinality());
  return cards;
}

void require_two_classes(const EncodedData& data) {
  const auto pos = std::count(data.y.begin(), data.y.end(), 1);
  if (data.rows == 0) fail(ErrorKind::EmptyData, "training table is empty");
  if (pos == 0 || pos == static_cast<long>(data.rows)) {
    fail(ErrorKind::SingleClassTrain, "training labels contain a single class");
  }
}

void check_tree_params(const TreeParams& p) {
  if (p.max_depth < 0) fail(ErrorKind::InvalidArgument, "max_depth must be non-negative");
  if (p.min_leaf < 1) fail(ErrorKind::InvalidArgument, "min_leaf must be at least 1");
  if (p.feature_fraction > 1.0) fail(ErrorKind::InvalidArgument, "feature_fraction must be <= 1");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

std::vector<std::size_t> logistic_offsets(const FeatureSchema& schema) {
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& f : schema.features) {
    offsets.push_back(offset);
    offset += f.cardinality() - 1;
  }
  return offsets;
}

double logistic_score(const std::vector<std::size_t>& offsets, const EncodedData& data, std::size_t r,
                      const std::vector<double>& parameters) {
  double z = parameters[0];
  for (std::size_t f = 0; f < data.cols; ++f) {
    const int s = data.at(r, f);
    if (s > 0) z += parameters[1 + offsets[f] + s - 1];
  }
  return z;
}

double mean_log_loss(const std::vector<double>& scores, const std::vector<int>& y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) loss += softplus(scores[i]) - y[i] * scores[i];
  return loss / static_cast<double>(scores.size());
}

}  // namespace

ForestModel fit_forest(const DatasetTable& train, const std::string& label, const ForestParams& params,
                       std::uint64_t seed) {
  if (params.trees < 1) fail(ErrorKind::InvalidArgument, "a forest needs at least one tree");
  check_tree_params(params.tree);
  ForestModel model;
  model.schema = FeatureSchema::from_table(train, label);
  model.params = params;
  model.seed = seed;
  const EncodedData data = encode(model.schema, train, true);
  require_two_classes(data);
  const auto cards = cardinalities(model.schema);
  const int m = static_cast<int>(cards.size());
  model.features_per_split =
      params.tree.feature_fraction > 0.0
          ? std::max(1, static_cast<int>(std::ceil(params.tree.feature_fraction * m)))
          : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(m)))));
  model.features_per_split = std::min(model.features_per_split, std::max(m, 1));
  const std::vector<double> target(data.y.begin(), data.y.end());
  model.feature_importance.assign(m, 0.0);

  for (int t = 0; t < params.trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows(data.rows);
    for (auto& r : rows) r = rng.below(data.rows);
    std::vector<double> importance(m, 0.0);
    TreeBuilder builder(data, cards, target, params.tree, true, model.features_per_split, &rng, &importance);
    model.trees.push_back(builder.build(std::move(rows)));
    for (int f = 0; f < m; ++f) model.feature_importance[f] += importance[f] / params.trees;
  }
  return model;
}

std::size_t logistic_width(const FeatureSchema& schema) {
  std::size_t width = 0;
  for (const auto& f : schema.features) width += f.cardinality() - 1;
  return width;
}

double logistic_objective(const FeatureSchema& schema, const EncodedData& data,
                          const std::vector<double>& parameters, double l2) {
  const auto offsets = logistic_offsets(schema);
  std::vector<double> scores(data.rows);
  for (std::size_t r = 0; r < data.rows; ++r) scores[r] = logistic_score(offsets, data, r, parameters);
  double penalty = 0.0;
  for (std::size_t k = 1; k < parameters.size(); ++k) penalty += parameters[k] * parameters[k];
  return mean_log_loss(scores, data.y) + 0.5 * l2 * penalty;
}

std::vector<double> logistic_gradient(const FeatureSchema& schema, const EncodedData& data,
                                      const std::vector<double>& parameters, double l2) {
  const auto offsets = logistic_offsets(schema);
  std::vector<double> grad(parameters.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.rows);
  for (std::size_t r = 0; r < data.rows; ++r) {
    const double residual = (sigmoid(logistic_score(offsets, data, r, parameters)) - data.y[r]) * inv_n;
    grad[0] += residual;
    for (std::size_t f = 0; f < data.cols; ++f) {
      const int s = data.at(r, f);
      if (s > 0) grad[1 + offsets[f] + s - 1] += residual;
    }
  }
  for (std::size_t k = 1; k < parameters.size(); ++k) grad[k] += l2 * parameters[k];
  return grad;
}

LogisticModel fit_logistic(const DatasetTable& train, const std::string& label, const LogisticParams& params) {
  if (!(params.learning_rate > 0.0)) fail(ErrorKind::InvalidArgument, "learning rate must be positive");
  if (params.epochs < 0) fail(ErrorKind::InvalidArgument, "epochs must be non-negative");
  if (!(params.l2 >= 0.0)) fail(ErrorKind::InvalidArgument, "l2 must be non-negative");
  LogisticModel model;
  model.schema = FeatureSchema::from_table(train, label);
  model.params = params;
  const EncodedData data = encode(model.schema, train, true);
  require_two_classes(data);
  std::vector<double> parameters(1 + logistic_width(model.schema), 0.0);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    model.loss_trace.push_back(logistic_objective(model.schema, data, parameters, params.l2));
    const auto grad = logistic_gradient(model.schema, data, parameters, params.l2);
    for (std::size_t k = 0; k < parameters.size(); ++k) parameters[k] -= params.learning_rate * grad[k];
  }
  model.loss_trace.push_back(logistic_objective(model.schema, data, parameters, params.l2));
  model.intercept = parameters[0];
  model.weights.assign(parameters.begin() + 1, parameters.end());
  return model;
}

BoostedModel fit_boosted(const DatasetTable& train, const std::string& label, const BoostedParams& params) {
  if (params.stages < 0) fail(ErrorKind::InvalidArgument, "stages must be non-negative");
  if (!(params.shrinkage >= 0.0)) fail(ErrorKind::InvalidArgument, "shrinkage must be non-negative");
  const TreeParams tree_params{params.max_depth, params.min_leaf, 1.0};
  check_tree_params(tree_params);
  BoostedModel model;
  model.schema = FeatureSchema::from_table(train, label);
  model.params = params;
  const EncodedData data = encode(model.schema, train, true);
  require_two_classes(data);
  const auto cards = cardinalities(model.schema);
  const double pos = static_cast<double>(std::count(data.y.begin(), data.y.end(), 1));
  model.initial_log_odds = std::log(pos / (static_cast<double>(data.rows) - pos));

  std::vector<double> scores(data.rows, model.initial_log_odds);
  model.loss_trace.push_back(mean_log_loss(scores, data.y));
  std::vector<std::size_t> all(data.rows);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> residual(data.rows);
  for (int t = 0; t < params.stages; ++t) {
    for (std::size_t r = 0; r < data.rows; ++r) residual[r] = data.y[r] - sigmoid(scores[r]);
    TreeBuilder builder(data, cards, residual, tree_params, false, static_cast<int>(cards.size()), nullptr,
                        nullptr);
    Tree tree = builder.build(all);
    for (std::size_t r = 0; r < data.rows; ++r) scores[r] += params.shrinkage * tree.leaf_for(data, r)[0];
    model.stages.push_back(std::move(tree));
    model.loss_trace.push_back(mean_log_loss(scores, data.y));
  }
  return model;
}

const FeatureSchema& schema_of(const Classifier& model) {
  return std::visit([](const auto& m) -> const FeatureSchema& { return m.schema; }, model);
}

std::vector<double> predict_proba(const Classifier& model, const DatasetTable& rows) {
  const EncodedData data = encode(schema_of(model), rows, false);
  std::vector<double> out(data.rows, 0.0);
  if (const auto* forest = std::get_if<ForestModel>(&model)) {
    if (forest->trees.empty()) fail(ErrorKind::InvalidArgument, "forest has no trees");
    for (std::size_t r = 0; r < data.rows; ++r) {
      double sum = 0.0;
      for (const auto& tree : forest->trees) sum += tree.leaf_for(data, r)[1];
      out[r] = sum / static_cast<double>(forest->trees.size());
    }
  } else if (const auto* logistic = std::get_if<LogisticModel>(&model)) {
    std::vector<double> parameters{logistic->intercept};
    parameters.insert(parameters.end(), logistic->weights.begin(), logistic->weights.end());
    const auto offsets = logistic_offsets(logistic->schema);
    for (std::size_t r = 0; r < data.rows; ++r) out[r] = sigmoid(logistic_score(offsets, data, r, parameters));
  } else {
    const auto& boosted = std::get<BoostedModel>(model);
    for (std::size_t r = 0; r < data.rows; ++r) {
      double z = boosted.initial_log_odds;
      for (const auto& tree : boosted.stages) z += boosted.params.shrinkage * tree.leaf_for(data, r)[0];
      out[r] = sigmoid(z);
    }
  }
  return out;
}

namespace {

Json schema_to_json(const FeatureSchema& schema) {
  return {{"label", schema.label},
          {"label_states", schema.label_states},
          {"features", variables_to_json(schema.features)}};
}

FeatureSchema schema_from_json(const Json& doc) {
  FeatureSchema schema;
  schema.label = doc.at("label").get<std::string>();
  schema.label_states = doc.at("label_states").get<std::vector<std::string>>();
  schema.features = variables_from_json(doc.at("features"));
  if (schema.label_states.size() != 2) fail(ErrorKind::Parse, "model label must be binary");
  return schema;
}

Json tree_to_json(const Tree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) {
      nodes.push_back({{"leaf", n.leaf}});
    } else {
      nodes.push_back({{"feature", n.feature}, {"state", n.state}, {"left", n.left}, {"right", n.right}});
    }
  }
  return nodes;
}

Tree tree_from_json(const Json& doc, const FeatureSchema& schema) {
  Tree tree;
  for (const auto& n : doc) {
    TreeNode node;
    if (n.contains("leaf")) {
      node.leaf = n.at("leaf").get<std::vector<double>>();
    } else {
      node.feature = n.at("feature").get<int>();
      node.state = n.at("state").get<int>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
    }
    tree.nodes.push_back(std::move(node));
  }
  const int size = static_cast<int>(tree.nodes.size());
  if (size == 0) fail(ErrorKind::Parse, "empty tree");
  for (int i = 0; i < size; ++i) {
    const auto& n = tree.nodes[i];
    if (n.is_leaf()) {
      if (n.leaf.empty()) fail(ErrorKind::Parse, "leaf without values");
      continue;
    }
    if (n.feature >= static_cast<int>(schema.features.size()) || n.state < 0 ||
        n.state >= schema.features[n.feature].cardinality() || n.left <= i || n.right <= i ||
        n.left >= size || n.right >= size) {
      fail(ErrorKind::Parse, "malformed tree node " + std::to_string(i));
    }
  }
  return tree;
}

}  // namespace

Json classifier_to_json(const Classifier& model) {
  Json doc;
  doc["format_version"] = kModelFormatVersion;
  if (const auto* forest = std::get_if<ForestModel>(&model)) {
    doc["kind"] = "random_forest";
    doc["schema"] = schema_to_json(forest->schema);
    doc["params"] = {{"trees", forest->params.trees},
                     {"max_depth", forest->params.tree.max_depth},
                     {"min_leaf", forest->params.tree.min_leaf},
                     {"feature_fraction", forest->params.tree.feature_fraction}};
    doc["seed"] = forest->seed;
    doc["features_per_split"] = forest->features_per_split;
    Json importance = Json::object();
    for (std::size_t f = 0; f < forest->schema.features.size(); ++f) {
      importance[forest->schema.features[f].name] = forest->feature_importance[f];
    }
    doc["feature_importance"] = std::move(importance);
    Json trees = Json::array();
    for (const auto& t : forest->trees) trees.push_back(tree_to_json(t));
    doc["trees"] = std::move(trees);
  } else if (const auto* logistic = std::get_if<LogisticModel>(&model)) {
    doc["kind"] = "logistic_regression";
    doc["schema"] = schema_to_json(logistic->schema);
    doc["params"] = {{"learning_rate", logistic->params.learning_rate},
                     {"epochs", logistic->params.epochs},
                     {"l2", logistic->params.l2}};
    doc["intercept"] = logistic->intercept;
    doc["weights"] = logistic->weights;
    doc["final_loss"] = logistic->loss_trace.empty() ? 0.0 : logistic->loss_trace.back();
  } else {
    const auto& boosted = std::get<BoostedModel>(model);
    doc["kind"] = "gradient_boosting";
    doc["schema"] = schema_to_json(boosted.schema);
    doc["params"] = {{"stages", boosted.params.stages},
                     {"max_depth", boosted.params.max_depth},
                     {"min_leaf", boosted.params.min_leaf},
                     {"shrinkage", boosted.params.shrinkage}};
    doc["initial_log_odds"] = boosted.initial_log_odds;
    Json stages = Json::array();
    for (const auto& t : boosted.stages) stages.push_back(tree_to_json(t));
    doc["stages"] = std::move(stages);
    doc["loss_trace"] = boosted.loss_trace;
  }
  return doc;
}

Classifier classifier_from_json(const Json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
      fail(ErrorKind::Parse, "unsupported model format_version");
    }
    const auto kind = doc.at("kind").get<std::string>();
    FeatureSchema schema = schema_from_json(doc.at("schema"));
    const auto& p = doc.at("params");
    if (kind == "random_forest") {
      ForestModel m;
      m.schema = schema;
      m.params.trees = p.at("trees").get<int>();
      m.params.tree = {p.at("max_depth").get<int>(), p.at("min_leaf").get<int>(),
                       p.at("feature_fraction").get<double>()};
      m.seed = doc.at("seed").get<std::uint64_t>();
      m.features_per_split = doc.at("features_per_split").get<int>();
      for (const auto& f : m.schema.features) {
        m.feature_importance.push_back(doc.at("feature_importance").at(f.name).get<double>());
      }
      for (const auto& t : doc.at("trees")) m.trees.push_back(tree_from_json(t, m.schema));
      if (m.trees.empty()) fail(ErrorKind::Parse, "forest has no trees");
      return m;
    }
    if (kind == "logistic_regression") {
      LogisticModel m;
      m.schema = schema;
      m.params = {p.at("learning_rate").get<double>(), p.at("epochs").get<int>(), p.at("l2").get<double>()};
      m.intercept = doc.at("intercept").get<double>();
      m.weights = doc.at("weights").get<std::vector<double>>();
      if (m.weights.size() != logistic_width(m.schema)) fail(ErrorKind::Parse, "logistic weight count mismatch");
      m.loss_trace = {doc.at("final_loss").get<double>()};
      return m;
    }
    if (kind == "gradient_boosting") {
      BoostedModel m;
      m.schema = schema;
      m.params = {p.at("stages").get<int>(), p.at("max_depth").get<int>(), p.at("min_leaf").get<int>(),
                  p.at("shrinkage").get<double>()};
      m.initial_log_odds = doc.at("initial_log_odds").get<double>();
      for (const auto& t : doc.at("stages")) m.stages.push_back(tree_from_json(t, m.schema));
      m.loss_trace = doc.at("loss_trace").get<std::vector<double>>();
      return m;
    }
    fail(ErrorKind::Parse, "unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed model file: ") + e.what());
  }
}

}  // namespace bnet
