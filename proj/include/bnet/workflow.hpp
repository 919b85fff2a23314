#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bnet/classifiers.hpp"
#include "bnet/metrics.hpp"
#include "bnet/pipeline.hpp"
#include "bnet/serialize.hpp"
#include "bnet/structure.hpp"

namespace bnet {

// Query documents shared by the CLI and the HTTP service.
//   query:  {target: {variable, state?}, evidence: {name: label}}
//   whatif: {target: {variable, state}, evidence: {...}, alternative: {...}}
// The whatif baseline is `evidence` (alias `baseline`). The key
// `soft_evidence` is reserved for likelihood evidence and rejected with
// InvalidArgument.
Json run_query(const BayesianNetwork& net, const Json& request);
Json run_whatif(const BayesianNetwork& net, const Json& request);

Json describe_variables(const BayesianNetwork& net);
// Nodes and edges of the network; each edge carries its ensemble frequency
// and skeleton support when a summary is given.
Json describe_graph(const BayesianNetwork& net, const std::optional<EnsembleSummary>& ensemble);

struct LearnOptions {
  std::uint64_t seed = 0;
  int bootstraps = 101;
  double threshold = 0.5;
  double alpha = 1.0;
  int max_parents = 4;
  int restarts = 1;
  unsigned threads = 0;
  std::optional<Json> constraints;
};

struct LearnResult {
  EnsembleSummary ensemble;
  Dag averaged;
  std::optional<BayesianNetwork> network;
  std::vector<VariableSpec> variables;
};

// Missing cells become an explicit state, then bootstrap ensemble ->
// majority-vote averaging -> smoothed CPT fit.
LearnResult learn_network(const DatasetTable& data, const LearnOptions& options);

enum class ModelKind { Forest, Logistic, Boosted };
ModelKind parse_model_kind(const std::string& name);

struct TrainOptions {
  std::string label;
  ModelKind kind = ModelKind::Forest;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  bool stratify = true;
  bool use_smote = true;
  SmoteConfig smote;
  ForestParams forest;
  LogisticParams logistic;
  BoostedParams boosted;
};

struct TrainResult {
  Classifier model;
  DatasetTable train;     // after SMOTE
  DatasetTable test;      // untouched hold-out
  std::size_t synthetic_rows = 0;
};

// Prepare -> split -> SMOTE on the training part only -> fit.
TrainResult train_classifier(const DatasetTable& data, const TrainOptions& options);

// Scores `test` with the model and reports metrics. Throws SingleClassLabels.
MetricsReport evaluate_classifier(const Classifier& model, const DatasetTable& test, const EvalConfig& config);

}  // namespace bnet
