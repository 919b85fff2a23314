#include "bnet/workflow.hpp"

#include "bnet/error.hpp"
#include "bnet/inference.hpp"
#include "bnet/random.hpp"

namespace bnet {

namespace {

struct Target {
  NodeId variable;
  std::optional<int> state;
};

Target parse_target(const BayesianNetwork& net, const Json& request) {
  if (!request.is_object() || !request.contains("target")) {
    fail(ErrorKind::Parse, "request needs a 'target'");
  }
  const Json& t = request.at("target");
  if (t.is_string()) return {net.index_of(t.get<std::string>()), std::nullopt};
  if (!t.is_object() || !t.contains("variable") || !t.at("variable").is_string()) {
    fail(ErrorKind::Parse, "target must be {variable, state?}");
  }
  Target out{net.index_of(t.at("variable").get<std::string>()), std::nullopt};
  if (t.contains("state") && !t.at("state").is_null()) {
    if (!t.at("state").is_string()) fail(ErrorKind::Parse, "target state must be a label");
    out.state = net.state_of(out.variable, t.at("state").get<std::string>());
  }
  return out;
}

EvidenceSet optional_evidence(const BayesianNetwork& net, const Json& request, const char* key) {
  return request.contains(key) ? evidence_from_json(net, request.at(key)) : EvidenceSet{};
}

void reject_soft_evidence(const Json& request) {
  if (request.contains("soft_evidence")) fail(ErrorKind::InvalidArgument, "soft evidence is not supported");
}

}  // namespace

Json run_query(const BayesianNetwork& net, const Json& request) {
  reject_soft_evidence(request);
  const Target target = parse_target(net, request);
  const EvidenceSet evidence = optional_evidence(net, request, "evidence");
  const PosteriorResult result = posterior(net, target.variable, evidence);
  Json out = posterior_to_json(net, result);
  if (target.state) {
    out["state"] = net.variable(target.variable).states[*target.state];
    out["probability"] = result.distribution[*target.state];
  }
  return out;
}

Json run_whatif(const BayesianNetwork& net, const Json& request) {
  reject_soft_evidence(request);
  const Target target = parse_target(net, request);
  if (!target.state) fail(ErrorKind::Parse, "whatif target needs a state");
  if (request.contains("evidence") && request.contains("baseline")) {
    fail(ErrorKind::Parse, "give the baseline as either 'evidence' or 'baseline', not both");
  }
  const EvidenceSet baseline = request.contains("baseline") ? optional_evidence(net, request, "baseline")
                                                            : optional_evidence(net, request, "evidence");
  if (!request.contains("alternative")) fail(ErrorKind::Parse, "whatif request needs 'alternative' evidence");
  const EvidenceSet alternative = evidence_from_json(net, request.at("alternative"));
  return delta_to_json(net, intervention_delta(net, target.variable, *target.state, baseline, alternative));
}

Json describe_variables(const BayesianNetwork& net) {
  Json out = Json::array();
  for (NodeId v = 0; v < net.size(); ++v) {
    Json parents = Json::array();
    for (NodeId p : net.dag().parents(v)) parents.push_back(net.variable(p).name);
    out.push_back({{"name", net.variable(v).name},
                   {"states", net.variable(v).states},
                   {"ordered", net.variable(v).ordered},
                   {"parents", std::move(parents)}});
  }
  return out;
}

Json describe_graph(const BayesianNetwork& net, const std::optional<EnsembleSummary>& ensemble) {
  Json nodes = Json::array();
  for (const auto& v : net.variables()) nodes.push_back(v.name);
  Json edges = Json::array();
  for (const auto& [p, c] : net.dag().edges()) {
    Json e{{"from", net.variable(p).name}, {"to", net.variable(c).name}};
    if (ensemble) {
      e["frequency"] = ensemble->frequency(p, c);
      e["support"] = ensemble->frequency(p, c) + ensemble->frequency(c, p);
    }
    edges.push_back(std::move(e));
  }
  Json out{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  if (ensemble) out["replicates"] = ensemble->replicates;
  return out;
}

LearnResult learn_network(const DatasetTable& data, const LearnOptions& options) {
  if (data.empty()) fail(ErrorKind::EmptyData, "cannot learn from an empty table");
  const DatasetTable table = encode_missing_as_state(data);
  SearchConstraints constraints;
  constraints.max_parents = options.max_parents;
  if (options.constraints) {
    constraints = constraints_from_json(*options.constraints, table.columns(), options.max_parents);
  }
  EnsembleOptions ens;
  ens.replicates = options.bootstraps;
  ens.restarts = options.restarts;
  ens.seed = options.seed;
  ens.threads = options.threads;

  LearnResult result;
  result.variables = table.columns();
  result.ensemble = bootstrap_ensemble(table, constraints, ens);
  result.averaged = average_structure(result.ensemble, options.threshold, constraints);
  result.network = fit_cpts(result.averaged, table, options.alpha);
  return result;
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "forest" || name == "random_forest") return ModelKind::Forest;
  if (name == "logistic" || name == "logistic_regression") return ModelKind::Logistic;
  if (name == "boosted" || name == "gradient_boosting") return ModelKind::Boosted;
  fail(ErrorKind::InvalidArgument, "unknown model kind '" + name + "'");
}

TrainResult train_classifier(const DatasetTable& data, const TrainOptions& options) {
  const DatasetTable prepared = prepare_for_classification(data, options.label);
  SplitConfig split;
  split.train_fraction = options.train_fraction;
  split.seed = derive_seed(options.seed, 0);
  if (options.stratify) split.stratify_on = options.label;
  auto [train, test] = train_test_split(prepared, split);

  TrainResult result{LogisticModel{}, DatasetTable{}, std::move(test), 0};
  if (options.use_smote) {
    SmoteConfig smote_config = options.smote;
    smote_config.seed = derive_seed(options.seed, 1);
    const std::size_t before = train.rows();
    result.train = smote(train, options.label, smote_config);
    result.synthetic_rows = result.train.rows() - before;
  } else {
    result.train = std::move(train);
  }
  switch (options.kind) {
    case ModelKind::Forest:
      result.model = fit_forest(result.train, options.label, options.forest, derive_seed(options.seed, 2));
      break;
    case ModelKind::Logistic:
      result.model = fit_logistic(result.train, options.label, options.logistic);
      break;
    case ModelKind::Boosted:
      result.model = fit_boosted(result.train, options.label, options.boosted);
      break;
  }
  return result;
}

MetricsReport evaluate_classifier(const Classifier& model, const DatasetTable& test, const EvalConfig& config) {
  const DatasetTable prepared = prepare_for_classification(test, schema_of(model).label);
  const EncodedData encoded = encode(schema_of(model), prepared, true);
  const auto scores = predict_proba(model, prepared);
  return evaluate(scores, encoded.y, config);
}

}  // namespace bnet
