#pragma once

#include <optional>
#include <vector>

#include "bnet/network.hpp"
#include "bnet/table.hpp"

namespace bnet {

// Non-negative table over the joint states of `scope`; the last scope
// variable varies fastest.
class Factor {
 public:
  Factor() : values_{1.0} {}
  Factor(std::vector<NodeId> scope, std::vector<int> cardinalities, std::vector<double> values);

  static Factor from_cpt(const Cpt& cpt);
  // The evidence function E_x: 1 at the observed state, 0 elsewhere.
  static Factor indicator(NodeId variable, int cardinality, int observed);

  const std::vector<NodeId>& scope() const noexcept { return scope_; }
  const std::vector<int>& cardinalities() const noexcept { return cards_; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool contains(NodeId v) const noexcept;

  Factor multiply(const Factor& other) const;
  Factor sum_out(NodeId v) const;
  double total() const;

 private:
  std::vector<NodeId> scope_;
  std::vector<int> cards_;
  std::vector<double> values_;
};

struct PosteriorResult {
  NodeId variable = 0;
  std::vector<double> distribution;
  double evidence_probability = 1.0;
  EvidenceSet evidence;
};

struct InterventionDelta {
  NodeId target = 0;
  int target_state = 0;
  EvidenceSet baseline_evidence;
  EvidenceSet alternative_evidence;
  double baseline_prob = 0.0;
  double alternative_prob = 0.0;
  double delta = 0.0;
};

// Dirichlet-smoothed multinomial estimates; with alpha = 0 an unseen parent
// configuration falls back to the uniform row. Missing cells are skipped.
BayesianNetwork fit_cpts(const Dag& dag, const DatasetTable& data, double alpha = 1.0);

// Min-degree order over the variables other than `keep`, ties by index.
std::vector<NodeId> min_degree_order(const BayesianNetwork& net, NodeId keep);

// Unnormalized P(var, e) by variable elimination. An explicit order must list
// every variable except `var` exactly once.
std::vector<double> joint_with_evidence(const BayesianNetwork& net, NodeId var,
                                        const EvidenceSet& evidence,
                                        const std::optional<std::vector<NodeId>>& order = std::nullopt);

// Throws VarInEvidence or ImpossibleEvidence.
PosteriorResult posterior(const BayesianNetwork& net, NodeId var, const EvidenceSet& evidence,
                          const std::optional<std::vector<NodeId>>& order = std::nullopt);
PosteriorResult prior_marginal(const BayesianNetwork& net, NodeId var);

// Component s is P(e | var = s); 0 where P(var = s) = 0. Throws VarInEvidence.
std::vector<double> likelihood(const BayesianNetwork& net, NodeId var, const EvidenceSet& evidence);

// P(target | alternative) - P(target | baseline).
InterventionDelta intervention_delta(const BayesianNetwork& net, NodeId target, int target_state,
                                     const EvidenceSet& baseline, const EvidenceSet& alternative);

}  // namespace bnet
