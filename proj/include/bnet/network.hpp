#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "bnet/dag.hpp"
#include "bnet/table.hpp"

namespace bnet {

// P(child | parents). Rows enumerate parent configurations row-major in
// `parents` order (the last parent varies fastest); each row is a
// distribution over the child's states.
struct Cpt {
  NodeId child = 0;
  std::vector<NodeId> parents;
  int child_cardinality = 0;
  std::vector<int> parent_cardinalities;
  std::vector<double> values;  // rows * child_cardinality

  std::size_t row_count() const noexcept;
  std::size_t row_index(std::span<const int> parent_states) const;
  // Row index of the parent configuration found in a full assignment.
  std::size_t row_index_in(std::span<const int> assignment) const;
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * child_cardinality, static_cast<std::size_t>(child_cardinality)};
  }
  double probability(std::span<const int> assignment) const;
};

// Hard evidence: variable index -> observed state index.
using EvidenceSet = std::map<NodeId, int>;

// The triple of variables, graph and conditional probability tables.
class BayesianNetwork {
 public:
  // Validates CPT shapes, row normalization (1e-9) and parent consistency.
  BayesianNetwork(std::vector<VariableSpec> variables, Dag dag, std::vector<Cpt> cpts);

  int size() const noexcept { return static_cast<int>(variables_.size()); }
  const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
  const VariableSpec& variable(NodeId v) const { return variables_.at(v); }
  const Dag& dag() const noexcept { return dag_; }
  const std::vector<Cpt>& cpts() const noexcept { return cpts_; }
  const Cpt& cpt(NodeId v) const { return cpts_.at(v); }
  std::vector<int> cardinalities() const;

  // Throws UnknownVariable.
  NodeId index_of(std::string_view name) const;
  // Throws UnknownState.
  int state_of(NodeId v, std::string_view label) const;

 private:
  std::vector<VariableSpec> variables_;
  Dag dag_;
  std::vector<Cpt> cpts_;
};

// Throws InvalidArgument on an invalid variable or state index.
void validate_evidence(const BayesianNetwork& net, const EvidenceSet& evidence);

// Product of CPT lookups, accumulated in log space. Throws IncompleteAssignment.
double joint_probability(const BayesianNetwork& net, std::span<const int> assignment);

// Ancestral sampling in topological order. Deterministic per seed.
DatasetTable forward_sample(const BayesianNetwork& net, std::size_t n, std::uint64_t seed);

// Builds a CPT from explicit rows, validating shape against the variables.
Cpt make_cpt(const std::vector<VariableSpec>& variables, NodeId child,
             std::vector<NodeId> parents, std::vector<std::vector<double>> rows);

}  // namespace bnet
