#include "bnet/network.hpp"

#include <cmath>
#include <set>
#include <string>

#include "bnet/error.hpp"
#include "bnet/random.hpp"

namespace bnet {

std::size_t Cpt::row_count() const noexcept {
  std::size_t rows = 1;
  for (int card : parent_cardinalities) rows *= static_cast<std::size_t>(card);
  return rows;
}

std::size_t Cpt::row_index(std::span<const int> parent_states) const {
  if (parent_states.size() != parents.size()) {
    fail(ErrorKind::InvalidArgument, "parent configuration has wrong length");
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parent_states[i] < 0 || parent_states[i] >= parent_cardinalities[i]) {
      fail(ErrorKind::InvalidArgument, "parent state out of range");
    }
    index = index * parent_cardinalities[i] + parent_states[i];
  }
  return index;
}

std::size_t Cpt::row_index_in(std::span<const int> assignment) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    index = index * parent_cardinalities[i] + assignment[parents[i]];
  }
  return index;
}

double Cpt::probability(std::span<const int> assignment) const {
  return values[row_index_in(assignment) * child_cardinality + assignment[child]];
}

Cpt make_cpt(const std::vector<VariableSpec>& variables, NodeId child,
             std::vector<NodeId> parents, std::vector<std::vector<double>> rows) {
  const int n = static_cast<int>(variables.size());
  if (child < 0 || child >= n) fail(ErrorKind::InvalidArgument, "CPT child out of range");
  Cpt cpt;
  cpt.child = child;
  cpt.child_cardinality = variables[child].cardinality();
  for (NodeId p : parents) {
    if (p < 0 || p >= n || p == child) fail(ErrorKind::InvalidArgument, "CPT parent out of range");
    cpt.parent_cardinalities.push_back(variables[p].cardinality());
  }
  cpt.parents = std::move(parents);
  if (rows.size() != cpt.row_count()) {
    fail(ErrorKind::InvalidArgument, "CPT for '" + variables[child].name + "' has " +
                                         std::to_string(rows.size()) + " rows, expected " +
                                         std::to_string(cpt.row_count()));
  }
  for (const auto& row : rows) {
    if (row.size() != static_cast<std::size_t>(cpt.child_cardinality)) {
      fail(ErrorKind::InvalidArgument, "CPT row width mismatch for '" + variables[child].name + "'");
    }
    cpt.values.insert(cpt.values.end(), row.begin(), row.end());
  }
  return cpt;
}

BayesianNetwork::BayesianNetwork(std::vector<VariableSpec> variables, Dag dag, std::vector<Cpt> cpts)
    : variables_(std::move(variables)), dag_(std::move(dag)), cpts_(std::move(cpts)) {
  const int n = static_cast<int>(variables_.size());
  if (dag_.node_count() != n) fail(ErrorKind::InvalidArgument, "DAG size does not match variables");
  if (static_cast<int>(cpts_.size()) != n) fail(ErrorKind::InvalidArgument, "need one CPT per node");
  std::set<std::string_view> names;
  for (const auto& v : variables_) {
    validate_variable(v, 2);
    if (!names.insert(v.name).second) {
      fail(ErrorKind::InvalidArgument, "duplicate variable name '" + v.name + "'");
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    const Cpt& cpt = cpts_[v];
    const std::string& name = variables_[v].name;
    if (cpt.child != v) fail(ErrorKind::InvalidArgument, "CPT order does not match variables");
    if (cpt.parents != dag_.parents(v)) {
      fail(ErrorKind::InvalidArgument, "CPT parents of '" + name + "' differ from the DAG");
    }
    if (cpt.child_cardinality != variables_[v].cardinality() ||
        cpt.parent_cardinalities.size() != cpt.parents.size()) {
      fail(ErrorKind::InvalidArgument, "CPT shape mismatch for '" + name + "'");
    }
    for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
      if (cpt.parent_cardinalities[i] != variables_[cpt.parents[i]].cardinality()) {
        fail(ErrorKind::InvalidArgument, "CPT parent cardinality mismatch for '" + name + "'");
      }
    }
    if (cpt.values.size() != cpt.row_count() * cpt.child_cardinality) {
      fail(ErrorKind::InvalidArgument, "CPT value count mismatch for '" + name + "'");
    }
    for (std::size_t r = 0; r < cpt.row_count(); ++r) {
      double sum = 0.0;
      for (double p : cpt.row(r)) {
        if (!(p >= 0.0 && p <= 1.0)) {
          fail(ErrorKind::InvalidArgument, "CPT entry outside [0,1] for '" + name + "'");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        fail(ErrorKind::InvalidArgument, "CPT row " + std::to_string(r) + " of '" + name +
                                             "' does not sum to 1");
      }
    }
  }
}

std::vector<int> BayesianNetwork::cardinalities() const {
  std::vector<int> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.cardinality());
  return out;
}

NodeId BayesianNetwork::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return static_cast<NodeId>(i);
  }
  fail(ErrorKind::UnknownVariable, "unknown variable '" + std::string(name) + "'");
}

int BayesianNetwork::state_of(NodeId v, std::string_view label) const {
  int s = variable(v).state_index(label);
  if (s < 0) {
    fail(ErrorKind::UnknownState, "unknown state '" + std::string(label) + "' for variable '" +
                                      variable(v).name + "'");
  }
  return s;
}

void validate_evidence(const BayesianNetwork& net, const EvidenceSet& evidence) {
  for (auto [v, s] : evidence) {
    if (v < 0 || v >= net.size()) fail(ErrorKind::InvalidArgument, "evidence variable out of range");
    if (s < 0 || s >= net.variable(v).cardinality()) {
      fail(ErrorKind::InvalidArgument, "evidence state out of range for '" + net.variable(v).name + "'");
    }
  }
}

double joint_probability(const BayesianNetwork& net, std::span<const int> assignment) {
  if (assignment.size() != static_cast<std::size_t>(net.size())) {
    fail(ErrorKind::IncompleteAssignment, "assignment covers " + std::to_string(assignment.size()) +
                                              " of " + std::to_string(net.size()) + " variables");
  }
  for (NodeId v = 0; v < net.size(); ++v) {
    if (assignment[v] < 0 || assignment[v] >= net.variable(v).cardinality()) {
      fail(ErrorKind::IncompleteAssignment, "no valid state for '" + net.variable(v).name + "'");
    }
  }
  double log_p = 0.0;
  for (const Cpt& cpt : net.cpts()) {
    double p = cpt.probability(assignment);
    if (p == 0.0) return 0.0;
    log_p += std::log(p);
  }
  return std::exp(log_p);
}

DatasetTable forward_sample(const BayesianNetwork& net, std::size_t n, std::uint64_t seed) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "sample size must be at least 1");
  DatasetTable table(net.variables());
  const auto order = topological_order(net.dag());
  Rng rng(seed);
  std::vector<int> row(net.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId v : order) {
      const Cpt& cpt = net.cpt(v);
      auto probs = cpt.row(cpt.row_index_in(row));
      double u = rng.uniform();
      int state = cpt.child_cardinality - 1;
      double cumulative = 0.0;
      for (int s = 0; s < cpt.child_cardinality; ++s) {
        cumulative += probs[s];
        if (u < cumulative) {
          state = s;
          break;
        }
      }
      // Guard against rounding pushing u past the last nonzero entry.
      while (probs[state] == 0.0 && state > 0) --state;
      row[v] = state;
    }
    table.add_row(row, static_cast<std::int64_t>(i));
  }
  return table;
}

}  // namespace bnet
