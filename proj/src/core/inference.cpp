#include "bnet/inference.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "bnet/error.hpp"

namespace bnet {

namespace {

// Strides of `source` re-expressed over the variables of `target_scope`
// (0 where a target variable is absent from the source).
std::vector<std::size_t> aligned_strides(const std::vector<NodeId>& source_scope,
                                         const std::vector<int>& source_cards,
                                         const std::vector<NodeId>& target_scope) {
  std::vector<std::size_t> own(source_scope.size());
  std::size_t stride = 1;
  for (std::size_t i = source_scope.size(); i-- > 0;) {
    own[i] = stride;
    stride *= static_cast<std::size_t>(source_cards[i]);
  }
  std::vector<std::size_t> out(target_scope.size(), 0);
  for (std::size_t t = 0; t < target_scope.size(); ++t) {
    auto it = std::find(source_scope.begin(), source_scope.end(), target_scope[t]);
    if (it != source_scope.end()) out[t] = own[it - source_scope.begin()];
  }
  return out;
}

std::size_t product(const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

}  // namespace

Factor::Factor(std::vector<NodeId> scope, std::vector<int> cardinalities, std::vector<double> values)
    : scope_(std::move(scope)), cards_(std::move(cardinalities)), values_(std::move(values)) {
  if (scope_.size() != cards_.size()) fail(ErrorKind::InvalidArgument, "factor scope/cardinality mismatch");
  if (!std::is_sorted(scope_.begin(), scope_.end()) ||
      std::adjacent_find(scope_.begin(), scope_.end()) != scope_.end()) {
    fail(ErrorKind::InvalidArgument, "factor scope must be strictly ascending");
  }
  if (values_.size() != product(cards_)) fail(ErrorKind::InvalidArgument, "factor value count mismatch");
  for (double v : values_) {
    if (!(v >= 0.0)) fail(ErrorKind::InvalidArgument, "factor values must be non-negative");
  }
}

bool Factor::contains(NodeId v) const noexcept {
  return std::binary_search(scope_.begin(), scope_.end(), v);
}

Factor Factor::from_cpt(const Cpt& cpt) {
  std::vector<NodeId> scope = cpt.parents;
  scope.insert(std::lower_bound(scope.begin(), scope.end(), cpt.child), cpt.child);
  std::vector<int> cards(scope.size());
  std::vector<NodeId> layout = cpt.parents;
  layout.push_back(cpt.child);
  std::vector<int> layout_cards = cpt.parent_cardinalities;
  layout_cards.push_back(cpt.child_cardinality);
  for (std::size_t i = 0; i < scope.size(); ++i) {
    auto it = std::find(layout.begin(), layout.end(), scope[i]);
    cards[i] = layout_cards[it - layout.begin()];
  }
  const auto strides = aligned_strides(layout, layout_cards, scope);
  std::vector<double> values(product(cards));
  std::vector<int> digits(scope.size(), 0);
  std::size_t src = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = cpt.values[src];
    for (std::size_t i = scope.size(); i-- > 0;) {
      if (++digits[i] < cards[i]) {
        src += strides[i];
        break;
      }
      src -= strides[i] * (cards[i] - 1);
      digits[i] = 0;
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor Factor::indicator(NodeId variable, int cardinality, int observed) {
  if (observed < 0 || observed >= cardinality) fail(ErrorKind::InvalidArgument, "observed state out of range");
  std::vector<double> values(cardinality, 0.0);
  values[observed] = 1.0;
  return Factor({variable}, {cardinality}, std::move(values));
}

Factor Factor::multiply(const Factor& other) const {
  std::vector<NodeId> scope;
  std::set_union(scope_.begin(), scope_.end(), other.scope_.begin(), other.scope_.end(),
                 std::back_inserter(scope));
  std::vector<int> cards(scope.size());
  for (std::size_t i = 0; i < scope.size(); ++i) {
    auto it = std::find(scope_.begin(), scope_.end(), scope[i]);
    if (it != scope_.end()) {
      cards[i] = cards_[it - scope_.begin()];
    } else {
      cards[i] = other.cards_[std::find(other.scope_.begin(), other.scope_.end(), scope[i]) -
                              other.scope_.begin()];
    }
  }
  const auto sa = aligned_strides(scope_, cards_, scope);
  const auto sb = aligned_strides(other.scope_, other.cards_, scope);
  std::vector<double> values(product(cards));
  std::vector<int> digits(scope.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = values_[ia] * other.values_[ib];
    for (std::size_t i = scope.size(); i-- > 0;) {
      if (++digits[i] < cards[i]) {
        ia += sa[i];
        ib += sb[i];
        break;
      }
      ia -= sa[i] * (cards[i] - 1);
      ib -= sb[i] * (cards[i] - 1);
      digits[i] = 0;
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(values));
}

Factor Factor::sum_out(NodeId v) const {
  auto it = std::find(scope_.begin(), scope_.end(), v);
  if (it == scope_.end()) return *this;
  const std::size_t pos = it - scope_.begin();
  std::vector<NodeId> scope = scope_;
  std::vector<int> cards = cards_;
  scope.erase(scope.begin() + pos);
  cards.erase(cards.begin() + pos);
  const auto target = aligned_strides(scope, cards, scope_);
  std::vector<double> values(product(cards), 0.0);
  std::vector<int> digits(scope_.size(), 0);
  std::size_t dst = 0;
  for (double value : values_) {
    values[dst] += value;
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (++digits[i] < cards_[i]) {
        dst += target[i];
        break;
      }
      dst -= target[i] * (cards_[i] - 1);
      digits[i] = 0;
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(values));
}

double Factor::total() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum;
}

BayesianNetwork fit_cpts(const Dag& dag, const DatasetTable& data, double alpha) {
  if (!(alpha >= 0.0)) fail(ErrorKind::InvalidArgument, "alpha must be non-negative");
  if (data.empty()) fail(ErrorKind::EmptyData, "cannot fit CPTs on an empty table");
  if (static_cast<std::size_t>(dag.node_count()) != data.cols()) {
    fail(ErrorKind::InvalidArgument, "DAG has " + std::to_string(dag.node_count()) +
                                         " nodes but data has " + std::to_string(data.cols()) +
                                         " columns");
  }
  const auto& variables = data.columns();
  std::vector<Cpt> cpts;
  for (NodeId v = 0; v < dag.node_count(); ++v) {
    Cpt cpt;
    cpt.child = v;
    cpt.parents = dag.parents(v);
    cpt.child_cardinality = variables[v].cardinality();
    for (NodeId p : cpt.parents) cpt.parent_cardinalities.push_back(variables[p].cardinality());
    const std::size_t rows = cpt.row_count();
    const int card = cpt.child_cardinality;
    std::vector<double> counts(rows * card, 0.0);
    for (std::size_t r = 0; r < data.rows(); ++r) {
      auto row = data.row(r);
      if (row[v] == kMissing) continue;
      bool complete = true;
      for (NodeId p : cpt.parents) complete = complete && row[p] != kMissing;
      if (!complete) continue;
      counts[cpt.row_index_in(row) * card + row[v]] += 1.0;
    }
    cpt.values.resize(rows * card);
    for (std::size_t pc = 0; pc < rows; ++pc) {
      double total = 0.0;
      for (int s = 0; s < card; ++s) total += counts[pc * card + s];
      const double denom = total + alpha * card;
      for (int s = 0; s < card; ++s) {
        cpt.values[pc * card + s] =
            denom > 0.0 ? (counts[pc * card + s] + alpha) / denom : 1.0 / card;
      }
    }
    cpts.push_back(std::move(cpt));
  }
  return BayesianNetwork(variables, dag, std::move(cpts));
}

std::vector<NodeId> min_degree_order(const BayesianNetwork& net, NodeId keep) {
  const int n = net.size();
  std::vector<std::set<NodeId>> adj(n);
  for (NodeId v = 0; v < n; ++v) {
    const auto& parents = net.dag().parents(v);
    for (std::size_t i = 0; i < parents.size(); ++i) {
      adj[v].insert(parents[i]);
      adj[parents[i]].insert(v);
      for (std::size_t j = i + 1; j < parents.size(); ++j) {
        adj[parents[i]].insert(parents[j]);
        adj[parents[j]].insert(parents[i]);
      }
    }
  }
  std::vector<char> done(n, 0);
  done[keep] = 1;
  std::vector<NodeId> order;
  for (int step = 0; step + 1 < n; ++step) {
    NodeId pick = -1;
    std::size_t best = 0;
    for (NodeId v = 0; v < n; ++v) {
      if (done[v]) continue;
      if (pick < 0 || adj[v].size() < best) {
        pick = v;
        best = adj[v].size();
      }
    }
    done[pick] = 1;
    order.push_back(pick);
    std::vector<NodeId> neighbours(adj[pick].begin(), adj[pick].end());
    for (NodeId a : neighbours) {
      adj[a].erase(pick);
      for (NodeId b : neighbours) {
        if (a != b) adj[a].insert(b);
      }
    }
    adj[pick].clear();
  }
  return order;
}

std::vector<double> joint_with_evidence(const BayesianNetwork& net, NodeId var,
                                        const EvidenceSet& evidence,
                                        const std::optional<std::vector<NodeId>>& order) {
  if (var < 0 || var >= net.size()) fail(ErrorKind::InvalidArgument, "query variable out of range");
  validate_evidence(net, evidence);
  std::vector<NodeId> elimination = order ? *order : min_degree_order(net, var);
  if (order) {
    std::vector<NodeId> check = elimination;
    check.push_back(var);
    std::sort(check.begin(), check.end());
    for (int i = 0; i < net.size(); ++i) {
      if (static_cast<int>(check.size()) != net.size() || check[i] != i) {
        fail(ErrorKind::InvalidArgument, "elimination order must cover every non-query variable once");
      }
    }
  }

  std::vector<Factor> factors;
  factors.reserve(net.size() + evidence.size());
  for (const Cpt& cpt : net.cpts()) factors.push_back(Factor::from_cpt(cpt));
  for (auto [v, s] : evidence) factors.push_back(Factor::indicator(v, net.variable(v).cardinality(), s));

  for (NodeId v : elimination) {
    Factor merged;
    std::vector<Factor> rest;
    rest.reserve(factors.size());
    bool touched = false;
    for (auto& f : factors) {
      if (f.contains(v)) {
        merged = touched ? merged.multiply(f) : std::move(f);
        touched = true;
      } else {
        rest.push_back(std::move(f));
      }
    }
    if (touched) rest.push_back(merged.sum_out(v));
    factors = std::move(rest);
  }
  Factor result;
  for (const auto& f : factors) result = result.multiply(f);
  if (result.scope() != std::vector<NodeId>{var}) {
    fail(ErrorKind::InvalidArgument, "elimination left an unexpected scope");
  }
  return result.values();
}

PosteriorResult posterior(const BayesianNetwork& net, NodeId var, const EvidenceSet& evidence,
                          const std::optional<std::vector<NodeId>>& order) {
  if (evidence.count(var)) {
    fail(ErrorKind::VarInEvidence, "query variable '" + net.variable(var).name + "' is in the evidence");
  }
  PosteriorResult result;
  result.variable = var;
  result.evidence = evidence;
  result.distribution = joint_with_evidence(net, var, evidence, order);
  double mass = 0.0;
  for (double p : result.distribution) mass += p;
  if (!(mass > 0.0)) fail(ErrorKind::ImpossibleEvidence, "evidence has probability zero");
  for (double& p : result.distribution) p /= mass;
  result.evidence_probability = evidence.empty() ? 1.0 : std::min(mass, 1.0);
  return result;
}

PosteriorResult prior_marginal(const BayesianNetwork& net, NodeId var) {
  return posterior(net, var, {});
}

std::vector<double> likelihood(const BayesianNetwork& net, NodeId var, const EvidenceSet& evidence) {
  if (evidence.count(var)) {
    fail(ErrorKind::VarInEvidence, "query variable '" + net.variable(var).name + "' is in the evidence");
  }
  const auto prior = joint_with_evidence(net, var, {});
  if (evidence.empty()) return std::vector<double>(prior.size(), 1.0);
  const auto joint = joint_with_evidence(net, var, evidence);
  std::vector<double> out(prior.size(), 0.0);
  for (std::size_t s = 0; s < prior.size(); ++s) {
    if (prior[s] > 0.0) out[s] = std::min(joint[s] / prior[s], 1.0);
  }
  return out;
}

InterventionDelta intervention_delta(const BayesianNetwork& net, NodeId target, int target_state,
                                     const EvidenceSet& baseline, const EvidenceSet& alternative) {
  if (target < 0 || target >= net.size()) fail(ErrorKind::InvalidArgument, "target out of range");
  if (target_state < 0 || target_state >= net.variable(target).cardinality()) {
    fail(ErrorKind::InvalidArgument, "target state out of range");
  }
  InterventionDelta out;
  out.target = target;
  out.target_state = target_state;
  out.baseline_evidence = baseline;
  out.alternative_evidence = alternative;
  out.baseline_prob = posterior(net, target, baseline).distribution[target_state];
  out.alternative_prob = posterior(net, target, alternative).distribution[target_state];
  out.delta = out.alternative_prob - out.baseline_prob;
  return out;
}

}  // namespace bnet
