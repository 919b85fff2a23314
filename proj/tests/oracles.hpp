#pragma once

// Slow reference implementations used to check the library. None of these
// call into the code under test beyond plain data accessors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "bnet/network.hpp"
#include "bnet/table.hpp"

namespace oracle {

using bnet::BayesianNetwork;
using bnet::Dag;
using bnet::Edge;
using bnet::NodeId;

// Mixed-radix enumeration of every full assignment (first variable slowest).
inline void for_each_assignment(const std::vector<int>& cards,
                                const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(cards.size(), 0);
  while (true) {
    fn(a);
    int i = static_cast<int>(cards.size()) - 1;
    while (i >= 0 && ++a[i] == cards[i]) a[i--] = 0;
    if (i < 0) return;
  }
}

// P(x) as a straight product of CPT entries, no log space.
inline double joint(const BayesianNetwork& net, const std::vector<int>& a) {
  double p = 1.0;
  for (NodeId v = 0; v < net.size(); ++v) {
    const auto& cpt = net.cpt(v);
    std::size_t row = 0;
    for (std::size_t k = 0; k < cpt.parents.size(); ++k) {
      row = row * cpt.parent_cardinalities[k] + a[cpt.parents[k]];
    }
    p *= cpt.values[row * cpt.child_cardinality + a[v]];
  }
  return p;
}

// Unnormalized P(var = s, e) by summing the full joint.
inline std::vector<double> joint_with_evidence(const BayesianNetwork& net, NodeId var,
                                               const std::map<NodeId, int>& evidence) {
  std::vector<double> out(net.variable(var).cardinality(), 0.0);
  for_each_assignment(net.cardinalities(), [&](const std::vector<int>& a) {
    for (const auto& [v, s] : evidence) {
      if (a[v] != s) return;
    }
    out[a[var]] += joint(net, a);
  });
  return out;
}

inline std::vector<double> normalized(std::vector<double> v) {
  const double z = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= z;
  return v;
}

inline double evidence_probability(const BayesianNetwork& net, const std::map<NodeId, int>& evidence) {
  double z = 0.0;
  for_each_assignment(net.cardinalities(), [&](const std::vector<int>& a) {
    for (const auto& [v, s] : evidence) {
      if (a[v] != s) return;
    }
    z += joint(net, a);
  });
  return z;
}

inline bool acyclic(int n, const std::vector<Edge>& edges) {
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> out(n);
  for (auto [p, c] : edges) {
    out[p].push_back(c);
    ++indeg[c];
  }
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (indeg[v] == 0) stack.push_back(v);
  }
  int seen = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++seen;
    for (int c : out[v]) {
      if (--indeg[c] == 0) stack.push_back(c);
    }
  }
  return seen == n;
}

// Every labelled DAG on n nodes as an edge list.
inline std::vector<std::vector<Edge>> all_dags(int n) {
  std::vector<Edge> slots;
  for (int p = 0; p < n; ++p) {
    for (int c = 0; c < n; ++c) {
      if (p != c) slots.emplace_back(p, c);
    }
  }
  std::vector<std::vector<Edge>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (mask >> i & 1) edges.push_back(slots[i]);
    }
    if (acyclic(n, edges)) out.push_back(std::move(edges));
  }
  return out;
}

// Maximum-likelihood log-likelihood minus free-parameter count, counted by
// brute force over (parent configuration, child state) keys.
inline double aic(int n, const std::vector<Edge>& edges, const std::vector<std::vector<int>>& rows,
                  const std::vector<int>& cards) {
  double total = 0.0;
  for (int child = 0; child < n; ++child) {
    std::vector<int> parents;
    for (auto [p, c] : edges) {
      if (c == child) parents.push_back(p);
    }
    std::map<std::vector<int>, std::map<int, double>> counts;
    for (const auto& r : rows) {
      std::vector<int> key;
      for (int p : parents) key.push_back(r[p]);
      counts[key][r[child]] += 1.0;
    }
    for (const auto& [key, by_state] : counts) {
      double nij = 0.0;
      for (const auto& [s, c] : by_state) nij += c;
      for (const auto& [s, c] : by_state) total += c * std::log(c / nij);
    }
    long long q = 1;
    for (int p : parents) q *= cards[p];
    total -= static_cast<double>(q * (cards[child] - 1));
  }
  return total;
}

// d-separation via the moralized ancestral graph: X and Y are separated by Z
// iff removing Z disconnects them in the moral graph of An(X u Y u Z).
inline bool d_separated(const Dag& dag, const std::vector<NodeId>& x, const std::vector<NodeId>& y,
                        const std::vector<NodeId>& z) {
  const int n = dag.node_count();
  std::vector<char> anc(n, 0);
  std::vector<NodeId> stack;
  for (const auto* set : {&x, &y, &z}) {
    for (NodeId v : *set) stack.push_back(v);
  }
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (anc[v]) continue;
    anc[v] = 1;
    for (NodeId p : dag.parents(v)) stack.push_back(p);
  }
  std::vector<std::set<NodeId>> adj(n);
  for (NodeId v = 0; v < n; ++v) {
    if (!anc[v]) continue;
    const auto& ps = dag.parents(v);
    for (NodeId p : ps) {
      adj[p].insert(v);
      adj[v].insert(p);
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        adj[ps[i]].insert(ps[j]);
        adj[ps[j]].insert(ps[i]);
      }
    }
  }
  std::vector<char> blocked(n, 0), seen(n, 0);
  for (NodeId v : z) blocked[v] = 1;
  for (NodeId v : x) {
    stack.push_back(v);
  }
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (seen[v] || blocked[v]) continue;
    seen[v] = 1;
    for (NodeId w : adj[v]) stack.push_back(w);
  }
  for (NodeId v : y) {
    if (seen[v]) return false;
  }
  return true;
}

// Probability that a random positive outscores a random negative, ties 1/2.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Random DAG over n nodes in a random topological order, with random CPTs.
// `zero_prob` sprinkles exact zeros into CPT rows to exercise impossible
// evidence.
inline BayesianNetwork random_network(std::mt19937_64& gen, int n, int max_card, double edge_prob,
                                      int max_parents, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), gen);
  std::vector<bnet::VariableSpec> vars;
  for (int v = 0; v < n; ++v) {
    const int card = 2 + static_cast<int>(gen() % static_cast<std::uint64_t>(max_card - 1));
    bnet::VariableSpec spec{"v" + std::to_string(v), {}, false};
    for (int s = 0; s < card; ++s) spec.states.push_back("s" + std::to_string(s));
    vars.push_back(std::move(spec));
  }
  Dag dag(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (u(gen) < edge_prob && static_cast<int>(dag.parents(order[j]).size()) < max_parents) {
        dag.add_edge(order[i], order[j]);
      }
    }
  }
  std::vector<bnet::Cpt> cpts;
  for (int v = 0; v < n; ++v) {
    const auto& parents = dag.parents(v);
    std::size_t rows = 1;
    for (NodeId p : parents) rows *= vars[p].cardinality();
    std::vector<std::vector<double>> table;
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(vars[v].cardinality());
      double z = 0.0;
      for (double& x : row) {
        x = u(gen) < zero_prob ? 0.0 : 0.05 + u(gen);
        z += x;
      }
      if (z == 0.0) {
        row[0] = 1.0;
        z = 1.0;
      }
      for (double& x : row) x /= z;
      table.push_back(std::move(row));
    }
    cpts.push_back(bnet::make_cpt(vars, v, parents, std::move(table)));
  }
  return BayesianNetwork(std::move(vars), std::move(dag), std::move(cpts));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
